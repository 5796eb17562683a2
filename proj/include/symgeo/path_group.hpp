#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "symgeo/lie_algebra.hpp"

namespace symgeo::paths {

/// Piecewise-linear path [0,1] -> g sampled at t_k = k/N.
class GridPath {
public:
    GridPath(lie::LieAlgebra algebra, Eigen::MatrixXd samples);

    const lie::LieAlgebra& algebra() const { return algebra_; }
    int steps() const { return static_cast<int>(samples_.rows()) - 1; }
    int dim() const { return static_cast<int>(samples_.cols()); }
    const Eigen::MatrixXd& samples() const { return samples_; }
    Eigen::VectorXd at(int k) const { return samples_.row(k).transpose(); }

    /// max_k |gamma(t_k)|_2 (the discrete supremum norm)
    double sup_norm() const;

private:
    lie::LieAlgebra algebra_;
    Eigen::MatrixXd samples_;  // (N+1) x n
};

GridPath zero_path(const lie::LieAlgebra& a, int N);
GridPath constant_path(const lie::LieAlgebra& a, const Eigen::VectorXd& X, int N);

/// Seeded random path: a low-order trigonometric series with N(0,1)
/// coefficients, normalized to discrete sup norm 1.  The underlying function
/// depends only on the seed, so resampling at a different N refines the same
/// path.
GridPath random_unit_path(const lie::LieAlgebra& a, int N, std::uint64_t seed, int modes = 2);

/// Solution A(t_k) of A' = ad(gamma(t)) A, A(0) = id, by classical RK4 with
/// cubic interpolation of the samples at half-steps.
struct Transport {
    std::vector<Eigen::MatrixXd> A;  // N+1 matrices, A[0] = identity

    const Eigen::MatrixXd& at(int k) const { return A[k]; }
};

Transport transport(const GridPath& gamma);

/// Max over grid nodes of |det A(t_k) - exp(int_0^{t_k} tr ad(gamma))|
/// (trapezoid rule for the integral).
double abel_liouville_defect(const GridPath& gamma, const Transport& tr);

/// (gamma . delta)(t) = gamma(t) + A_gamma(t) delta(t)
GridPath path_mul(const GridPath& gamma, const GridPath& delta);

/// Inverse for the product above: delta(t_k) = -A_gamma(t_k)^{-1} gamma(t_k).
GridPath path_inv(const GridPath& gamma);

/// Family gamma_s over a uniform s-grid on [0,1]; shared algebra and N.
class PathFamily {
public:
    explicit PathFamily(std::vector<GridPath> paths);
    int count() const { return static_cast<int>(paths_.size()); }  // S+1
    const GridPath& path(int j) const { return paths_[j]; }

private:
    std::vector<GridPath> paths_;
};

/// v(s_j) = int_0^1 A_{gamma_{s_j}}(t)^{-1} d gamma_s/ds (t) dt with the
/// s-derivative by central differences (one-sided at the ends) and the
/// t-integral by the trapezoid rule.  Rows of the result are v(s_j).
Eigen::MatrixXd homotopy_functional(const PathFamily& family);

/// True when max_j |v(s_j)| <= tol; the membership test for families meant to
/// stay inside the identity-component subgroup.
bool null_homotopic_flag(const PathFamily& family, double tol = 1e-6, double* max_norm = nullptr);

/// Solves E' = rho(gamma(t)) E, E(0) = id on the same grid; returns all E(t_k).
std::vector<Eigen::MatrixXd> develop_path(const GridPath& gamma, const lie::MatrixRealization& r);

/// E(1) of develop_path: the group element the path develops to.
Eigen::MatrixXd develop(const GridPath& gamma, const lie::MatrixRealization& r);

/// Applies a homomorphism samplewise.
GridPath push_path(const lie::LieAlgebraHom& h, const GridPath& gamma);

/// CSV layout: header "t,x1..xn", one row per grid node.
void save_path_csv(const GridPath& gamma, const std::string& path);
GridPath load_path_csv(const lie::LieAlgebra& a, const std::string& path);

/// A family is stored as a directory of numbered CSVs plus a manifest
/// {"S": S, "N": N, "algebra": label}.
void save_family(const PathFamily& family, const std::string& dir);
PathFamily load_family(const lie::LieAlgebra& a, const std::string& dir);

}  // namespace symgeo::paths
