#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "symgeo/parallel.hpp"

namespace symgeo::spectral {

/// Flat 2-torus R^2/Gamma; columns of `lattice` span Gamma.
struct FlatTorus {
    Eigen::Matrix2d lattice;

    double volume() const { return std::abs(lattice.determinant()); }

    /// Dual lattice basis: columns of 2 pi (Gamma^{-1})^T.
    Eigen::Matrix2d dual_basis() const;

    /// Gamma = 2 pi Z^2 (dual = Z^2).
    static FlatTorus square();
    /// Gamma = diag(2 pi, 4 pi) Z^2.
    static FlatTorus rectangular();

    bool valid() const;
};

/// Spectrum of P = sqrt(-Laplace): the norms of dual-lattice vectors up to the
/// cutoff, grouped by norm (merging tolerance 1e-9) with multiplicities.
struct SpectrumList {
    FlatTorus torus;
    double cutoff = 0.0;
    std::vector<double> lambda;          // ascending distinct eigenvalues
    std::vector<long long> multiplicity;  // aligned with lambda
    std::vector<long long> cumulative;    // running multiplicity sums

    long long total_count() const { return cumulative.empty() ? 0 : cumulative.back(); }
};

/// Enumerates dual-lattice vectors inside the ball |v| <= lmax via a bounding
/// box; errors out when the box population would exceed `cap`.
SpectrumList enumerate_spectrum(const FlatTorus& torus, double lmax,
                                par::Exec ex = par::Exec::parallel,
                                long long cap = 10'000'000);

/// Multiplicity-weighted right-continuous counting function N(lambda).
long long counting_function(const SpectrumList& s, double lambda);

/// Leading Weyl coefficient: measured N(lambda)/lambda^2 against the phase
/// space prediction vol(torus) * pi / (2 pi)^2.
struct WeylFit {
    double measured = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
};

WeylFit weyl_fit(const SpectrumList& s, double lambda);

/// sum_j m_j chi(lambda - lambda_j) with unit-mass Gaussian chi of width
/// sigma; requires lambda + 6 sigma <= cutoff.  leading_term is the expansion
/// coefficient c0 lambda / (2 pi)^2 with c0 = vol(torus) * 2 pi.
struct SmoothedDensity {
    double value = 0.0;
    double leading_term = 0.0;
};

SmoothedDensity smoothed_density(const SpectrumList& s, double lambda, double sigma);

/// Abel-regularized wave trace S(t) = sum_j m_j e^{-i lambda_j t - eps lambda_j}.
struct TraceSignal {
    std::vector<double> t;
    std::vector<std::complex<double>> value;
    double eps = 0.0;

    double abs_at(std::size_t i) const { return std::abs(value[i]); }
};

TraceSignal wave_trace(const SpectrumList& s, double t_min, double t_max, double dt, double eps,
                       par::Exec ex = par::Exec::parallel);

/// Sorted lengths of nonzero lattice vectors up to max_len (the lengths of
/// closed geodesics).
std::vector<double> lattice_lengths(const FlatTorus& torus, double max_len);

struct Peak {
    double t = 0.0;
    double height = 0.0;
    double matched_length = 0.0;  // nearest geodesic length
    double residual = 0.0;        // |t - matched_length|
};

/// The k tallest local maxima of |S(t)| with t > t_min, returned sorted by t
/// and matched against the lattice lengths.  Requires grid spacing <= 0.005;
/// throws when fewer than k peaks exist.
std::vector<Peak> detect_peaks(const TraceSignal& tr, const FlatTorus& torus, int k,
                               double t_min = 1.0);

}  // namespace symgeo::spectral
