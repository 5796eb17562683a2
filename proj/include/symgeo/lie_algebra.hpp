#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace symgeo::lie {

/// Finite-dimensional real Lie algebra given by structure constants:
/// [e_i, e_j] = sum_k c[i][j][k] e_k, stored densely.
class LieAlgebra {
public:
    /// Builds from the entries with i < j; the mirror c[j][i][k] = -c[i][j][k]
    /// is filled in automatically.  Entries are 0-based here.
    struct Entry {
        int i, j, k;
        double value;
    };
    static LieAlgebra from_lower(int dim, std::string label, const std::vector<Entry>& entries);

    /// Builds from a full raw tensor without enforcing antisymmetry; meant for
    /// validation workflows.  c has dim^3 values laid out as (i*dim + j)*dim + k.
    static LieAlgebra from_raw(int dim, std::string label, std::vector<double> c);

    int dim() const { return dim_; }
    const std::string& label() const { return label_; }

    double structure(int i, int j, int k) const { return c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }

    /// [X, Y] = sum_{i,j} X_i Y_j c[i][j][.]
    Eigen::VectorXd bracket(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;

    /// Matrix of ad(X): column j is [X, e_j].
    Eigen::MatrixXd ad(const Eigen::VectorXd& X) const;

    bool operator==(const LieAlgebra& o) const { return dim_ == o.dim_ && c_ == o.c_; }

private:
    LieAlgebra(int dim, std::string label, std::vector<double> c);

    int dim_ = 0;
    std::string label_;
    std::vector<double> c_;  // dense dim^3 tensor
};

/// Max violations of the defining identities; both must be <= 1e-12 to pass.
struct ValidationReport {
    double max_antisymmetry = 0.0;
    double max_jacobi = 0.0;
    bool pass = false;
};

ValidationReport validate(const LieAlgebra& a);

/// Linear map between algebras; matrix is dim(target) x dim(source).
struct LieAlgebraHom {
    LieAlgebra source;
    LieAlgebra target;
    Eigen::MatrixXd matrix;
};

/// Max over basis pairs of |h([e_i,e_j]) - [h(e_i),h(e_j)]|.
double hom_bracket_defect(const LieAlgebraHom& h);

Eigen::VectorXd apply_hom(const LieAlgebraHom& h, const Eigen::VectorXd& X);

/// Matrices rho(e_i) realizing the bracket as a commutator.
struct MatrixRealization {
    LieAlgebra algebra;
    int d = 0;
    std::vector<Eigen::MatrixXd> rep;

    /// rho(X) = sum_i X_i rho(e_i).
    Eigen::MatrixXd of(const Eigen::VectorXd& X) const;
};

/// Max over basis pairs of |[rho(e_i),rho(e_j)] - rho([e_i,e_j])|.
double realization_defect(const MatrixRealization& r);

struct StandardAlgebra {
    LieAlgebra algebra;
    MatrixRealization realization;
};

/// Factory for the built-in families: abelian(n), heisenberg3, affine1, so3,
/// sl2.  Unknown labels are rejected with the list of known ones.
StandardAlgebra make_standard(const std::string& label);

/// gl(d) with basis E_{ab} ordered column-major (index a + b*d).
LieAlgebra gl_algebra(int d);

/// The homomorphism algebra -> gl(d) sending e_i to rho(e_i), flattened
/// column-major.
LieAlgebraHom hom_from_realization(const MatrixRealization& r);

/// Structure-constant file: JSON {"dim": n, "label": s, "c": [[i,j,k,v],...]}
/// with 1-based indices and i < j; the loader mirrors antisymmetry and
/// validates.
LieAlgebra load_structure_file(const std::string& path);
void save_structure_file(const LieAlgebra& a, const std::string& path);

}  // namespace symgeo::lie
