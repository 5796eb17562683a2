#include "symgeo/lie_algebra.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "symgeo/io_util.hpp"

namespace symgeo::lie {

namespace {

void check_index(int i, int dim, const char* what) {
    if (i < 0 || i >= dim) {
        std::ostringstream os;
        os << "LieAlgebra: index " << i << " for " << what << " outside [0," << dim << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

LieAlgebra::LieAlgebra(int dim, std::string label, std::vector<double> c)
    : dim_(dim), label_(std::move(label)), c_(std::move(c)) {
    if (dim_ < 1) throw std::invalid_argument("LieAlgebra: dim must be positive");
    if (c_.size() != static_cast<std::size_t>(dim_) * dim_ * dim_)
        throw std::invalid_argument("LieAlgebra: structure tensor has wrong size");
    for (double v : c_)
        if (!std::isfinite(v)) throw std::invalid_argument("LieAlgebra: non-finite structure constant");
}

LieAlgebra LieAlgebra::from_lower(int dim, std::string label, const std::vector<Entry>& entries) {
    std::vector<double> c(static_cast<std::size_t>(dim) * dim * dim, 0.0);
    auto at = [&](int i, int j, int k) -> double& {
        return c[(static_cast<std::size_t>(i) * dim + j) * dim + k];
    };
    for (const Entry& e : entries) {
        check_index(e.i, dim, "i");
        check_index(e.j, dim, "j");
        check_index(e.k, dim, "k");
        if (e.i >= e.j) throw std::invalid_argument("LieAlgebra::from_lower: entries require i < j");
        at(e.i, e.j, e.k) += e.value;
        at(e.j, e.i, e.k) -= e.value;
    }
    return LieAlgebra(dim, std::move(label), std::move(c));
}

LieAlgebra LieAlgebra::from_raw(int dim, std::string label, std::vector<double> c) {
    return LieAlgebra(dim, std::move(label), std::move(c));
}

Eigen::VectorXd LieAlgebra::bracket(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
    if (X.size() != dim_ || Y.size() != dim_)
        throw std::invalid_argument("bracket: vector dimension does not match the algebra");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
        if (X[i] == 0.0) continue;
        for (int j = 0; j < dim_; ++j) {
            const double xy = X[i] * Y[j];
            if (xy == 0.0) continue;
            for (int k = 0; k < dim_; ++k) out[k] += xy * structure(i, j, k);
        }
    }
    return out;
}

Eigen::MatrixXd LieAlgebra::ad(const Eigen::VectorXd& X) const {
    if (X.size() != dim_)
        throw std::invalid_argument("ad: vector dimension does not match the algebra");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
        for (int i = 0; i < dim_; ++i) {
            if (X[i] == 0.0) continue;
            for (int k = 0; k < dim_; ++k) m(k, j) += X[i] * structure(i, j, k);
        }
    return m;
}

ValidationReport validate(const LieAlgebra& a) {
    const int n = a.dim();
    ValidationReport rep;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                rep.max_antisymmetry = std::max(rep.max_antisymmetry,
                                                std::abs(a.structure(i, j, k) + a.structure(j, i, k)));
    // Cyclic Jacobi sum: sum_m c[i][j][m]c[m][k][l] + c[j][k][m]c[m][i][l] + c[k][i][m]c[m][j][l]
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m)
                        s += a.structure(i, j, m) * a.structure(m, k, l) +
                             a.structure(j, k, m) * a.structure(m, i, l) +
                             a.structure(k, i, m) * a.structure(m, j, l);
                    rep.max_jacobi = std::max(rep.max_jacobi, std::abs(s));
                }
    rep.pass = rep.max_antisymmetry <= 1e-12 && rep.max_jacobi <= 1e-12;
    return rep;
}

double hom_bracket_defect(const LieAlgebraHom& h) {
    const int ns = h.source.dim();
    if (h.matrix.rows() != h.target.dim() || h.matrix.cols() != ns)
        throw std::invalid_argument("LieAlgebraHom: matrix shape does not match source/target");
    double defect = 0.0;
    for (int i = 0; i < ns; ++i)
        for (int j = i + 1; j < ns; ++j) {
            Eigen::VectorXd br = Eigen::VectorXd::Zero(ns);
            for (int k = 0; k < ns; ++k) br[k] = h.source.structure(i, j, k);
            const Eigen::VectorXd lhs = h.matrix * br;
            const Eigen::VectorXd rhs = h.target.bracket(h.matrix.col(i), h.matrix.col(j));
            defect = std::max(defect, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    return defect;
}

Eigen::VectorXd apply_hom(const LieAlgebraHom& h, const Eigen::VectorXd& X) {
    if (X.size() != h.source.dim())
        throw std::invalid_argument("apply_hom: vector dimension does not match the source algebra");
    return h.matrix * X;
}

Eigen::MatrixXd MatrixRealization::of(const Eigen::VectorXd& X) const {
    if (X.size() != algebra.dim())
        throw std::invalid_argument("MatrixRealization: vector dimension mismatch");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < algebra.dim(); ++i) m += X[i] * rep[i];
    return m;
}

double realization_defect(const MatrixRealization& r) {
    const int n = r.algebra.dim();
    if (static_cast<int>(r.rep.size()) != n)
        throw std::invalid_argument("MatrixRealization: wrong number of matrices");
    double defect = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXd comm = r.rep[i] * r.rep[j] - r.rep[j] * r.rep[i];
            for (int k = 0; k < n; ++k) comm -= r.algebra.structure(i, j, k) * r.rep[k];
            defect = std::max(defect, comm.cwiseAbs().maxCoeff());
        }
    return defect;
}

namespace {

MatrixRealization realization(const LieAlgebra& a, int d, std::vector<Eigen::MatrixXd> rep) {
    return MatrixRealization{a, d, std::move(rep)};
}

StandardAlgebra make_abelian(int n) {
    LieAlgebra a = LieAlgebra::from_lower(n, "abelian(" + std::to_string(n) + ")", {});
    std::vector<Eigen::MatrixXd> rep(n, Eigen::MatrixXd::Zero(1, 1));
    return {a, realization(a, 1, std::move(rep))};
}

StandardAlgebra make_heisenberg3() {
    // [X, Y] = Z with X = E12, Y = E23, Z = E13.
    LieAlgebra a = LieAlgebra::from_lower(3, "heisenberg3", {{0, 1, 2, 1.0}});
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 3), Y = X, Z = X;
    X(0, 1) = 1.0;
    Y(1, 2) = 1.0;
    Z(0, 2) = 1.0;
    return {a, realization(a, 3, {X, Y, Z})};
}

StandardAlgebra make_affine1() {
    // [A, B] = B; A = diag(1,0), B = E12.
    LieAlgebra a = LieAlgebra::from_lower(2, "affine1", {{0, 1, 1, 1.0}});
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2), B = A;
    A(0, 0) = 1.0;
    B(0, 1) = 1.0;
    return {a, realization(a, 2, {A, B})};
}

StandardAlgebra make_so3() {
    // [e1,e2]=e3 cyclically; rep by the infinitesimal rotation generators.
    LieAlgebra a = LieAlgebra::from_lower(3, "so3",
                                          {{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {0, 2, 1, -1.0}});
    Eigen::MatrixXd L1 = Eigen::MatrixXd::Zero(3, 3), L2 = L1, L3 = L1;
    L1(1, 2) = -1.0; L1(2, 1) = 1.0;
    L2(0, 2) = 1.0;  L2(2, 0) = -1.0;
    L3(0, 1) = -1.0; L3(1, 0) = 1.0;
    return {a, realization(a, 3, {L1, L2, L3})};
}

StandardAlgebra make_sl2() {
    // Basis (H, E, F): [H,E]=2E, [H,F]=-2F, [E,F]=H.
    LieAlgebra a = LieAlgebra::from_lower(3, "sl2",
                                          {{0, 1, 1, 2.0}, {0, 2, 2, -2.0}, {1, 2, 0, 1.0}});
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2), E = H, F = H;
    H(0, 0) = 1.0; H(1, 1) = -1.0;
    E(0, 1) = 1.0;
    F(1, 0) = 1.0;
    return {a, realization(a, 2, {H, E, F})};
}

}  // namespace

StandardAlgebra make_standard(const std::string& label) {
    if (label == "heisenberg3") return make_heisenberg3();
    if (label == "affine1") return make_affine1();
    if (label == "so3") return make_so3();
    if (label == "sl2") return make_sl2();
    if (label.rfind("abelian(", 0) == 0 && label.back() == ')') {
        const std::string inner = label.substr(8, label.size() - 9);
        std::size_t pos = 0;
        int n = 0;
        try {
            n = std::stoi(inner, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == inner.size() && n >= 1) return make_abelian(n);
    }
    throw std::invalid_argument("make_standard: unknown label '" + label +
                                "'; known labels: abelian(n), heisenberg3, affine1, so3, sl2");
}

LieAlgebra gl_algebra(int d) {
    if (d < 1) throw std::invalid_argument("gl_algebra: d must be positive");
    const int n = d * d;
    std::vector<double> c(static_cast<std::size_t>(n) * n * n, 0.0);
    auto idx = [d](int a, int b) { return a + b * d; };  // E_{ab}, column-major
    auto at = [&](int p, int q, int r) -> double& {
        return c[(static_cast<std::size_t>(p) * n + q) * n + r];
    };
    // [E_{ij}, E_{kl}] = delta_{jk} E_{il} - delta_{li} E_{kj}
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const int p = idx(i, j), q = idx(k, l);
                    if (j == k) at(p, q, idx(i, l)) += 1.0;
                    if (l == i) at(p, q, idx(k, j)) -= 1.0;
                }
    return LieAlgebra::from_raw(n, "gl(" + std::to_string(d) + ")", std::move(c));
}

LieAlgebraHom hom_from_realization(const MatrixRealization& r) {
    const int n = r.algebra.dim(), d = r.d;
    Eigen::MatrixXd m(d * d, n);
    for (int i = 0; i < n; ++i)
        m.col(i) = Eigen::Map<const Eigen::VectorXd>(r.rep[i].data(), d * d);
    return LieAlgebraHom{r.algebra, gl_algebra(d), std::move(m)};
}

LieAlgebra load_structure_file(const std::string& path) {
    nlohmann::json j = io::load_json(path);
    if (!j.contains("dim") || !j.contains("label") || !j.contains("c"))
        throw std::invalid_argument("structure file " + path + ": requires fields dim, label, c");
    const int dim = j.at("dim").get<int>();
    if (dim < 1) throw std::invalid_argument("structure file " + path + ": dim must be positive");
    std::vector<LieAlgebra::Entry> entries;
    for (const auto& row : j.at("c")) {
        if (!row.is_array() || row.size() != 4)
            throw std::invalid_argument("structure file " + path + ": field c expects rows [i,j,k,value]");
        // 1-based indices with i < j in the file
        const int i = row[0].get<int>(), jj = row[1].get<int>(), k = row[2].get<int>();
        if (i < 1 || i > dim || jj < 1 || jj > dim || k < 1 || k > dim)
            throw std::invalid_argument("structure file " + path + ": index out of range in row");
        if (i >= jj)
            throw std::invalid_argument("structure file " + path + ": rows require i < j (1-based)");
        entries.push_back({i - 1, jj - 1, k - 1, row[3].get<double>()});
    }
    LieAlgebra a = LieAlgebra::from_lower(dim, j.at("label").get<std::string>(), entries);
    ValidationReport rep = validate(a);
    if (!rep.pass) {
        std::ostringstream os;
        os << "structure file " << path << ": invariants violated (antisymmetry residual "
           << rep.max_antisymmetry << ", Jacobi residual " << rep.max_jacobi << ")";
        throw std::invalid_argument(os.str());
    }
    return a;
}

void save_structure_file(const LieAlgebra& a, const std::string& path) {
    nlohmann::ordered_json j;
    j["dim"] = a.dim();
    j["label"] = a.label();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < a.dim(); ++i)
        for (int jj = i + 1; jj < a.dim(); ++jj)
            for (int k = 0; k < a.dim(); ++k)
                if (a.structure(i, jj, k) != 0.0)
                    rows.push_back({i + 1, jj + 1, k + 1, a.structure(i, jj, k)});
    j["c"] = rows;
    io::atomic_write(path, j.dump(2) + "\n");
}

}  // namespace symgeo::lie
