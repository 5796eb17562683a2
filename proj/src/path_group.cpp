#include "symgeo/path_group.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "symgeo/io_util.hpp"
#include "symgeo/quadrature.hpp"

namespace symgeo::paths {

GridPath::GridPath(lie::LieAlgebra algebra, Eigen::MatrixXd samples)
    : algebra_(std::move(algebra)), samples_(std::move(samples)) {
    if (samples_.rows() < 3) throw std::invalid_argument("GridPath: need N >= 2 (at least 3 samples)");
    if (samples_.cols() != algebra_.dim())
        throw std::invalid_argument("GridPath: sample width does not match the algebra dimension");
    if (!samples_.allFinite()) throw std::invalid_argument("GridPath: non-finite sample");
}

double GridPath::sup_norm() const {
    return samples_.rowwise().norm().maxCoeff();
}

GridPath zero_path(const lie::LieAlgebra& a, int N) {
    return GridPath(a, Eigen::MatrixXd::Zero(N + 1, a.dim()));
}

GridPath constant_path(const lie::LieAlgebra& a, const Eigen::VectorXd& X, int N) {
    if (X.size() != a.dim()) throw std::invalid_argument("constant_path: dimension mismatch");
    Eigen::MatrixXd s(N + 1, a.dim());
    s.rowwise() = X.transpose();
    return GridPath(a, std::move(s));
}

GridPath random_unit_path(const lie::LieAlgebra& a, int N, std::uint64_t seed, int modes) {
    const int n = a.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // a0 + sum_m a_m cos(2 pi m t) + b_m sin(2 pi m t), amplitudes halved per mode
    Eigen::MatrixXd a0(1, n), ac(modes, n), bc(modes, n);
    for (int i = 0; i < n; ++i) a0(0, i) = gauss(rng);
    for (int m = 0; m < modes; ++m)
        for (int i = 0; i < n; ++i) {
            const double scale = std::pow(0.5, m + 1);
            ac(m, i) = scale * gauss(rng);
            bc(m, i) = scale * gauss(rng);
        }
    Eigen::MatrixXd s(N + 1, n);
    for (int k = 0; k <= N; ++k) {
        const double t = static_cast<double>(k) / N;
        Eigen::RowVectorXd row = a0.row(0);
        for (int m = 0; m < modes; ++m) {
            const double w = 2.0 * std::numbers::pi * (m + 1) * t;
            row += std::cos(w) * ac.row(m) + std::sin(w) * bc.row(m);
        }
        s.row(k) = row;
    }
    GridPath raw(a, std::move(s));
    const double norm = raw.sup_norm();
    if (norm == 0.0) return raw;
    return GridPath(a, raw.samples() / norm);
}

// Midpoint of [t_k, t_{k+1}] from a cubic through four neighboring samples
// (quadratic when the grid has only three).  A linear average of the two
// endpoint samples would inject an O(h^2) error into the generator and cap
// the scheme at second order.
Eigen::VectorXd half_step_value(const Eigen::MatrixXd& s, int k) {
    const int N = static_cast<int>(s.rows()) - 1;
    if (N == 2) {
        if (k == 0) return (3.0 * s.row(0) + 6.0 * s.row(1) - s.row(2)).transpose() / 8.0;
        return (3.0 * s.row(2) + 6.0 * s.row(1) - s.row(0)).transpose() / 8.0;
    }
    if (k == 0)
        return (5.0 * s.row(0) + 15.0 * s.row(1) - 5.0 * s.row(2) + s.row(3)).transpose() / 16.0;
    if (k == N - 1)
        return (5.0 * s.row(N) + 15.0 * s.row(N - 1) - 5.0 * s.row(N - 2) + s.row(N - 3))
                   .transpose() /
               16.0;
    return (-s.row(k - 1) + 9.0 * s.row(k) + 9.0 * s.row(k + 1) - s.row(k + 2)).transpose() / 16.0;
}

Transport transport(const GridPath& gamma) {
    const int N = gamma.steps(), n = gamma.dim();
    const double h = 1.0 / N;
    Transport tr;
    tr.A.reserve(N + 1);
    tr.A.push_back(Eigen::MatrixXd::Identity(n, n));

    std::vector<Eigen::MatrixXd> ad(N + 1);
    for (int k = 0; k <= N; ++k) ad[k] = gamma.algebra().ad(gamma.at(k));

    for (int k = 0; k < N; ++k) {
        const Eigen::MatrixXd& A = tr.A.back();
        const Eigen::MatrixXd ad_half = gamma.algebra().ad(half_step_value(gamma.samples(), k));
        const Eigen::MatrixXd k1 = ad[k] * A;
        const Eigen::MatrixXd k2 = ad_half * (A + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = ad_half * (A + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = ad[k + 1] * (A + h * k3);
        Eigen::MatrixXd next = A + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite()) {
            std::ostringstream os;
            os << "transport: numerical blow-up at step " << k + 1 << " of " << N;
            throw std::runtime_error(os.str());
        }
        tr.A.push_back(std::move(next));
    }
    return tr;
}

double abel_liouville_defect(const GridPath& gamma, const Transport& tr) {
    const int N = gamma.steps();
    const double h = 1.0 / N;
    double defect = 0.0, integral = 0.0;
    double prev_trace = gamma.algebra().ad(gamma.at(0)).trace();
    defect = std::abs(tr.at(0).determinant() - 1.0);
    for (int k = 1; k <= N; ++k) {
        const double tr_k = gamma.algebra().ad(gamma.at(k)).trace();
        integral += 0.5 * h * (prev_trace + tr_k);
        prev_trace = tr_k;
        defect = std::max(defect, std::abs(tr.at(k).determinant() - std::exp(integral)));
    }
    return defect;
}

namespace {

void require_compatible(const GridPath& a, const GridPath& b, const char* op) {
    if (!(a.algebra() == b.algebra()))
        throw std::invalid_argument(std::string(op) + ": paths live in different algebras");
    if (a.steps() != b.steps())
        throw std::invalid_argument(std::string(op) + ": paths have different grid resolutions");
}

}  // namespace

GridPath path_mul(const GridPath& gamma, const GridPath& delta) {
    require_compatible(gamma, delta, "path_mul");
    const Transport tr = transport(gamma);
    Eigen::MatrixXd s(gamma.steps() + 1, gamma.dim());
    for (int k = 0; k <= gamma.steps(); ++k)
        s.row(k) = (gamma.at(k) + tr.at(k) * delta.at(k)).transpose();
    return GridPath(gamma.algebra(), std::move(s));
}

GridPath path_inv(const GridPath& gamma) {
    const Transport tr = transport(gamma);
    Eigen::MatrixXd s(gamma.steps() + 1, gamma.dim());
    for (int k = 0; k <= gamma.steps(); ++k) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(tr.at(k));
        if (!lu.isInvertible())
            throw std::runtime_error("path_inv: transport matrix is singular at a grid node");
        s.row(k) = (-(lu.solve(gamma.at(k)))).transpose();
    }
    return GridPath(gamma.algebra(), std::move(s));
}

PathFamily::PathFamily(std::vector<GridPath> paths) : paths_(std::move(paths)) {
    if (paths_.size() < 3)
        throw std::invalid_argument("PathFamily: need S >= 2 (at least 3 member paths)");
    for (const GridPath& p : paths_) {
        if (!(p.algebra() == paths_[0].algebra()))
            throw std::invalid_argument("PathFamily: members live in different algebras");
        if (p.steps() != paths_[0].steps())
            throw std::invalid_argument("PathFamily: members have different grid resolutions");
    }
}

Eigen::MatrixXd homotopy_functional(const PathFamily& family) {
    const int S = family.count() - 1;
    const int N = family.path(0).steps(), n = family.path(0).dim();
    const double ds = 1.0 / S;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(S + 1, n);
    for (int j = 0; j <= S; ++j) {
        // ds-derivative: central in the interior, one-sided at the ends
        Eigen::MatrixXd dgamma(N + 1, n);
        if (j == 0)
            dgamma = (family.path(1).samples() - family.path(0).samples()) / ds;
        else if (j == S)
            dgamma = (family.path(S).samples() - family.path(S - 1).samples()) / ds;
        else
            dgamma = (family.path(j + 1).samples() - family.path(j - 1).samples()) / (2.0 * ds);

        const Transport tr = transport(family.path(j));
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int k = 0; k <= N; ++k) {
            const Eigen::VectorXd integrand = tr.at(k).fullPivLu().solve(dgamma.row(k).transpose());
            v += num::trapezoid_weight(k, N) * integrand;
        }
        out.row(j) = v.transpose();
    }
    return out;
}

bool null_homotopic_flag(const PathFamily& family, double tol, double* max_norm) {
    const Eigen::MatrixXd v = homotopy_functional(family);
    const double m = v.rowwise().norm().maxCoeff();
    if (max_norm) *max_norm = m;
    return m <= tol;
}

std::vector<Eigen::MatrixXd> develop_path(const GridPath& gamma, const lie::MatrixRealization& r) {
    if (!(r.algebra == gamma.algebra()))
        throw std::invalid_argument("develop: realization does not match the path's algebra");
    const int N = gamma.steps(), d = r.d;
    const double h = 1.0 / N;
    std::vector<Eigen::MatrixXd> rho(N + 1);
    for (int k = 0; k <= N; ++k) rho[k] = r.of(gamma.at(k));

    std::vector<Eigen::MatrixXd> E;
    E.reserve(N + 1);
    E.push_back(Eigen::MatrixXd::Identity(d, d));
    for (int k = 0; k < N; ++k) {
        const Eigen::MatrixXd& Ek = E.back();
        const Eigen::MatrixXd rho_half = r.of(half_step_value(gamma.samples(), k));
        const Eigen::MatrixXd k1 = rho[k] * Ek;
        const Eigen::MatrixXd k2 = rho_half * (Ek + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = rho_half * (Ek + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = rho[k + 1] * (Ek + h * k3);
        Eigen::MatrixXd next = Ek + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite()) {
            std::ostringstream os;
            os << "develop: numerical blow-up at step " << k + 1 << " of " << N;
            throw std::runtime_error(os.str());
        }
        E.push_back(std::move(next));
    }
    return E;
}

Eigen::MatrixXd develop(const GridPath& gamma, const lie::MatrixRealization& r) {
    return develop_path(gamma, r).back();
}

GridPath push_path(const lie::LieAlgebraHom& h, const GridPath& gamma) {
    if (!(h.source == gamma.algebra()))
        throw std::invalid_argument("push_path: path is not in the source algebra");
    Eigen::MatrixXd s = gamma.samples() * h.matrix.transpose();
    return GridPath(h.target, std::move(s));
}

void save_path_csv(const GridPath& gamma, const std::string& path) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= gamma.dim(); ++i) os << ",x" << i;
    os << "\n";
    const int N = gamma.steps();
    for (int k = 0; k <= N; ++k) {
        os << io::fmt17(static_cast<double>(k) / N);
        for (int i = 0; i < gamma.dim(); ++i) os << "," << io::fmt17(gamma.samples()(k, i));
        os << "\n";
    }
    io::atomic_write(path, os.str());
}

GridPath load_path_csv(const lie::LieAlgebra& a, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");
    std::vector<Eigen::VectorXd> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != a.dim() + 1)
            throw std::invalid_argument(path + ": row width does not match the algebra dimension");
        Eigen::VectorXd r(a.dim());
        for (int i = 0; i < a.dim(); ++i) r[i] = vals[i + 1];
        rows.push_back(std::move(r));
    }
    Eigen::MatrixXd s(rows.size(), a.dim());
    for (std::size_t k = 0; k < rows.size(); ++k) s.row(k) = rows[k].transpose();
    return GridPath(a, std::move(s));
}

void save_family(const PathFamily& family, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const int S = family.count() - 1;
    for (int j = 0; j <= S; ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "path_%04d.csv", j);
        save_path_csv(family.path(j), (fs::path(dir) / name).string());
    }
    nlohmann::ordered_json manifest;
    manifest["S"] = S;
    manifest["N"] = family.path(0).steps();
    manifest["algebra"] = family.path(0).algebra().label();
    io::atomic_write((fs::path(dir) / "family.json").string(), manifest.dump(2) + "\n");
}

PathFamily load_family(const lie::LieAlgebra& a, const std::string& dir) {
    namespace fs = std::filesystem;
    nlohmann::json manifest = io::load_json((fs::path(dir) / "family.json").string());
    const int S = manifest.at("S").get<int>();
    const int N = manifest.at("N").get<int>();
    if (manifest.at("algebra").get<std::string>() != a.label())
        throw std::invalid_argument("load_family: manifest algebra label does not match");
    std::vector<GridPath> paths;
    for (int j = 0; j <= S; ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "path_%04d.csv", j);
        GridPath p = load_path_csv(a, (fs::path(dir) / name).string());
        if (p.steps() != N) throw std::invalid_argument("load_family: member resolution disagrees with manifest");
        paths.push_back(std::move(p));
    }
    return PathFamily(std::move(paths));
}

}  // namespace symgeo::paths
