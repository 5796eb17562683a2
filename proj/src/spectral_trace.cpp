#include "symgeo/spectral_trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace symgeo::spectral {

namespace {

constexpr double kMergeTol = 1e-9;  // eigenvalue grouping tolerance on norms
constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Eigen::Matrix2d FlatTorus::dual_basis() const {
    return kTwoPi * lattice.inverse().transpose();
}

FlatTorus FlatTorus::square() {
    FlatTorus t;
    t.lattice = kTwoPi * Eigen::Matrix2d::Identity();
    return t;
}

FlatTorus FlatTorus::rectangular() {
    FlatTorus t;
    t.lattice = Eigen::Matrix2d::Zero();
    t.lattice(0, 0) = kTwoPi;
    t.lattice(1, 1) = 2.0 * kTwoPi;
    return t;
}

bool FlatTorus::valid() const {
    return lattice.allFinite() && std::abs(lattice.determinant()) > 1e-12;
}

namespace {

// Norms of B k for integer k in a box, collected per row chunk so the
// concatenation order is fixed.
std::vector<double> collect_norms(const Eigen::Matrix2d& B, long long b1, long long b2, double lmax,
                                  par::Exec ex) {
    const std::size_t rows = static_cast<std::size_t>(2 * b1 + 1);
    std::vector<std::vector<double>> per_row(rows);
    par::for_chunks(rows, 4, ex, [&](std::size_t rb, std::size_t re, std::size_t) {
        for (std::size_t r = rb; r < re; ++r) {
            const long long i = static_cast<long long>(r) - b1;
            std::vector<double>& out = per_row[r];
            for (long long j = -b2; j <= b2; ++j) {
                const double x = B(0, 0) * i + B(0, 1) * j;
                const double y = B(1, 0) * i + B(1, 1) * j;
                const double norm = std::hypot(x, y);
                if (norm <= lmax + kMergeTol) out.push_back(norm);
            }
        }
    });
    std::vector<double> all;
    for (const auto& row : per_row) all.insert(all.end(), row.begin(), row.end());
    return all;
}

}  // namespace

SpectrumList enumerate_spectrum(const FlatTorus& torus, double lmax, par::Exec ex, long long cap) {
    if (!torus.valid()) throw std::invalid_argument("enumerate_spectrum: singular lattice");
    if (lmax <= 0.0) throw std::invalid_argument("enumerate_spectrum: cutoff must be positive");

    const Eigen::Matrix2d B = torus.dual_basis();
    // |k_i| <= lmax * |column_i(Gamma)| / 2 pi from k = B^{-1} v.
    const long long b1 = static_cast<long long>(std::floor(lmax * torus.lattice.col(0).norm() / kTwoPi)) + 1;
    const long long b2 = static_cast<long long>(std::floor(lmax * torus.lattice.col(1).norm() / kTwoPi)) + 1;
    const long long box = (2 * b1 + 1) * (2 * b2 + 1);
    if (box > cap) {
        std::ostringstream os;
        os << "enumerate_spectrum: bounding box holds " << box << " candidates, above the cap of "
           << cap << "; lower the cutoff";
        throw std::runtime_error(os.str());
    }

    std::vector<double> norms = collect_norms(B, b1, b2, lmax, ex);
    std::sort(norms.begin(), norms.end());

    SpectrumList s;
    s.torus = torus;
    s.cutoff = lmax;
    for (double v : norms) {
        if (!s.lambda.empty() && v - s.lambda.back() <= kMergeTol) {
            ++s.multiplicity.back();
        } else {
            s.lambda.push_back(v);
            s.multiplicity.push_back(1);
        }
    }
    s.cumulative.resize(s.lambda.size());
    long long run = 0;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        run += s.multiplicity[i];
        s.cumulative[i] = run;
    }
    return s;
}

long long counting_function(const SpectrumList& s, double lambda) {
    if (lambda > s.cutoff)
        throw std::invalid_argument("counting_function: lambda exceeds the enumeration cutoff");
    const auto it = std::upper_bound(s.lambda.begin(), s.lambda.end(), lambda);
    if (it == s.lambda.begin()) return 0;
    return s.cumulative[static_cast<std::size_t>(it - s.lambda.begin()) - 1];
}

WeylFit weyl_fit(const SpectrumList& s, double lambda) {
    WeylFit fit;
    fit.measured = static_cast<double>(counting_function(s, lambda)) / (lambda * lambda);
    fit.predicted = s.torus.volume() * std::numbers::pi / (kTwoPi * kTwoPi);
    fit.ratio = fit.measured / fit.predicted;
    return fit;
}

SmoothedDensity smoothed_density(const SpectrumList& s, double lambda, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("smoothed_density: sigma must be positive");
    if (lambda + 6.0 * sigma > s.cutoff)
        throw std::invalid_argument(
            "smoothed_density: cutoff too small (need lambda + 6 sigma <= cutoff)");
    const double inv = 1.0 / (sigma * std::sqrt(kTwoPi));
    double sum = 0.0;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        const double u = (lambda - s.lambda[i]) / sigma;
        sum += s.multiplicity[i] * inv * std::exp(-0.5 * u * u);
    }
    SmoothedDensity out;
    out.value = sum;
    const double c0 = s.torus.volume() * kTwoPi;  // vol{p = 1} in T*X
    out.leading_term = c0 * lambda / (kTwoPi * kTwoPi);
    return out;
}

TraceSignal wave_trace(const SpectrumList& s, double t_min, double t_max, double dt, double eps,
                       par::Exec ex) {
    if (eps <= 0.0) throw std::invalid_argument("wave_trace: eps must be positive");
    if (dt <= 0.0 || t_max < t_min) throw std::invalid_argument("wave_trace: bad t grid");

    TraceSignal tr;
    tr.eps = eps;
    const std::size_t count = static_cast<std::size_t>(std::floor((t_max - t_min) / dt + 0.5)) + 1;
    tr.t.resize(count);
    for (std::size_t i = 0; i < count; ++i) tr.t[i] = t_min + static_cast<double>(i) * dt;
    tr.value.assign(count, {0.0, 0.0});

    std::vector<double> damped(s.lambda.size());
    for (std::size_t j = 0; j < s.lambda.size(); ++j)
        damped[j] = static_cast<double>(s.multiplicity[j]) * std::exp(-eps * s.lambda[j]);

    par::for_chunks(count, 64, ex, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            const double t = tr.t[i];
            double re = 0.0, im = 0.0;
            for (std::size_t j = 0; j < s.lambda.size(); ++j) {
                const double ph = s.lambda[j] * t;
                re += damped[j] * std::cos(ph);
                im -= damped[j] * std::sin(ph);
            }
            tr.value[i] = {re, im};
        }
    });
    return tr;
}

std::vector<double> lattice_lengths(const FlatTorus& torus, double max_len) {
    const Eigen::Matrix2d& G = torus.lattice;
    // Bounding box via the dual: |k_i| <= max_len * |column_i(dual)| / 2 pi.
    const Eigen::Matrix2d D = torus.dual_basis();
    const long long b1 = static_cast<long long>(std::floor(max_len * D.col(0).norm() / kTwoPi)) + 1;
    const long long b2 = static_cast<long long>(std::floor(max_len * D.col(1).norm() / kTwoPi)) + 1;
    std::vector<double> lengths;
    for (long long i = -b1; i <= b1; ++i)
        for (long long j = -b2; j <= b2; ++j) {
            if (i == 0 && j == 0) continue;
            const double x = G(0, 0) * i + G(0, 1) * j;
            const double y = G(1, 0) * i + G(1, 1) * j;
            const double norm = std::hypot(x, y);
            if (norm <= max_len + kMergeTol) lengths.push_back(norm);
        }
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end(),
                              [](double a, double b) { return b - a <= kMergeTol; }),
                  lengths.end());
    return lengths;
}

std::vector<Peak> detect_peaks(const TraceSignal& tr, const FlatTorus& torus, int k, double t_min) {
    if (tr.t.size() < 3) throw std::invalid_argument("detect_peaks: trace too short");
    const double spacing = tr.t[1] - tr.t[0];
    if (spacing > 0.005 + 1e-12)
        throw std::invalid_argument("detect_peaks: grid spacing must be <= 0.005");

    std::vector<Peak> maxima;
    for (std::size_t i = 1; i + 1 < tr.t.size(); ++i) {
        if (tr.t[i] <= t_min) continue;
        const double a = tr.abs_at(i);
        if (a > tr.abs_at(i - 1) && a >= tr.abs_at(i + 1)) maxima.push_back({tr.t[i], a, 0.0, 0.0});
    }
    if (static_cast<int>(maxima.size()) < k) {
        std::ostringstream os;
        os << "detect_peaks: found only " << maxima.size() << " local maxima, need " << k;
        throw std::runtime_error(os.str());
    }
    std::sort(maxima.begin(), maxima.end(), [](const Peak& x, const Peak& y) { return x.height > y.height; });
    maxima.resize(k);
    std::sort(maxima.begin(), maxima.end(), [](const Peak& x, const Peak& y) { return x.t < y.t; });

    const std::vector<double> lengths = lattice_lengths(torus, tr.t.back() + 1.0);
    for (Peak& p : maxima) {
        const auto it = std::lower_bound(lengths.begin(), lengths.end(), p.t);
        double best = std::numeric_limits<double>::infinity(), best_len = 0.0;
        if (it != lengths.end() && std::abs(*it - p.t) < best) {
            best = std::abs(*it - p.t);
            best_len = *it;
        }
        if (it != lengths.begin() && std::abs(*(it - 1) - p.t) < best) {
            best = std::abs(*(it - 1) - p.t);
            best_len = *(it - 1);
        }
        p.matched_length = best_len;
        p.residual = best;
    }
    return maxima;
}

}  // namespace symgeo::spectral
