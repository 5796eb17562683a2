#include "symgeo/dh_localization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "symgeo/io_util.hpp"

namespace symgeo::dh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double weight_product(const FixedPointDatum& p) {
    double prod = 1.0;
    for (int w : p.weights) prod *= w;
    return prod;
}

double int_pow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::vector<double> HamiltonianS1Model::support_residuals() const {
    std::vector<double> res(halfdim, 0.0);
    for (int k = 0; k < halfdim; ++k) {
        double s = 0.0;
        for (const FixedPointDatum& p : points) s += int_pow(p.value, k) / weight_product(p);
        res[k] = s;
    }
    return res;
}

void HamiltonianS1Model::validate() const {
    if (halfdim < 1) throw std::invalid_argument("model '" + label + "': halfdim must be positive");
    if (points.empty()) throw std::invalid_argument("model '" + label + "': no fixed points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].weights.size()) != halfdim) {
            std::ostringstream os;
            os << "model '" << label << "': point " << i << " has " << points[i].weights.size()
               << " weights, expected " << halfdim;
            throw std::invalid_argument(os.str());
        }
        for (int w : points[i].weights)
            if (w == 0) {
                std::ostringstream os;
                os << "model '" << label << "': point " << i << " (value " << points[i].value
                   << ") has a zero weight";
                throw std::invalid_argument(os.str());
            }
    }
    const std::vector<double> res = support_residuals();
    for (int k = 0; k < halfdim; ++k)
        if (std::abs(res[k]) > 1e-10) {
            std::ostringstream os;
            os << "model '" << label << "': compact-support identity sum f^" << k
               << "/prod(w) = " << res[k] << " (must vanish; the density would not have compact support)";
            throw std::invalid_argument(os.str());
        }
}

double HamiltonianS1Model::min_value() const {
    double m = points.front().value;
    for (const auto& p : points) m = std::min(m, p.value);
    return m;
}

double HamiltonianS1Model::max_value() const {
    double m = points.front().value;
    for (const auto& p : points) m = std::max(m, p.value);
    return m;
}

double localization_value(const HamiltonianS1Model& m, double t) {
    if (t == 0.0)
        throw std::invalid_argument("localization_value: t = 0 is the volume limit; use total_volume");
    m.validate();
    double sum = 0.0;
    for (const FixedPointDatum& p : m.points)
        sum += std::exp(-t * p.value) / (int_pow(t, m.halfdim) * weight_product(p));
    return int_pow(kTwoPi, m.halfdim) * sum;
}

double total_volume(const HamiltonianS1Model& m) {
    m.validate();
    double sum = 0.0;
    for (const FixedPointDatum& p : m.points)
        sum += int_pow(-p.value, m.halfdim) / weight_product(p);
    return int_pow(kTwoPi, m.halfdim) * sum / factorial(m.halfdim);
}

PiecewisePoly dh_density(const HamiltonianS1Model& m) {
    m.validate();
    const int n = m.halfdim;

    // Breakpoints: critical values, coincident ones merged.
    std::vector<double> vals;
    for (const auto& p : m.points) vals.push_back(p.value);
    std::sort(vals.begin(), vals.end());
    std::vector<double> breaks;
    for (double v : vals)
        if (breaks.empty() || v - breaks.back() > 1e-12 * std::max(1.0, std::abs(v)))
            breaks.push_back(v);
    if (breaks.size() < 2)
        throw std::invalid_argument("dh_density: all critical values coincide; empty support");

    // On [b_i, b_{i+1}): rho = sum_{f_p <= b_i} C_p (x - f_p)^{n-1},
    // C_p = (2pi)^n / ((n-1)! prod w); expand around b_i.
    std::vector<std::vector<double>> coef(breaks.size() - 1, std::vector<double>(n, 0.0));
    const double norm = int_pow(kTwoPi, n) / factorial(n - 1);
    for (const auto& p : m.points) {
        const double C = norm / weight_product(p);
        for (std::size_t i = 0; i < coef.size(); ++i) {
            if (p.value > breaks[i] + 1e-12 * std::max(1.0, std::abs(p.value))) continue;
            const double shift = breaks[i] - p.value;
            for (int j = 0; j <= n - 1; ++j)
                coef[i][j] += C * binomial(n - 1, j) * int_pow(shift, n - 1 - j);
        }
    }
    return PiecewisePoly(std::move(breaks), std::move(coef));
}

namespace {

std::vector<std::array<double, 2>> ordered_convex(const Polygon& poly) {
    if (poly.vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    std::array<double, 2> c = {0.0, 0.0};
    for (const auto& v : poly.vertices) {
        c[0] += v[0];
        c[1] += v[1];
    }
    c[0] /= poly.vertices.size();
    c[1] /= poly.vertices.size();
    std::vector<std::array<double, 2>> vs = poly.vertices;
    std::sort(vs.begin(), vs.end(), [&](const auto& a, const auto& b) {
        return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
    });
    return vs;
}

// Genericity of xi: no edge of the polygon may be parallel to the slice
// fibers, i.e. adjacent vertices must take distinct values.  Non-adjacent
// vertices may coincide (the density just merges breakpoints there).
void require_generic(const std::vector<std::array<double, 2>>& vs, const std::array<long long, 2>& xi) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::size_t j = (i + 1) % vs.size();
        const double si = xi[0] * vs[i][0] + xi[1] * vs[i][1];
        const double sj = xi[0] * vs[j][0] + xi[1] * vs[j][1];
        if (std::abs(si - sj) < 1e-12)
            throw std::invalid_argument(
                "toric oracle: xi is not generic (an edge is parallel to the slice, value " +
                io::fmt17(si) + ")");
    }
}

}  // namespace

std::vector<double> toric_slice_density(const Polygon& poly, const std::array<long long, 2>& xi,
                                        const std::vector<double>& xs) {
    const auto vs = ordered_convex(poly);
    require_generic(vs, xi);
    const std::size_t nv = vs.size();
    // coarea: the pushforward of Lebesgue measure under u -> <u, xi> has
    // density H^1(slice) / |xi|
    const double xi_norm = std::hypot(static_cast<double>(xi[0]), static_cast<double>(xi[1]));
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t q = 0; q < xs.size(); ++q) {
        const double x = xs[q];
        // Intersect the level line <u, xi> = x with every edge.
        std::vector<std::array<double, 2>> hits;
        for (std::size_t i = 0; i < nv; ++i) {
            const auto& a = vs[i];
            const auto& b = vs[(i + 1) % nv];
            const double sa = xi[0] * a[0] + xi[1] * a[1];
            const double sb = xi[0] * b[0] + xi[1] * b[1];
            if ((sa < x && sb < x) || (sa > x && sb > x)) continue;
            if (sa == sb) continue;  // excluded by genericity
            const double t = (x - sa) / (sb - sa);
            if (t < 0.0 || t > 1.0) continue;
            hits.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
        double len = 0.0;
        for (std::size_t i = 0; i < hits.size(); ++i)
            for (std::size_t j = i + 1; j < hits.size(); ++j)
                len = std::max(len, std::hypot(hits[i][0] - hits[j][0], hits[i][1] - hits[j][1]));
        out[q] = kTwoPi * kTwoPi * len / xi_norm;
    }
    return out;
}

HamiltonianS1Model model_from_polygon(const Polygon& poly, const std::array<long long, 2>& xi,
                                      const std::string& label) {
    const auto vs = ordered_convex(poly);
    require_generic(vs, xi);
    const std::size_t nv = vs.size();

    auto primitive = [](double dx, double dy) -> std::array<long long, 2> {
        const long long ix = std::llround(dx), iy = std::llround(dy);
        if (std::abs(dx - ix) > 1e-9 || std::abs(dy - iy) > 1e-9)
            throw std::invalid_argument("toric model: edge generators must be integral");
        const long long g = std::gcd(std::abs(ix), std::abs(iy));
        if (g == 0) throw std::invalid_argument("toric model: degenerate edge");
        return {ix / g, iy / g};
    };

    HamiltonianS1Model m;
    m.halfdim = 2;
    m.label = label;
    for (std::size_t i = 0; i < nv; ++i) {
        const auto& v = vs[i];
        const auto& nxt = vs[(i + 1) % nv];
        const auto& prv = vs[(i + nv - 1) % nv];
        const auto g1 = primitive(nxt[0] - v[0], nxt[1] - v[1]);
        const auto g2 = primitive(prv[0] - v[0], prv[1] - v[1]);
        FixedPointDatum p;
        p.value = xi[0] * v[0] + xi[1] * v[1];
        p.weights = {static_cast<int>(xi[0] * g1[0] + xi[1] * g1[1]),
                     static_cast<int>(xi[0] * g2[0] + xi[1] * g2[1])};
        m.points.push_back(std::move(p));
    }
    m.validate();
    return m;
}

HamiltonianS1Model product_model(const HamiltonianS1Model& a, const HamiltonianS1Model& b,
                                 const std::string& label) {
    HamiltonianS1Model m;
    m.halfdim = a.halfdim + b.halfdim;
    m.label = label;
    for (const auto& pa : a.points)
        for (const auto& pb : b.points) {
            FixedPointDatum p;
            p.value = pa.value + pb.value;
            p.weights = pa.weights;
            p.weights.insert(p.weights.end(), pb.weights.begin(), pb.weights.end());
            m.points.push_back(std::move(p));
        }
    return m;
}

double SphereHistogram::bin_center(int i) const {
    const double width = (bin_hi - bin_lo) / bins;
    return bin_lo + (i + 0.5) * width;
}

namespace {

constexpr std::uint64_t kMcChunk = 1 << 16;

// Uniform double in [0, 1) from the top 53 bits; fixed mapping so results do
// not depend on the standard library's distribution internals.
double canonical(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Marsaglia polar method; returns two independent N(0,1) values.
void polar_pair(std::mt19937_64& rng, double& g0, double& g1) {
    for (;;) {
        const double u = 2.0 * canonical(rng) - 1.0;
        const double v = 2.0 * canonical(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            g0 = u * f;
            g1 = v * f;
            return;
        }
    }
}

}  // namespace

SphereHistogram mc_sphere_pushforward(std::uint64_t samples, std::uint64_t seed, int bins,
                                      par::Exec ex) {
    if (bins < 1) throw std::invalid_argument("mc_sphere_pushforward: bins must be positive");
    if (samples < 1) throw std::invalid_argument("mc_sphere_pushforward: samples must be positive");

    SphereHistogram h;
    h.bins = bins;
    h.samples = samples;
    h.seed = seed;
    h.rng_id = "mt19937_64+polar/v1";
    h.counts.assign(bins, 0);

    const std::size_t n_chunks = par::chunk_count(samples, kMcChunk);
    std::vector<std::vector<long long>> partial(n_chunks);
    par::for_chunks(samples, kMcChunk, ex, [&](std::size_t b, std::size_t e, std::size_t c) {
        std::vector<long long> local(bins, 0);
        // One substream per chunk: seeded from (seed, chunk index).
        std::seed_seq sq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                         static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(c & 0xffffffffu),
                         static_cast<std::uint32_t>(c >> 32)};
        std::mt19937_64 rng(sq);
        double spare = 0.0;
        bool have_spare = false;
        for (std::size_t i = b; i < e; ++i) {
            double g[3];
            if (have_spare) {
                g[0] = spare;
                polar_pair(rng, g[1], g[2]);
                have_spare = false;
            } else {
                polar_pair(rng, g[0], g[1]);
                polar_pair(rng, g[2], spare);
                have_spare = true;
            }
            const double r2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if (r2 < 1e-300) continue;  // astronomically rare; drop rather than bias
            const double z = g[2] / std::sqrt(r2);
            int idx = static_cast<int>((z + 1.0) * 0.5 * bins);
            idx = std::clamp(idx, 0, bins - 1);
            ++local[idx];
        }
        partial[c] = std::move(local);
    });
    for (const auto& local : partial)
        for (int i = 0; i < bins; ++i) h.counts[i] += local[i];

    const double width = 2.0 / bins;
    h.density.resize(bins);
    for (int i = 0; i < bins; ++i)
        h.density[i] = 4.0 * std::numbers::pi * static_cast<double>(h.counts[i]) /
                       (static_cast<double>(samples) * width);
    return h;
}

VerifyReport verify_identity(const HamiltonianS1Model& m, const std::vector<double>& t_grid,
                             const VerifyOptions& opt) {
    m.validate();
    const PiecewisePoly rho = dh_density(m);

    VerifyReport rep;
    for (double t : t_grid) {
        VerifyReport::Entry e;
        e.t = t;
        e.localization = localization_value(m, t);
        e.transform = rho.laplace(t);
        e.rel_error = std::abs(e.localization - e.transform) /
                      std::max(std::abs(e.localization), 1e-300);
        rep.max_internal_rel_error = std::max(rep.max_internal_rel_error, e.rel_error);
        rep.per_t.push_back(e);
    }

    if (opt.mc) {
        rep.max_mc_rel_error = 0.0;
        for (int i = 0; i < opt.mc->bins; ++i) {
            const double x = opt.mc->bin_center(i);
            const double expected = rho.eval(x);
            if (expected <= 0.0) continue;
            rep.max_mc_rel_error = std::max(rep.max_mc_rel_error,
                                            std::abs(opt.mc->density[i] - expected) / expected);
        }
    }

    if (opt.polygon) {
        const double lo = rho.breakpoints().front(), hi = rho.breakpoints().back();
        std::vector<double> xs(opt.toric_grid);
        for (int i = 0; i < opt.toric_grid; ++i)
            xs[i] = lo + (i + 0.5) * (hi - lo) / opt.toric_grid;
        const std::vector<double> oracle = toric_slice_density(*opt.polygon, opt.xi, xs);
        rep.max_toric_abs_error = 0.0;
        for (int i = 0; i < opt.toric_grid; ++i)
            rep.max_toric_abs_error =
                std::max(rep.max_toric_abs_error, std::abs(oracle[i] - rho.eval(xs[i])));
    }
    return rep;
}

HamiltonianS1Model load_model(const std::string& path) {
    nlohmann::json j = io::load_json(path);
    for (const char* key : {"halfdim", "label", "points"})
        if (!j.contains(key))
            throw std::invalid_argument("model file " + path + ": missing field '" + key + "'");
    HamiltonianS1Model m;
    m.halfdim = j.at("halfdim").get<int>();
    m.label = j.at("label").get<std::string>();
    std::size_t idx = 0;
    for (const auto& jp : j.at("points")) {
        if (!jp.contains("value") || !jp.contains("weights"))
            throw std::invalid_argument("model file " + path + ": point " + std::to_string(idx) +
                                        " needs fields 'value' and 'weights'");
        FixedPointDatum p;
        p.value = jp.at("value").get<double>();
        for (const auto& w : jp.at("weights")) p.weights.push_back(w.get<int>());
        m.points.push_back(std::move(p));
        ++idx;
    }
    m.validate();
    return m;
}

void save_model(const HamiltonianS1Model& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["halfdim"] = m.halfdim;
    j["label"] = m.label;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : m.points) {
        nlohmann::ordered_json jp;
        jp["value"] = p.value;
        jp["weights"] = p.weights;
        pts.push_back(jp);
    }
    j["points"] = pts;
    io::atomic_write(path, j.dump(2) + "\n");
}

}  // namespace symgeo::dh
