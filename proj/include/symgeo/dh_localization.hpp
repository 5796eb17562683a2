#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "symgeo/parallel.hpp"
#include "symgeo/piecewise_poly.hpp"

namespace symgeo::dh {

/// Isolated fixed point of a periodic Hamiltonian: critical value and the
/// integer isotropy weights on the tangent space.
struct FixedPointDatum {
    double value = 0.0;
    std::vector<int> weights;
};

/// Circle action with isolated fixed points on a compact 2n-manifold.
struct HamiltonianS1Model {
    int halfdim = 0;  // n
    std::string label;
    std::vector<FixedPointDatum> points;

    /// Residuals of sum_p f(p)^k / prod(w) for k = 0..n-1; all must vanish for
    /// the pushforward density to have compact support.
    std::vector<double> support_residuals() const;

    /// Throws std::invalid_argument naming the violated invariant (zero
    /// weight, wrong weight count, support identity residual > 1e-10).
    void validate() const;

    double min_value() const;
    double max_value() const;
};

/// (2 pi)^n sum_p e^{-t f(p)} / (t^n prod w); t = 0 is rejected (use
/// total_volume for the limit).
double localization_value(const HamiltonianS1Model& m, double t);

/// lim_{t->0}: the total Liouville volume (2 pi)^n sum_p (-f(p))^n/(n! prod w).
double total_volume(const HamiltonianS1Model& m);

/// Pushforward density rho(x) = (2 pi)^n sum_p (x - f(p))_+^{n-1} /
/// ((n-1)! prod w), assembled into an explicit piecewise polynomial with
/// breakpoints at the critical values.
PiecewisePoly dh_density(const HamiltonianS1Model& m);

/// Convex polygon slice oracle (n = 2): the density at x is (2 pi)^2 times the
/// length of the segment {u in polytope : <u, xi> = x}.
struct Polygon {
    std::vector<std::array<double, 2>> vertices;  // any order; must be convex
};

std::vector<double> toric_slice_density(const Polygon& poly, const std::array<long long, 2>& xi,
                                        const std::vector<double>& xs);

/// Derives the fixed-point model of a polygon: vertices give critical values
/// <v, xi>, primitive edge generators pair with xi to give the weights.
/// Requires integer vertices and xi generic (distinct values at vertices).
HamiltonianS1Model model_from_polygon(const Polygon& poly, const std::array<long long, 2>& xi,
                                      const std::string& label);

/// Product of two models: values add, weights concatenate.
HamiltonianS1Model product_model(const HamiltonianS1Model& a, const HamiltonianS1Model& b,
                                 const std::string& label);

/// Area-uniform Monte Carlo histogram of the height function on the unit
/// sphere, scaled by the total area 4 pi.  Samples are drawn in fixed chunks
/// with one RNG substream per chunk, so serial and parallel runs agree
/// bit-exactly.
struct SphereHistogram {
    int bins = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string rng_id;                  // algorithm identifier
    std::vector<long long> counts;       // raw per-bin counts
    std::vector<double> density;         // 4 pi * count / (samples * bin width)
    double bin_lo = -1.0, bin_hi = 1.0;

    double bin_center(int i) const;
};

SphereHistogram mc_sphere_pushforward(std::uint64_t samples, std::uint64_t seed, int bins,
                                      par::Exec ex = par::Exec::parallel);

/// Localization identity check: the fixed-point sum against the exact Laplace
/// transform of the density, plus optional oracle comparisons.
struct VerifyReport {
    struct Entry {
        double t = 0.0;
        double localization = 0.0;
        double transform = 0.0;
        double rel_error = 0.0;
    };
    std::vector<Entry> per_t;
    double max_internal_rel_error = 0.0;
    double max_mc_rel_error = -1.0;     // per-bin density comparison; -1 if not run
    double max_toric_abs_error = -1.0;  // pointwise density comparison; -1 if not run
};

struct VerifyOptions {
    const SphereHistogram* mc = nullptr;          // compare density per bin
    const Polygon* polygon = nullptr;             // compare against slice oracle
    std::array<long long, 2> xi = {0, 0};
    int toric_grid = 1000;
};

VerifyReport verify_identity(const HamiltonianS1Model& m, const std::vector<double>& t_grid,
                             const VerifyOptions& opt = {});

/// Model file JSON: {"halfdim": n, "label": s,
///                   "points": [{"value": f, "weights": [w1..wn]}]}.
HamiltonianS1Model load_model(const std::string& path);
void save_model(const HamiltonianS1Model& m, const std::string& path);

}  // namespace symgeo::dh
