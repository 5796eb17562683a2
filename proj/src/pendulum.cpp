#include "symgeo/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "symgeo/quadrature.hpp"

namespace symgeo::pendulum {

namespace {

constexpr double kBoundaryTol = 1e-8;  // rejection margin around critical values
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cubic(const EnergyMomentum& v, double z) {
    return 2.0 * (v.h - z) * (1.0 - z * z) - v.l * v.l;
}

double cubic_deriv(const EnergyMomentum& v, double z) {
    return 6.0 * z * z - 4.0 * v.h * z - 2.0;
}

// Bisection bracket [a,b] with P(a) <= 0 <= P(b) or vice versa, polished by
// Newton.  Assumes a sign change.
double refine_root(const EnergyMomentum& v, double a, double b) {
    double fa = cubic(v, a);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = cubic(v, mid);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a < 1e-14) break;
    }
    double z = 0.5 * (a + b);
    for (int it = 0; it < 6; ++it) {
        const double dp = cubic_deriv(v, z);
        if (dp == 0.0) break;
        const double step = cubic(v, z) / dp;
        z -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return std::clamp(z, std::min(a, b) - 1e-12, std::max(a, b) + 1e-12);
}

[[noreturn]] void reject(const EnergyMomentum& v, const std::string& why) {
    std::ostringstream os;
    os << "(h=" << v.h << ", l=" << v.l << ") is not a regular value: " << why;
    throw std::domain_error(os.str());
}

}  // namespace

TurningPoints turning_points(const EnergyMomentum& v) {
    if (!std::isfinite(v.h) || !std::isfinite(v.l)) reject(v, "non-finite input");
    if (v.l == 0.0 && std::abs(v.h - 1.0) <= kBoundaryTol)
        reject(v, "the focus-focus critical value (1, 0)");

    if (v.l == 0.0) {
        // P factors exactly: roots are -1, h, 1.
        if (v.h <= -1.0 + kBoundaryTol)
            reject(v, "energy at or below the stable equilibrium h = -1");
        if (v.h < 1.0) return {-1.0, v.h, 1.0};
        return {-1.0, 1.0, v.h};
    }

    // Local max of P sits at the left root of P'; P(z*) > 0 is required for an
    // oscillation interval.  P(z*) / (dP/dh) is the h-distance to the
    // relative-equilibrium boundary, the rejection margin of the contract.
    const double disc = std::sqrt(v.h * v.h + 3.0);
    const double z_lo = (v.h - disc) / 3.0;  // local max of P
    const double z_hi = (v.h + disc) / 3.0;  // local min of P
    const double peak = cubic(v, z_lo);
    if (z_lo <= -1.0 || z_lo >= 1.0) reject(v, "oscillation maximum outside the sphere range");
    const double boundary_dist = peak / (2.0 * (1.0 - z_lo * z_lo));
    if (boundary_dist <= -kBoundaryTol)
        reject(v, "no oscillation interval (energy below the relative equilibrium)");
    if (boundary_dist <= kBoundaryTol)
        reject(v, "within 1e-8 of the relative-equilibrium boundary curve");

    const double z_minus = refine_root(v, -1.0, z_lo);
    const double right = std::min(1.0, z_hi);
    const double z_plus = refine_root(v, z_lo, right);
    // Third root: expand right until the sign flips back.
    double a3 = std::max(1.0, z_hi), b3 = a3 + 1.0;
    while (cubic(v, b3) <= 0.0) b3 += 1.0;
    const double z_third = cubic(v, a3) >= 0.0 ? a3 : refine_root(v, a3, b3);

    if (z_third - z_plus <= kBoundaryTol)
        reject(v, "within 1e-8 of the critical boundary (z+ touches the third root)");
    return {z_minus, z_plus, z_third};
}

bool is_regular(const EnergyMomentum& v) {
    try {
        turning_points(v);
        return true;
    } catch (const std::domain_error&) {
        return false;
    }
}

namespace {

// After z = z- + w sin^2(theta), w = z+ - z-, the three integrands lose their
// endpoint square-root singularities:
//   T     = 2 sqrt(2) int_0^{pi/2} dtheta / sqrt(z3 - z)
//   Theta = 2 sqrt(2) l int_0^{pi/2} dtheta / ((1-z^2) sqrt(z3 - z))
//   J     = (sqrt(2) w^2 / 2 pi) int_0^{pi/2} sin^2(2 theta) sqrt(z3-z)/(1-z^2) dtheta
// (1 - z^2) is evaluated factored: (1+z) = (1+z-) + w sin^2 and
// (1-z) = (1-z+) + w cos^2 cancel exactly when a turning point sits on a pole.
struct SubstitutedIntegrands {
    TurningPoints tp;
    double w;

    double z_at(double theta) const {
        const double s = std::sin(theta);
        return tp.z_minus + w * s * s;
    }
    double one_plus_z(double theta) const {
        const double s = std::sin(theta);
        return (1.0 + tp.z_minus) + w * s * s;
    }
    double one_minus_z(double theta) const {
        const double c = std::cos(theta);
        return (1.0 - tp.z_plus) + w * c * c;
    }
};

}  // namespace

Periods periods(const EnergyMomentum& v, int nodes) {
    const TurningPoints tp = turning_points(v);
    const SubstitutedIntegrands sub{tp, tp.z_plus - tp.z_minus};
    const double half_pi = 0.5 * std::numbers::pi;
    const double sqrt2 = std::numbers::sqrt2;

    const double T = 2.0 * sqrt2 *
                     num::integrate_gl([&](double th) { return 1.0 / std::sqrt(tp.z_third - sub.z_at(th)); },
                                       0.0, half_pi, nodes);
    double theta = 0.0;
    if (v.l != 0.0) {
        theta = 2.0 * sqrt2 * v.l *
                num::integrate_gl(
                    [&](double th) {
                        return 1.0 / (sub.one_minus_z(th) * sub.one_plus_z(th) *
                                      std::sqrt(tp.z_third - sub.z_at(th)));
                    },
                    0.0, half_pi, nodes);
    }
    return {T, theta};
}

double action(const EnergyMomentum& v, int nodes) {
    const TurningPoints tp = turning_points(v);
    const double w = tp.z_plus - tp.z_minus;
    const SubstitutedIntegrands sub{tp, w};
    const double half_pi = 0.5 * std::numbers::pi;
    return (std::numbers::sqrt2 * w * w / kTwoPi) *
           num::integrate_gl(
               [&](double th) {
                   const double s2 = std::sin(2.0 * th);
                   return s2 * s2 * std::sqrt(tp.z_third - sub.z_at(th)) /
                          (sub.one_minus_z(th) * sub.one_plus_z(th));
               },
               0.0, half_pi, nodes);
}

namespace {

struct SphereState {
    double q[3];
    double v[3];
};

void sphere_acc(const SphereState& s, double a[3]) {
    const double v2 = s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2];
    const double lam = s.q[2] - v2;  // keeps |q| = 1, q.v = 0
    a[0] = lam * s.q[0];
    a[1] = lam * s.q[1];
    a[2] = -1.0 + lam * s.q[2];
}

SphereState rk4_step(const SphereState& s, double dt) {
    auto axpy = [](const SphereState& base, double c, const double dq[3], const double dv[3]) {
        SphereState r;
        for (int i = 0; i < 3; ++i) {
            r.q[i] = base.q[i] + c * dq[i];
            r.v[i] = base.v[i] + c * dv[i];
        }
        return r;
    };
    double a1[3], a2[3], a3[3], a4[3];
    sphere_acc(s, a1);
    SphereState s2 = axpy(s, 0.5 * dt, s.v, a1);
    sphere_acc(s2, a2);
    double v2q[3] = {s.v[0] + 0.5 * dt * a1[0], s.v[1] + 0.5 * dt * a1[1], s.v[2] + 0.5 * dt * a1[2]};
    SphereState s3 = axpy(s, 0.5 * dt, v2q, a2);
    sphere_acc(s3, a3);
    double v3q[3] = {s.v[0] + 0.5 * dt * a2[0], s.v[1] + 0.5 * dt * a2[1], s.v[2] + 0.5 * dt * a2[2]};
    SphereState s4 = axpy(s, dt, v3q, a3);
    sphere_acc(s4, a4);

    SphereState out;
    for (int i = 0; i < 3; ++i) {
        const double k1q = s.v[i], k2q = v2q[i], k3q = v3q[i], k4q = s.v[i] + dt * a3[i];
        out.q[i] = s.q[i] + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        out.v[i] = s.v[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
    }
    // Project back to the constraint manifold.
    const double norm = std::sqrt(out.q[0] * out.q[0] + out.q[1] * out.q[1] + out.q[2] * out.q[2]);
    for (double& qi : out.q) qi /= norm;
    const double qv = out.q[0] * out.v[0] + out.q[1] * out.v[1] + out.q[2] * out.v[2];
    for (int i = 0; i < 3; ++i) out.v[i] -= qv * out.q[i];
    return out;
}

double energy(const SphereState& s) {
    return 0.5 * (s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]) + s.q[2];
}

double azimuth_increment(const SphereState& a, const SphereState& b) {
    const double cross = a.q[0] * b.q[1] - a.q[1] * b.q[0];
    const double dot = a.q[0] * b.q[0] + a.q[1] * b.q[1];
    if (cross == 0.0 && dot == 0.0) return 0.0;
    return std::atan2(cross, dot);
}

}  // namespace

FlowResult flow_periods_oracle(const EnergyMomentum& v, double dt) {
    const TurningPoints tp = turning_points(v);
    const double rho2 = (1.0 - tp.z_plus) * (1.0 + tp.z_plus);
    if (rho2 <= 0.0)
        throw std::domain_error("flow_periods_oracle: turning point on the pole axis (use l != 0)");
    const double rho = std::sqrt(rho2);

    // Start at the upper turning point, velocity purely azimuthal.
    SphereState s;
    s.q[0] = rho;
    s.q[1] = 0.0;
    s.q[2] = tp.z_plus;
    s.v[0] = 0.0;
    s.v[1] = v.l / rho;
    s.v[2] = 0.0;

    const double e0 = energy(s);
    double drift = 0.0, phi = 0.0, t = 0.0;
    long long steps = 0;
    const double t_limit = 100.0;

    while (t < t_limit) {
        const SphereState prev = s;
        s = rk4_step(s, dt);
        t += dt;
        ++steps;
        const double dphi_full = azimuth_increment(prev, s);
        phi += dphi_full;
        drift = std::max(drift, std::abs(energy(s) - e0));
        // First return: vz crosses zero downward after leaving the start.
        if (steps > 8 && prev.v[2] > 0.0 && s.v[2] <= 0.0) {
            // Newton refinement on vz using dense mini-steps from prev; the
            // azimuth of the overshooting full step is re-accumulated there.
            phi -= dphi_full;
            double t_lo = t - dt;
            SphereState cur = prev;
            double remaining = dt;
            for (int it = 0; it < 4; ++it) {
                double a[3];
                sphere_acc(cur, a);
                double step = -cur.v[2] / a[2];
                step = std::clamp(step, 0.0, remaining);
                if (it == 0 && (a[2] == 0.0 || !std::isfinite(step))) step = 0.5 * remaining;
                const SphereState nxt = rk4_step(cur, step);
                phi += azimuth_increment(cur, nxt);
                cur = nxt;
                t_lo += step;
                remaining -= step;
                if (std::abs(cur.v[2]) < 1e-13) break;
            }
            double theta = phi;
            while (theta >= kTwoPi) theta -= kTwoPi;
            while (theta <= -kTwoPi) theta += kTwoPi;
            return {t_lo, theta, drift};
        }
    }
    throw std::runtime_error("flow_periods_oracle: no return detected within 100 time units");
}

PeriodLattice period_lattice(const EnergyMomentum& v, int nodes) {
    const Periods p = periods(v, nodes);
    return {v, p.T, p.Theta};
}

bool IntMat2::operator==(const IntMat2& o) const {
    return m[0][0] == o.m[0][0] && m[0][1] == o.m[0][1] && m[1][0] == o.m[1][0] && m[1][1] == o.m[1][1];
}

IntMat2 IntMat2::operator*(const IntMat2& o) const {
    IntMat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    return r;
}

IntMat2 IntMat2::transpose_inverse() const {
    const long long d = det();
    if (d != 1 && d != -1) throw std::invalid_argument("IntMat2: determinant must be +-1");
    // inverse = adj/det, then transpose
    IntMat2 r;
    r.m[0][0] = m[1][1] / d;
    r.m[1][0] = -m[0][1] / d;
    r.m[0][1] = -m[1][0] / d;
    r.m[1][1] = m[0][0] / d;
    return r;
}

bool conjugate_to_standard_shear(const IntMat2& a) {
    if (a.det() != 1 || a.trace() != 2 || a.is_identity()) return false;
    // Unipotent with (A - I) primitive: gcd of the entries is 1.
    const long long n00 = a.m[0][0] - 1, n11 = a.m[1][1] - 1;
    long long g = 0;
    for (long long x : {n00, a.m[0][1], a.m[1][0], n11}) g = std::gcd(g, std::abs(x));
    return g == 1;
}

namespace {

// Adaptive node-doubling for one loop point; loop points close to l = 0 have
// a boundary layer that needs a denser rule.
Periods periods_converged(const EnergyMomentum& v, double rel_tol = 1e-11) {
    int nodes = 200;
    Periods p = periods(v, nodes);
    for (int round = 0; round < 3; ++round) {
        const Periods q = periods(v, 2 * nodes);
        const double scale = std::max({1.0, std::abs(q.T), std::abs(q.Theta)});
        if (std::abs(q.T - p.T) <= rel_tol * scale && std::abs(q.Theta - p.Theta) <= rel_tol * scale)
            return q;
        p = q;
        nodes *= 2;
    }
    return p;
}

}  // namespace

MonodromyResult monodromy(const Loop& loop, par::Exec ex) {
    if (loop.steps < 64) throw std::domain_error("monodromy: need at least 64 loop steps");
    if (loop.turns < 1) throw std::domain_error("monodromy: turns must be positive");
    const int K = loop.steps, total = K * loop.turns;

    // Loop samples are offset by half a step so l = 0 is never hit exactly.
    std::vector<EnergyMomentum> pts(total + 1);
    for (int k = 0; k <= total; ++k) {
        double ang = kTwoPi * (k + 0.5) / K;
        if (loop.reverse) ang = -ang;
        pts[k] = {loop.center_h + loop.radius * std::cos(ang),
                  loop.center_l + loop.radius * std::sin(ang)};
    }

    // The (T, Theta) data per point is independent; only the branch tracking
    // below is sequential.
    std::vector<Periods> raw(total + 1);
    std::vector<int> bad(total + 1, -1);
    par::for_chunks(static_cast<std::size_t>(total + 1), 16, ex,
                    [&](std::size_t b, std::size_t e, std::size_t) {
                        for (std::size_t k = b; k < e; ++k) {
                            try {
                                raw[k] = periods_converged(pts[k]);
                            } catch (const std::domain_error&) {
                                bad[k] = static_cast<int>(k);
                            }
                        }
                    });
    for (int k = 0; k <= total; ++k)
        if (bad[k] >= 0) {
            std::ostringstream os;
            os << "monodromy: loop point " << k << " (h=" << pts[k].h << ", l=" << pts[k].l
               << ") is not a regular value";
            throw std::domain_error(os.str());
        }

    MonodromyResult res;
    res.loop = loop;
    res.trace.reserve(total + 1);

    double branch = raw[0].Theta;
    double T_prev = raw[0].T;
    const double branch0 = branch;
    res.trace.push_back({pts[0].h, pts[0].l, raw[0].T, branch, 0.0});

    for (int k = 1; k <= total; ++k) {
        // Match (T, -Theta) to the previous basis modulo the rotation vector
        // u1 = (0, 2pi): choose the integer recombination closest to the
        // previous branch.
        const double theta_prin = raw[k].Theta;
        const double mm = std::round((theta_prin - branch) / kTwoPi);
        const double theta_new = theta_prin - kTwoPi * mm;
        // Defect in cell units: coordinates of the mismatch in the basis
        // {(0,2pi), (T,-Theta)}.
        const double c2 = (raw[k].T - T_prev) / T_prev;
        const double c1 = (-(theta_new - branch) + branch * c2) / kTwoPi;
        const double defect = std::max(std::abs(c1), std::abs(c2));
        if (defect >= 0.25) {
            std::ostringstream os;
            os << "monodromy: loop too coarse at step " << k << " (matching defect " << defect << ")";
            throw std::domain_error(os.str());
        }
        res.max_defect = std::max(res.max_defect, defect);
        branch = theta_new;
        T_prev = raw[k].T;
        res.trace.push_back({pts[k].h, pts[k].l, raw[k].T, branch, defect});
    }

    // After the loop u2 -> u2 + w*u1 where -2 pi w is the net branch change.
    const double w_real = (branch0 - branch) / kTwoPi;
    const long long w = std::llround(w_real);
    if (std::abs(w_real - w) > 0.25)
        throw std::domain_error("monodromy: branch winding did not close to an integer");
    res.matrix = IntMat2::identity();
    res.matrix.m[0][1] = w;
    return res;
}

namespace {

// J is evaluated on the l = 0 line when solving the m = 0 quantization
// condition; midpoints that land within the rejection margin of the
// focus-focus value are nudged deterministically.
double action_guarded(double h, double l) {
    if (l == 0.0 && std::abs(h - 1.0) <= 2e-8) h = 1.0 + (h >= 1.0 ? 1.0 : -1.0) * (2e-8 + 1e-7);
    return action({h, l});
}

}  // namespace

JointSpectrum joint_spectrum(double hbar, const Window& window, par::Exec ex) {
    if (hbar <= 0.0) throw std::invalid_argument("joint_spectrum: hbar must be positive");
    if (window.h_min >= window.h_max || window.l_min >= window.l_max)
        throw std::invalid_argument("joint_spectrum: empty window");

    JointSpectrum spec;
    spec.hbar = hbar;
    spec.window = window;

    const long long m_lo = static_cast<long long>(std::ceil(window.l_min / hbar - 1e-12));
    const long long m_hi = static_cast<long long>(std::floor(window.l_max / hbar + 1e-12));
    if (m_lo > m_hi) throw std::invalid_argument("joint_spectrum: window contains no l-line");

    struct Task {
        long long n, m;
        double l;
    };
    std::vector<Task> tasks;
    for (long long m = m_lo; m <= m_hi; ++m) {
        const double l = hbar * static_cast<double>(m);
        const double j_lo = action_guarded(window.h_min, l);
        const double j_hi = action_guarded(window.h_max, l);
        const long long n_min = static_cast<long long>(std::ceil(j_lo / hbar - 0.5 - 1e-12));
        const long long n_max = static_cast<long long>(std::floor(j_hi / hbar - 0.5 + 1e-12));
        for (long long n = n_min; n <= n_max; ++n) tasks.push_back({n, m, l});
    }

    std::vector<SpectrumPoint> pts(tasks.size());
    par::for_chunks(tasks.size(), 8, ex, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            const Task& tk = tasks[i];
            const double target = hbar * (static_cast<double>(tk.n) + 0.5);
            double a = window.h_min, b2 = window.h_max;
            for (int it = 0; it < 64; ++it) {
                const double mid = 0.5 * (a + b2);
                if (action_guarded(mid, tk.l) < target)
                    a = mid;
                else
                    b2 = mid;
            }
            pts[i] = {0.5 * (a + b2), tk.l, tk.n, tk.m};
        }
    });
    spec.points = std::move(pts);
    return spec;
}

namespace {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }

std::size_t nearest_point(const std::vector<SpectrumPoint>& pts, const Vec2& x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = pts[i].h - x.x, dy = pts[i].l - x.y;
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// Coordinates of d in the basis (b1, b2).
Vec2 solve_basis(const Vec2& b1, const Vec2& b2, const Vec2& d) {
    const double det = b1.x * b2.y - b1.y * b2.x;
    return {(d.x * b2.y - d.y * b2.x) / det, (b1.x * d.y - b1.y * d.x) / det};
}

double off_integer(const Vec2& c, double i0, double i1) {
    return std::max(std::abs(c.x - i0), std::abs(c.y - i1));
}

}  // namespace

CellTransportResult cell_transport(const JointSpectrum& spec, const Loop& loop) {
    if (spec.points.size() < 8) throw std::invalid_argument("cell_transport: spectrum too sparse");
    const int K = loop.steps, total = K * loop.turns;

    auto pos = [&](const SpectrumPoint& p) { return Vec2{p.h, p.l}; };
    auto find_label = [&](long long n, long long m) -> std::size_t {
        for (std::size_t i = 0; i < spec.points.size(); ++i)
            if (spec.points[i].n == n && spec.points[i].m == m) return i;
        throw std::domain_error(
            "cell_transport: hbar too large or window too small (the anchor lacks its "
            "(n+1,m)/(n,m+1) neighbors)");
    };

    double ang0 = kTwoPi * 0.5 / K;
    if (loop.reverse) ang0 = -ang0;
    const Vec2 x0{loop.center_h + loop.radius * std::cos(ang0),
                  loop.center_l + loop.radius * std::sin(ang0)};

    std::size_t ia = nearest_point(spec.points, x0);
    std::size_t iu = find_label(spec.points[ia].n + 1, spec.points[ia].m);  // n-step
    std::size_t iv = find_label(spec.points[ia].n, spec.points[ia].m + 1);  // m-step
    Vec2 b1 = pos(spec.points[iu]) - pos(spec.points[ia]);
    Vec2 b2 = pos(spec.points[iv]) - pos(spec.points[ia]);

    CellTransportResult res;
    long long dn_n = 1, dm_n = 0;  // label delta of the transported n-step
    long long dn_m = 0, dm_m = 1;  // label delta of the transported m-step

    for (int k = 1; k <= total; ++k) {
        double ang = kTwoPi * (k + 0.5) / K;
        if (loop.reverse) ang = -ang;
        const Vec2 x{loop.center_h + loop.radius * std::cos(ang),
                     loop.center_l + loop.radius * std::sin(ang)};
        const std::size_t ja = nearest_point(spec.points, x);
        const Vec2 move = solve_basis(b1, b2, pos(spec.points[ja]) - pos(spec.points[ia]));
        double defect = off_integer(move, std::round(move.x), std::round(move.y));

        const std::size_t ju = nearest_point(spec.points, pos(spec.points[ja]) + b1);
        const std::size_t jv = nearest_point(spec.points, pos(spec.points[ja]) + b2);
        const Vec2 cu = solve_basis(b1, b2, pos(spec.points[ju]) - pos(spec.points[ja]));
        const Vec2 cv = solve_basis(b1, b2, pos(spec.points[jv]) - pos(spec.points[ja]));
        defect = std::max({defect, off_integer(cu, 1.0, 0.0), off_integer(cv, 0.0, 1.0)});
        if (defect >= 0.3) {
            std::ostringstream os;
            os << "cell_transport: hbar too large for this loop (matching defect " << defect
               << " at step " << k << ")";
            throw std::domain_error(os.str());
        }
        res.max_defect = std::max(res.max_defect, defect);

        dn_n = spec.points[ju].n - spec.points[ja].n;
        dm_n = spec.points[ju].m - spec.points[ja].m;
        dn_m = spec.points[jv].n - spec.points[ja].n;
        dm_m = spec.points[jv].m - spec.points[ja].m;

        ia = ja;
        b1 = pos(spec.points[ju]) - pos(spec.points[ja]);
        b2 = pos(spec.points[jv]) - pos(spec.points[ja]);
    }

    // Columns are the transported m-step and n-step in label coordinates
    // ordered (m, n), pairing with the classical basis (u1, u2).
    res.matrix.m[0][0] = dm_m;
    res.matrix.m[1][0] = dn_m;
    res.matrix.m[0][1] = dm_n;
    res.matrix.m[1][1] = dn_n;
    return res;
}

}  // namespace symgeo::pendulum
