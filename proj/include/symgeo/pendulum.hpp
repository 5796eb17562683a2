#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "symgeo/parallel.hpp"

namespace symgeo::pendulum {

// Spherical pendulum with unit mass, length and gravity: H = |p|^2/2 + z on
// T*S^2.  The reduced vertical motion satisfies zdot^2 = P(z) with
// P(z) = 2(h - z)(1 - z^2) - l^2.

struct EnergyMomentum {
    double h = 0.0;  // energy
    double l = 0.0;  // angular momentum about the vertical axis
};

/// The oscillation interval [z_minus, z_plus] of the reduced motion plus the
/// third cubic root z_third >= z_plus; P > 0 strictly between the first two.
struct TurningPoints {
    double z_minus = 0.0;
    double z_plus = 0.0;
    double z_third = 0.0;
};

/// Roots polished to 1e-12; throws std::domain_error naming the failed
/// condition for non-regular values (focus-focus point, relative equilibria,
/// energies below the minimum, values within 1e-8 of the critical boundary).
TurningPoints turning_points(const EnergyMomentum& v);

/// True iff turning_points accepts the value.
bool is_regular(const EnergyMomentum& v);

struct Periods {
    double T = 0.0;      // period of the reduced z-oscillation
    double Theta = 0.0;  // azimuth advance over one oscillation (0 when l = 0)
};

/// T = 2 int dz/sqrt(P), Theta = 2 l int dz/((1-z^2) sqrt(P)) over [z-,z+],
/// Gauss-Legendre after the substitution z = z- + (z+ - z-) sin^2 theta.
Periods periods(const EnergyMomentum& v, int nodes = 200);

/// Action J = (1/pi) int sqrt(P)/(1-z^2) dz; same substitution and rule.
double action(const EnergyMomentum& v, int nodes = 200);

/// Direct integration of Hamilton's equations on T*S^2 (RK4 with constraint
/// projection, default step 1e-4): first return of z to z_plus gives T, the
/// accumulated azimuth gives Theta (reported in (-2pi, 2pi)).
struct FlowResult {
    double T = 0.0;
    double Theta = 0.0;
    double energy_drift = 0.0;  // max |H - H0| along the trajectory
};

FlowResult flow_periods_oracle(const EnergyMomentum& v, double dt = 1e-4);

/// Basis of the period lattice at a regular value: the joint flow times
/// (t_H, t_L) that act trivially on the torus fiber are the integer span of
/// u1 = (0, 2pi) (a full rotation) and u2 = (T, -Theta) (first return of the
/// reduced motion with the azimuth advance compensated).
struct PeriodLattice {
    EnergyMomentum basepoint;
    double T = 0.0;
    double Theta = 0.0;

    std::array<double, 2> u1() const { return {0.0, 2.0 * std::numbers::pi}; }
    std::array<double, 2> u2() const { return {T, -Theta}; }
};

/// Throws for non-regular basepoints; the returned basis has T > 0 and is
/// linearly independent by construction.
PeriodLattice period_lattice(const EnergyMomentum& v, int nodes = 200);

/// Integer 2x2 matrix with the few operations the lattice bookkeeping needs.
struct IntMat2 {
    long long m[2][2] = {{1, 0}, {0, 1}};

    static IntMat2 identity() { return IntMat2{}; }
    long long det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    long long trace() const { return m[0][0] + m[1][1]; }
    bool operator==(const IntMat2& o) const;
    IntMat2 operator*(const IntMat2& o) const;
    /// (M^T)^{-1}; requires det = +-1.
    IntMat2 transpose_inverse() const;
    bool is_identity() const { return *this == identity(); }
};

/// True when the matrix is GL(2,Z)-conjugate to [[1,1],[0,1]] (det 1, trace 2,
/// not the identity, primitive unipotent part).
bool conjugate_to_standard_shear(const IntMat2& a);

struct Loop {
    double center_h = 1.0;
    double center_l = 0.0;
    double radius = 0.5;
    int steps = 256;
    bool reverse = false;  // traverse clockwise instead
    int turns = 1;
};

/// One sample of the period-lattice continuation along the loop.
struct LoopSample {
    double h = 0.0, l = 0.0;
    double T = 0.0;
    double theta_branch = 0.0;  // continuously tracked azimuth branch
    double defect = 0.0;        // lattice matching defect, in cell units
};

/// Holonomy of the period lattice along the loop.  The basis at each point is
/// u1 = (0, 2pi) (rotation period) and u2 = (T, -Theta); Theta is continued by
/// nearest lattice match.  matrix expresses the final basis in the initial one
/// (columns = coordinates of the transported u1, u2).
struct MonodromyResult {
    IntMat2 matrix;
    Loop loop;
    double max_defect = 0.0;
    std::vector<LoopSample> trace;
};

/// Throws std::domain_error if a loop point is not regular, K < 64, or the
/// matching defect reaches 0.25 ("loop too coarse").
MonodromyResult monodromy(const Loop& loop, par::Exec ex = par::Exec::parallel);

struct Window {
    double h_min = 0.0, h_max = 0.0;
    double l_min = 0.0, l_max = 0.0;
};

/// Joint spectrum point: l = hbar m and J(h, l) = hbar (n + 1/2).
struct SpectrumPoint {
    double h = 0.0, l = 0.0;
    long long n = 0, m = 0;
};

struct JointSpectrum {
    double hbar = 0.0;
    Window window;
    std::vector<SpectrumPoint> points;
};

/// Solves the two quantization conditions on every admissible (n, m) line by
/// bisection in h; each returned point satisfies |J - hbar(n+1/2)| <= 1e-8.
JointSpectrum joint_spectrum(double hbar, const Window& window, par::Exec ex = par::Exec::parallel);

/// Transports an elementary spectrum cell around the loop by nearest-neighbor
/// matching.  The returned matrix has columns = label coordinates (dm, dn) of
/// the transported m-step and n-step; label order (m, n) pairs with the
/// classical basis (u1, u2).  Throws "hbar too large" when a match is
/// ambiguous (defect >= 0.3 cells).
struct CellTransportResult {
    IntMat2 matrix;
    double max_defect = 0.0;
};

CellTransportResult cell_transport(const JointSpectrum& spec, const Loop& loop);

}  // namespace symgeo::pendulum
