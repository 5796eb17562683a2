#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "symgeo/pendulum.hpp"
#include "test_support.hpp"

using namespace symgeo::pendulum;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent root oracle for P(z) = 2 z^3 - 2 h z^2 - 2 z + 2 h - l^2.
std::vector<double> oracle_roots(double h, double l) {
    return testsup::cubic_roots(2.0, -2.0 * h, -2.0, 2.0 * h - l * l);
}

}  // namespace

TEST_CASE("turning points against the closed-form cubic oracle") {
    SUBCASE("(0, 0): planar swing through the south pole") {
        const TurningPoints tp = turning_points({0.0, 0.0});
        CHECK(tp.z_minus == -1.0);
        CHECK(tp.z_plus == 0.0);
        CHECK(tp.z_third == 1.0);
    }
    SUBCASE("(1.5, 0.1): both roots interior, P > 0 between") {
        const EnergyMomentum v{1.5, 0.1};
        const TurningPoints tp = turning_points(v);
        const std::vector<double> roots = oracle_roots(v.h, v.l);
        REQUIRE(roots.size() == 3);
        CHECK(tp.z_minus == doctest::Approx(roots[0]).epsilon(1e-12));
        CHECK(tp.z_plus == doctest::Approx(roots[1]).epsilon(1e-12));
        CHECK(tp.z_third == doctest::Approx(roots[2]).epsilon(1e-12));
        CHECK(tp.z_minus > -1.0);
        CHECK(tp.z_plus < 1.0);
        const double mid = 0.5 * (tp.z_minus + tp.z_plus);
        CHECK(2.0 * (v.h - mid) * (1.0 - mid * mid) - v.l * v.l > 0.0);
    }
    SUBCASE("(0.3, 0.4) matches the oracle to 1e-12") {
        const std::vector<double> roots = oracle_roots(0.3, 0.4);
        const TurningPoints tp = turning_points({0.3, 0.4});
        CHECK(tp.z_minus == doctest::Approx(roots[0]).epsilon(1e-12));
        CHECK(tp.z_plus == doctest::Approx(roots[1]).epsilon(1e-12));
    }
}

TEST_CASE("non-regular values are rejected with the failing condition") {
    CHECK_THROWS_WITH_AS(turning_points({1.0, 0.0}), doctest::Contains("focus-focus"),
                         std::domain_error);
    CHECK_THROWS_WITH_AS(turning_points({-1.0, 0.0}), doctest::Contains("equilibrium"),
                         std::domain_error);
    // below the relative-equilibrium branch at this angular momentum
    CHECK_THROWS_WITH_AS(turning_points({-0.9, 0.5}), doctest::Contains("below"), std::domain_error);
    // exactly on the relative-equilibrium curve: z_c = -0.5 gives
    // l^2 = -(1 - z^2)^2 / z = 1.125 and h = (3 z^2 - 1)/(2 z) = 0.25
    CHECK_THROWS_AS(turning_points({0.25, std::sqrt(1.125)}), std::domain_error);
    CHECK(is_regular({0.3, 0.4}));
    CHECK(!is_regular({1.0, 0.0}));
}

TEST_CASE("periods: symmetry and special values") {
    SUBCASE("Theta vanishes identically at l = 0") {
        for (double h : {-0.5, 0.0, 0.5, 1.5}) {
            const Periods p = periods({h, 0.0});
            CHECK(p.Theta == 0.0);
            CHECK(p.T > 0.0);
        }
    }
    SUBCASE("T is even and Theta odd in l") {
        const Periods plus = periods({0.8, 0.3});
        const Periods minus = periods({0.8, -0.3});
        CHECK(plus.T == doctest::Approx(minus.T).epsilon(1e-14));
        CHECK(plus.Theta == doctest::Approx(-minus.Theta).epsilon(1e-14));
    }
    SUBCASE("node doubling changes nothing at interior values") {
        for (const EnergyMomentum v : {EnergyMomentum{0.3, 0.4}, {1.2, 0.6}, {0.0, 0.2}}) {
            const Periods a = periods(v, 200), b = periods(v, 400);
            CHECK(std::abs(a.T - b.T) / b.T <= 1e-9);
            if (v.l != 0.0) CHECK(std::abs(a.Theta - b.Theta) / std::abs(b.Theta) <= 1e-9);
            const double Ja = action(v, 200), Jb = action(v, 400);
            CHECK(std::abs(Ja - Jb) / Jb <= 1e-9);
        }
    }
}

TEST_CASE("quadrature periods agree with the Hamiltonian flow oracle") {
    SUBCASE("(0, 0): T only (the orbit passes through the pole)") {
        const Periods p = periods({0.0, 0.0});
        const FlowResult f = flow_periods_oracle({0.0, 0.0});
        CHECK(std::abs(p.T - f.T) / p.T <= 1e-6);
        CHECK(f.energy_drift <= 1e-8);
    }
    SUBCASE("(0.3, 0.4): T and Theta") {
        const Periods p = periods({0.3, 0.4});
        const FlowResult f = flow_periods_oracle({0.3, 0.4});
        CHECK(std::abs(p.T - f.T) / p.T <= 1e-6);
        double dtheta = std::fmod(std::abs(p.Theta - f.Theta), 2.0 * kPi);
        dtheta = std::min(dtheta, 2.0 * kPi - dtheta);
        CHECK(dtheta <= 1e-5);
        CHECK(f.energy_drift <= 1e-8);
        CHECK(std::abs(f.Theta) < 2.0 * kPi);
    }
}

TEST_CASE("action-period duality: grad J = (T, -Theta) / 2 pi") {
    const double step = 1e-5;
    for (const EnergyMomentum v :
         {EnergyMomentum{0.3, 0.4}, {0.6, 0.3}, {0.9, 0.6}, {1.2, 0.45}, {1.5, 0.3},
          EnergyMomentum{0.3, -0.4}, {0.6, -0.3}, {0.9, -0.6}, {1.2, -0.45}, {1.5, -0.3}}) {
        CAPTURE(v.h);
        CAPTURE(v.l);
        const Periods p = periods(v, 400);
        const double dJdh = (action({v.h + step, v.l}, 400) - action({v.h - step, v.l}, 400)) / (2 * step);
        const double dJdl = (action({v.h, v.l + step}, 400) - action({v.h, v.l - step}, 400)) / (2 * step);
        CHECK(std::abs(dJdh - p.T / (2 * kPi)) / (p.T / (2 * kPi)) <= 1e-4);
        CHECK(std::abs(dJdl + p.Theta / (2 * kPi)) / std::abs(p.Theta / (2 * kPi)) <= 1e-4);
    }
    // J is even in l
    CHECK(action({0.7, 0.25}) == doctest::Approx(action({0.7, -0.25})).epsilon(1e-14));
}

TEST_CASE("period lattice basis") {
    const PeriodLattice lat = period_lattice({0.3, 0.4});
    CHECK(lat.T > 0.0);
    CHECK(lat.u1()[0] == 0.0);
    CHECK(lat.u1()[1] == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(lat.u2()[0] == doctest::Approx(3.8508672357374922).epsilon(1e-12));
    CHECK(lat.u2()[1] == doctest::Approx(-4.002370738148517).epsilon(1e-12));
    // linear independence: u1 x u2 != 0
    const double cross = lat.u1()[0] * lat.u2()[1] - lat.u1()[1] * lat.u2()[0];
    CHECK(std::abs(cross) > 1.0);
    CHECK_THROWS_AS(period_lattice({1.0, 0.0}), std::domain_error);
}

TEST_CASE("classical monodromy around the focus-focus value") {
    Loop loop;  // center (1,0), r = 0.5, K = 256
    loop.steps = 128;
    const MonodromyResult res = monodromy(loop);
    CHECK(res.matrix.det() == 1);
    CHECK(res.matrix.trace() == 2);
    CHECK(!res.matrix.is_identity());
    CHECK(conjugate_to_standard_shear(res.matrix));
    CHECK(std::abs(res.matrix.m[0][1]) == 1);
    CHECK(res.matrix.m[1][0] == 0);
    CHECK(res.max_defect < 0.25);
    CHECK(res.trace.size() == 129);

    SUBCASE("reverse loop gives the inverse matrix") {
        Loop rev = loop;
        rev.reverse = true;
        const MonodromyResult back = monodromy(rev);
        CHECK((res.matrix * back.matrix).is_identity());
    }

    SUBCASE("contractible loop gives the identity") {
        Loop small;
        small.center_h = 0.5;
        small.center_l = 0.3;
        small.radius = 0.1;
        small.steps = 64;
        CHECK(monodromy(small).matrix.is_identity());
    }

    SUBCASE("loop parameters below the floor are rejected") {
        Loop bad = loop;
        bad.steps = 32;
        CHECK_THROWS_WITH_AS(monodromy(bad), doctest::Contains("64"), std::domain_error);
    }

    SUBCASE("a loop through non-regular values names the offending point") {
        Loop off;
        off.center_h = -0.5;
        off.center_l = 0.0;
        off.radius = 0.7;  // dips below the minimum energy
        off.steps = 64;
        CHECK_THROWS_AS(monodromy(off), std::domain_error);
    }
}

TEST_CASE("monodromy cross-checked against the flow oracle at 8 loop points") {
    // The continuation uses quadrature periods; the flow oracle validates them
    // at a spread of loop angles.
    const double r = 0.5;
    for (int k = 0; k < 8; ++k) {
        const double ang = 2.0 * kPi * (k + 0.5) / 8.0;
        const EnergyMomentum v{1.0 + r * std::cos(ang), r * std::sin(ang)};
        const Periods p = periods(v, 400);
        const FlowResult f = flow_periods_oracle(v);
        CHECK(std::abs(p.T - f.T) / p.T <= 1e-5);
        double dtheta = std::fmod(std::abs(p.Theta - f.Theta), 2.0 * kPi);
        dtheta = std::min(dtheta, 2.0 * kPi - dtheta);
        CHECK(dtheta <= 1e-5);
    }
}

TEST_CASE("joint spectrum") {
    const double hbar = 0.1;
    const Window window{0.3, 1.7, -0.75, 0.75};
    const JointSpectrum spec = joint_spectrum(hbar, window);
    REQUIRE(spec.points.size() > 50);

    SUBCASE("every point satisfies both quantization conditions") {
        for (const SpectrumPoint& p : spec.points) {
            CHECK(p.l == hbar * static_cast<double>(p.m));
            const double J = action({p.h, p.l});
            CHECK(std::abs(J - hbar * (static_cast<double>(p.n) + 0.5)) <= 1e-8);
        }
    }

    SUBCASE("the spectrum is symmetric under l -> -l") {
        for (const SpectrumPoint& p : spec.points) {
            if (p.m == 0) continue;
            bool found = false;
            for (const SpectrumPoint& q : spec.points)
                if (q.m == -p.m && q.n == p.n && std::abs(q.h - p.h) <= 1e-9) {
                    found = true;
                    break;
                }
            CHECK(found);
        }
    }

    SUBCASE("point count tracks the phase-space area as hbar halves") {
        // area in (J, l) coordinates: integral of dJ/dh = T / 2 pi
        double area = 0.0;
        const int grid = 60;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                const double h = window.h_min + (i + 0.5) * (window.h_max - window.h_min) / grid;
                const double l = window.l_min + (j + 0.5) * (window.l_max - window.l_min) / grid;
                area += periods({h, l}).T / (2.0 * kPi);
            }
        area *= (window.h_max - window.h_min) * (window.l_max - window.l_min) / (grid * grid);

        const double n1 = static_cast<double>(spec.points.size());
        CHECK(std::abs(n1 * hbar * hbar / area - 1.0) <= 0.1);
        const JointSpectrum fine = joint_spectrum(hbar / 2.0, window);
        const double n2 = static_cast<double>(fine.points.size());
        CHECK(std::abs(n2 * (hbar / 2) * (hbar / 2) / area - 1.0) <= 0.1);
    }

    SUBCASE("empty window is rejected") {
        CHECK_THROWS_AS(joint_spectrum(hbar, Window{1.0, 0.5, 0.0, 0.1}), std::invalid_argument);
        CHECK_THROWS_AS(joint_spectrum(-0.1, window), std::invalid_argument);
    }
}

TEST_CASE("quantum cell transport") {
    const double hbar = 0.05;
    const Window window{0.2, 1.8, -0.85, 0.85};
    const JointSpectrum spec = joint_spectrum(hbar, window);

    Loop loop;
    loop.steps = 64;
    const CellTransportResult res = cell_transport(spec, loop);
    CHECK(res.matrix.det() == 1);
    CHECK(conjugate_to_standard_shear(res.matrix));
    CHECK(res.max_defect < 0.3);

    SUBCASE("matches the classical monodromy as transpose-inverse, exactly") {
        Loop cl = loop;
        cl.steps = 128;
        const MonodromyResult classical = monodromy(cl);
        CHECK(res.matrix == classical.matrix.transpose_inverse());
    }

    SUBCASE("contractible loop transports trivially") {
        Loop small;
        small.center_h = 0.7;
        small.center_l = 0.3;
        small.radius = 0.15;
        small.steps = 64;
        CHECK(cell_transport(spec, small).matrix.is_identity());
    }

    SUBCASE("a doubled loop squares the matrix") {
        Loop twice = loop;
        twice.turns = 2;
        const CellTransportResult sq = cell_transport(spec, twice);
        CHECK(sq.matrix == res.matrix * res.matrix);
    }

    SUBCASE("too-coarse quantum lattice raises the hbar diagnostic") {
        const JointSpectrum sparse = joint_spectrum(0.4, window);
        Loop l2;
        l2.steps = 64;
        CHECK_THROWS_WITH_AS(cell_transport(sparse, l2), doctest::Contains("hbar"),
                             std::domain_error);
    }
}

TEST_CASE("integer matrix helpers") {
    IntMat2 shear;
    shear.m[0][1] = 1;
    CHECK(shear.det() == 1);
    CHECK(conjugate_to_standard_shear(shear));
    IntMat2 ti = shear.transpose_inverse();
    CHECK(ti.m[0][0] == 1);
    CHECK(ti.m[0][1] == 0);
    CHECK(ti.m[1][0] == -1);
    CHECK(ti.m[1][1] == 1);
    CHECK(conjugate_to_standard_shear(ti));
    CHECK(!conjugate_to_standard_shear(IntMat2::identity()));
    IntMat2 two;
    two.m[0][1] = 2;
    CHECK(!conjugate_to_standard_shear(two));  // non-primitive unipotent part
}
