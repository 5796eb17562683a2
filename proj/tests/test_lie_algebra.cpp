#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>

#include "symgeo/lie_algebra.hpp"
#include "test_support.hpp"

using namespace symgeo::lie;

namespace {

Eigen::VectorXd basis(int n, int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    return e;
}

Eigen::VectorXd random_unit(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v / v.norm();
}

const char* kFactoryLabels[] = {"abelian(3)", "abelian(5)", "heisenberg3", "affine1", "so3", "sl2"};

}  // namespace

TEST_CASE("factory algebras validate with zero residual") {
    for (const char* label : kFactoryLabels) {
        CAPTURE(label);
        const StandardAlgebra sa = make_standard(label);
        const ValidationReport rep = validate(sa.algebra);
        CHECK(rep.pass);
        CHECK(rep.max_antisymmetry <= 1e-12);
        CHECK(rep.max_jacobi <= 1e-12);
        CHECK(realization_defect(sa.realization) <= 1e-12);
    }
    CHECK(validate(gl_algebra(3)).pass);
}

TEST_CASE("unknown factory label is rejected with the known list") {
    CHECK_THROWS_WITH_AS(make_standard("su5"),
                         doctest::Contains("known labels"), std::invalid_argument);
    CHECK_THROWS_AS(make_standard("abelian(0)"), std::invalid_argument);
    CHECK_THROWS_AS(make_standard("abelian(x)"), std::invalid_argument);
}

TEST_CASE("structure constants of the zoo") {
    const StandardAlgebra so3 = make_standard("so3");
    CHECK(so3.algebra.structure(0, 1, 2) == 1.0);
    CHECK(so3.algebra.structure(1, 2, 0) == 1.0);
    CHECK(so3.algebra.structure(2, 0, 1) == 1.0);
    CHECK(so3.algebra.structure(1, 0, 2) == -1.0);

    const StandardAlgebra sl2 = make_standard("sl2");
    // (H, E, F): [H,E] = 2E, [H,F] = -2F, [E,F] = H
    CHECK(sl2.algebra.structure(0, 1, 1) == 2.0);
    CHECK(sl2.algebra.structure(0, 2, 2) == -2.0);
    CHECK(sl2.algebra.structure(1, 2, 0) == 1.0);

    const StandardAlgebra ab = make_standard("abelian(3)");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(ab.algebra.structure(i, j, k) == 0.0);
}

TEST_CASE("bracket examples") {
    const StandardAlgebra so3 = make_standard("so3");
    const Eigen::VectorXd e1 = basis(3, 0), e2 = basis(3, 1), e3 = basis(3, 2);
    CHECK((so3.algebra.bracket(e1, e2) - e3).norm() == 0.0);

    std::mt19937_64 rng(11);
    const Eigen::VectorXd x = random_unit(3, rng);
    CHECK(so3.algebra.bracket(x, x).norm() == 0.0);

    const StandardAlgebra ab = make_standard("abelian(2)");
    CHECK(ab.algebra.bracket(basis(2, 0), basis(2, 1)).norm() == 0.0);

    CHECK_THROWS_AS(so3.algebra.bracket(basis(2, 0), e1), std::invalid_argument);
}

TEST_CASE("ad matrices") {
    const StandardAlgebra so3 = make_standard("so3");
    const Eigen::MatrixXd ad3 = so3.algebra.ad(basis(3, 2));
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
    expected(0, 1) = -1.0;
    expected(1, 0) = 1.0;
    CHECK((ad3 - expected).cwiseAbs().maxCoeff() == 0.0);

    CHECK(so3.algebra.ad(Eigen::VectorXd::Zero(3)).cwiseAbs().maxCoeff() == 0.0);

    const StandardAlgebra sl2 = make_standard("sl2");
    const Eigen::MatrixXd adH = sl2.algebra.ad(basis(3, 0));
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
    diag(1, 1) = 2.0;
    diag(2, 2) = -2.0;
    CHECK((adH - diag).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ad is linear and a Lie algebra map") {
    std::mt19937_64 rng(5);
    for (const char* label : {"so3", "sl2", "heisenberg3", "affine1"}) {
        CAPTURE(label);
        const LieAlgebra a = make_standard(label).algebra;
        const int n = a.dim();
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::VectorXd x = random_unit(n, rng), y = random_unit(n, rng);
            const double al = 0.3, be = -1.7;
            CHECK((a.ad(al * x + be * y) - al * a.ad(x) - be * a.ad(y)).cwiseAbs().maxCoeff() <= 1e-14);
            const Eigen::MatrixXd lhs = a.ad(a.bracket(x, y));
            const Eigen::MatrixXd rhs = a.ad(x) * a.ad(y) - a.ad(y) * a.ad(x);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("validate flags a raw tensor perturbation") {
    const LieAlgebra so3 = make_standard("so3").algebra;
    const int n = 3;
    std::vector<double> c(n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) c[(i * n + j) * n + k] = so3.structure(i, j, k);
    c[(0 * n + 1) * n + 2] += 1e-3;  // perturb c[1][2][3] without the mirror
    const LieAlgebra bad = LieAlgebra::from_raw(3, "so3-perturbed", c);
    const ValidationReport rep = validate(bad);
    CHECK(!rep.pass);
    CHECK(rep.max_antisymmetry == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(rep.max_jacobi > 1e-4);
    CHECK(rep.max_jacobi < 1e-2);
}

TEST_CASE("homomorphisms") {
    const StandardAlgebra so3 = make_standard("so3");

    const LieAlgebraHom id{so3.algebra, so3.algebra, Eigen::MatrixXd::Identity(3, 3)};
    CHECK(hom_bracket_defect(id) == 0.0);
    const Eigen::VectorXd x = basis(3, 0) * 2.0 + basis(3, 2);
    CHECK((apply_hom(id, x) - x).norm() == 0.0);

    const LieAlgebraHom zero{so3.algebra, make_standard("abelian(2)").algebra,
                             Eigen::MatrixXd::Zero(2, 3)};
    CHECK(hom_bracket_defect(zero) == 0.0);
    CHECK(apply_hom(zero, x).norm() == 0.0);

    const LieAlgebraHom rho = hom_from_realization(so3.realization);
    CHECK(hom_bracket_defect(rho) <= 1e-12);
    const Eigen::VectorXd im = apply_hom(rho, basis(3, 0));
    const Eigen::MatrixXd L1 = so3.realization.rep[0];
    CHECK((im - Eigen::Map<const Eigen::VectorXd>(L1.data(), 9)).norm() == 0.0);

    CHECK_THROWS_AS(apply_hom(rho, basis(2, 0)), std::invalid_argument);
}

TEST_CASE("structure-constant files round-trip and validate") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "symgeo_lie_test";
    fs::create_directories(dir);

    const LieAlgebra sl2 = make_standard("sl2").algebra;
    const std::string path = (dir / "sl2.json").string();
    save_structure_file(sl2, path);
    const LieAlgebra back = load_structure_file(path);
    CHECK(back.dim() == 3);
    CHECK(back == sl2);
    CHECK(back.label() == "sl2");

    // A Jacobi-violating file is rejected with residuals in the message
    // ([e1,e3] = e3 breaks the cyclic identity).
    const std::string bad = (dir / "bad.json").string();
    {
        std::ofstream out(bad);
        out << R"({"dim": 3, "label": "broken",
                   "c": [[1,2,3,1.0],[2,3,1,1.0],[1,3,3,1.0]]})";
    }
    CHECK_THROWS_WITH_AS(load_structure_file(bad), doctest::Contains("Jacobi"),
                         std::invalid_argument);

    // i >= j rows are rejected.
    const std::string badrow = (dir / "badrow.json").string();
    {
        std::ofstream out(badrow);
        out << R"({"dim": 3, "label": "x", "c": [[2,1,3,1.0]]})";
    }
    CHECK_THROWS_WITH_AS(load_structure_file(badrow), doctest::Contains("i < j"),
                         std::invalid_argument);

    fs::remove_all(dir);
}

TEST_CASE("realization commutator oracle matches ad on random vectors") {
    std::mt19937_64 rng(17);
    for (const char* label : {"so3", "sl2", "heisenberg3", "affine1"}) {
        CAPTURE(label);
        const StandardAlgebra sa = make_standard(label);
        const int n = sa.algebra.dim();
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::VectorXd x = random_unit(n, rng), y = random_unit(n, rng);
            const Eigen::MatrixXd lhs = sa.realization.of(sa.algebra.bracket(x, y));
            const Eigen::MatrixXd rhs =
                sa.realization.of(x) * sa.realization.of(y) - sa.realization.of(y) * sa.realization.of(x);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}
