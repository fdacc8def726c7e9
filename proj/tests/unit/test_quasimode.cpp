#include "skl/errors.hpp"
#include "skl/quasimode.hpp"
#include "skl/tree_kernel.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace skl;

TEST_CASE("decompositions merge equal parameters and normalize") {
    const auto psi = SpectralDecomposition::laplace({{2.0, 3.0}, {1.0, 1.0}, {2.0, 4.0}});
    REQUIRE(psi.components().size() == 2);
    CHECK(psi.components()[0].parameter == 1.0);
    CHECK(psi.components()[1].coefficient == doctest::Approx(5.0 / std::sqrt(26.0)));
    CHECK(psi.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(SpectralDecomposition::laplace({{1.0, 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(SpectralDecomposition::laplace({{-1.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(SpectralDecomposition::hecke(5, {{3.0, 1.0}}), OutOfSpectrum);
}

TEST_CASE("laplace defect") {
    CHECK(laplace_defect(SpectralDecomposition::laplace({{3.0, 1.0}}), 3.0) == 0.0);
    const auto two = SpectralDecomposition::laplace({{2.0, 1.0}, {4.0, 1.0}});
    CHECK(laplace_defect(two, 3.0) == doctest::Approx(std::sqrt(37.0)));
    CHECK(is_laplace_quasimode(two, 3.0, 3.0));
    CHECK_FALSE(is_laplace_quasimode(two, 3.0, 1.0));
    CHECK_THROWS_AS(hecke_defect(two, 0.0), ConventionMismatch);
}

TEST_CASE("hecke defect") {
    CHECK(hecke_defect(SpectralDecomposition::hecke(3, {{1.0, 1.0}}), 1.0) == 0.0);
    const auto two = SpectralDecomposition::hecke(3, {{0.7, 1.0}, {1.3, 1.0}});
    CHECK(hecke_defect(two, 1.0) == doctest::Approx(0.3));
    CHECK_THROWS_AS(laplace_defect(two, 1.0), ConventionMismatch);
}

TEST_CASE("window projection") {
    const auto psi = SpectralDecomposition::laplace({{1.0, 1.0}, {2.0, 1.0}, {3.0, 2.0}});
    CHECK(project_window(psi, Window(2.0, 5.0)).outside_mass == 0.0);
    const auto none = project_window(psi, Window(10.0, 1.0));
    CHECK(none.inside.empty());
    CHECK(none.outside_mass == doctest::Approx(1.0));
    double previous = 2.0;
    for (double width : {0.1, 0.5, 1.0, 1.5, 3.0}) {
        const auto p = project_window(psi, Window(2.0, width));
        CHECK(p.inside_mass + p.outside_mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.outside_mass <= previous);
        previous = p.outside_mass;
    }
    CHECK_THROWS_AS(Window(1.0, 0.0), InvalidArgument);
}

TEST_CASE("projection bound") {
    const auto exact = verify_projection_bound(SpectralDecomposition::laplace({{20.0, 1.0}}), 20.0, 0.1);
    CHECK(exact.defect == 0.0);
    CHECK(exact.outside_mass == 0.0);
    CHECK(exact.holds);
    CHECK_THROWS_AS(verify_projection_bound(SpectralDecomposition::laplace({{1.0, 1.0}}), 0.5, 1.0), DegenerateWindow);

    // Independent check of the inequality on random draws.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = 10 + 90 * u(rng);
        const double w = 0.01 + u(rng);
        std::vector<Component> comps;
        for (int i = 0; i < 20; ++i) comps.push_back({r + 6 * w * (2 * u(rng) - 1), 2 * u(rng) - 1});
        const auto psi = SpectralDecomposition::laplace(comps);
        double defect2 = 0.0;
        double outside = 0.0;
        for (const auto& c : psi.components()) {
            defect2 += std::pow(c.coefficient * (r * r - c.parameter * c.parameter), 2);
            if (std::abs(c.parameter - r) > w) outside += c.coefficient * c.coefficient;
        }
        const auto rep = verify_projection_bound(psi, r, w);
        CHECK(rep.defect == doctest::Approx(std::sqrt(defect2)).epsilon(1e-10));
        CHECK(rep.outside_mass == doctest::Approx(outside).epsilon(1e-12).scale(1e-300));
        CHECK(rep.holds);
    }
}

TEST_CASE("randomized trials and adversarial tightness") {
    const auto s = run_projection_trials(TrialConfig{});
    CHECK(s.passed == 1000);
    CHECK(s.failed == 0);
    CHECK(s.max_ratio <= 1.0);
    CHECK(to_json(run_projection_trials(TrialConfig{})).dump() == to_json(s).dump());

    const auto tight = adversarial_projection(50.0, 0.5, 0.2, 1e-6);
    CHECK(tight.holds);
    // The bound loses the factor (2r + omega)/(2r - omega) squared at the upper edge.
    const double expected = std::pow((2 * 50.0 - 0.5) / (2 * 50.0 + 0.5), 2);
    CHECK(tight.ratio == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("hecke_theta case split") {
    CHECK(hecke_theta(2.0, 3).parameter == doctest::Approx(0.0));
    CHECK(hecke_theta(0.0, 3).parameter == doctest::Approx(std::numbers::pi / 2));
    const auto neg = hecke_theta(-2.1, 5);
    CHECK(neg.cls == SpectralClass::UntemperedNegative);
    CHECK(neg.parameter == doctest::Approx(std::acosh(1.05)));
    CHECK(neg.eigenvalue() == doctest::Approx(-2.1));
    CHECK_THROWS_AS(hecke_theta(2.7, 5), OutOfSpectrum);
}

TEST_CASE("kernel application residual") {
    const auto design = design_kernel(5, 0.3, 40, 0.0);
    const SphericalTransform h(design.kernel);
    const auto psi = SpectralDecomposition::hecke(5, {{1.0, 1.0}, {1.02, 0.5}, {0.97, 0.5}});
    const auto app = apply_kernel(psi, h, 1.0);
    CHECK(app.defect == doctest::Approx(hecke_defect(psi, 1.0)));
    double oracle = 0.0;
    for (const auto& c : psi.components()) {
        oracle += std::pow(c.coefficient * (h(hecke_theta(c.parameter, 5)) - app.h_at_lambda), 2);
    }
    CHECK(app.residual == doctest::Approx(std::sqrt(oracle)));
    CHECK(app.lipschitz_bound_holds);
    CHECK_THROWS_AS(apply_kernel(SpectralDecomposition::hecke(3, {{1.0, 1.0}}), h, 1.0), MismatchedTree);
}

TEST_CASE("decomposition JSON roundtrip") {
    const auto psi = SpectralDecomposition::hecke(7, {{0.5, 0.6}, {-1.0, 0.8}});
    const auto back = decomposition_from_json(nlohmann::json::parse(to_json(psi).dump()));
    CHECK(back.convention() == Convention::Hecke);
    CHECK(*back.prime() == 7);
    REQUIRE(back.components().size() == 2);
    CHECK(back.components()[0].parameter == -1.0);
    CHECK(back.components()[0].coefficient == doctest::Approx(0.8));
    CHECK_THROWS_AS(decomposition_from_json(nlohmann::json{{"convention", "x"}, {"components", {{1, 1}}}}),
                    InvalidArgument);
    CHECK_THROWS_AS(decomposition_from_json(nlohmann::json::object()), InvalidArgument);
}
