#include "skl/errors.hpp"
#include "skl/selberg.hpp"

#include <doctest.h>

#include <boost/math/differentiation/finite_difference.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace skl;

namespace {

constexpr double pi = std::numbers::pi;

// Closed form of the normalized point-pair kernel paired with cos(rT)/cosh(pi r/2).
double k_oracle(double T, double t) {
    const std::complex<double> z(t + 0.5, -0.5 * std::sinh(T));
    return std::cosh(T) / 4.0 * std::real(std::pow(z, -1.5)) / (2.0 * pi);
}

double h_oracle(double T, double r) { return std::cos(r * T) / std::cosh(pi * r / 2.0); }

double q_oracle(double T, double w) {
    const double s = 4.0 * w + 2.0;
    return 2.0 * std::cosh(T) * s / (2.0 * std::cosh(2.0 * T) - 2.0 + s * s);
}

// Double factorial ratio (2m)!! / (2m+1)!!.
double dfact_ratio(int m) {
    double v = 1.0;
    for (int i = 1; i <= m; ++i) v *= (2.0 * i) / (2.0 * i + 1.0);
    return v;
}

double derivative(const std::function<double(double)>& f, double x) {
    return boost::math::differentiation::finite_difference_derivative<decltype(f), double, 6>(f, x);
}

}  // namespace

TEST_CASE("profile closed forms") {
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
        CHECK(profile_q(T, 0.0) == doctest::Approx(1.0 / std::cosh(T)).epsilon(1e-14));
        CHECK(profile_g(T, 0.0) == doctest::Approx(2.0 / std::cosh(T)).epsilon(1e-14));
        CHECK(profile_h(T, SpectralParameter::real(0.0)) == doctest::Approx(1.0));
        for (double w : {0.0, 0.3, 1.0, 7.5, 40.0}) {
            CHECK(profile_q(T, w) == doctest::Approx(q_oracle(T, w)).epsilon(1e-12));
            const std::function<double(double)> q = [T](double x) { return profile_q(T, x); };
            const double fd = derivative(q, w + 1e-3);
            CHECK(profile_q_derivative(T, w + 1e-3) == doctest::Approx(fd).epsilon(1e-6));
            CHECK(std::abs(profile_q_derivative(T, w)) <= profile_q_derivative_bound(T, w) * (1 + 1e-12));
        }
        for (double u : {0.0, 0.7, 2.0, 3.0 * T}) {
            CHECK(profile_g(T, u) == doctest::Approx(2.0 * profile_q(T, std::pow(std::sinh(u / 2), 2))).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile derivative changes sign where the numerator vanishes") {
    for (double T : {2.0, 3.0}) {
        const double root = (std::sqrt(2.0 * std::cosh(2.0 * T) - 2.0) - 2.0) / 4.0;
        CHECK(profile_q_derivative(T, root * 0.99) > 0.0);
        CHECK(profile_q_derivative(T, root * 1.01) < 0.0);
    }
}

TEST_CASE("untempered transform values are at least one") {
    for (double T : {1.0, 3.0, 6.0}) {
        for (double y : {0.0, 0.1, 0.3, 0.5}) {
            const double h = profile_h(T, SpectralParameter::imag(y));
            CHECK(h == doctest::Approx(std::cosh(y * T) / std::cos(pi * y / 2)));
            CHECK(h >= 1.0);
        }
    }
}

TEST_CASE("fourier_h reproduces the closed-form pair") {
    CHECK(fourier_h(selberg_profile(1.0), SpectralParameter::real(0.0), 1e-9).value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fourier_h(selberg_profile(1.5), SpectralParameter::real(2.0), 1e-9).value ==
          doctest::Approx(std::cos(3.0) / std::cosh(pi)).epsilon(1e-6));
    EvenProfile zero{[](double) { return 0.0; }, 5.0};
    CHECK(fourier_h(zero, SpectralParameter::real(1.0), 1e-9).value == 0.0);
    double worst = 0.0;
    for (double T : {1.0, 1.5, 2.0, 3.0}) {
        const auto g = selberg_profile(T);
        for (int i = 0; i < 64; ++i) {
            const double r = 8.0 * i / 63.0;
            worst = std::max(worst, std::abs(fourier_h(g, SpectralParameter::real(r), 1e-9).value - h_oracle(T, r)));
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("kernel_k matches the closed-form kernel and its normalization") {
    for (double T : {1.0, 2.0, 5.0}) {
        for (double t : {0.0, 0.2, 1.0, 10.0, 300.0, 1e5}) {
            const auto k = kernel_k(T, t);
            CHECK(k.value == doctest::Approx(k_oracle(T, t)).epsilon(1e-9).scale(1e-14));
            CHECK(std::abs(k.value) <= kernel_k_bound(T, t) * (1 + 1e-9));
        }
        // Hyperbolic area element 4 pi dt: the transform at r = i/2 is the total integral.
        boost::math::quadrature::exp_sinh<double> es;
        const double total = es.integrate([T](double t) { return k_oracle(T, t); }, 0.0,
                                          std::numeric_limits<double>::infinity());
        CHECK(4.0 * pi * total == doctest::Approx(std::sqrt(2.0) * std::cosh(T / 2)).epsilon(1e-8));
    }
}

TEST_CASE("abel_forward recovers the profile of k_T") {
    for (double T : {1.0, 2.0}) {
        const KernelDecay decay{std::numeric_limits<double>::infinity(), std::cosh(T) / (8 * pi)};
        for (double w : {0.0, 0.5, 2.0, 10.0}) {
            const auto q = abel_forward([T](double t) { return kernel_k(T, t).value; }, w, decay, 1e-9);
            CHECK(q.value == doctest::Approx(q_oracle(T, w) / (2 * pi)).epsilon(1e-5));
        }
    }
    CHECK(abel_forward([](double) { return 0.0; }, 0.3, KernelDecay{1.0, 0.0}, 1e-9).value == 0.0);
}

TEST_CASE("Abel roundtrip on compactly supported kernels") {
    struct Case {
        const char* name;
        RealFunction k;
        RealFunction kd;
        double support;
    };
    const double a = 1.0;
    const Case cases[] = {
        {"power", [a](double t) { return t < a ? std::pow(a - t, 4) : 0.0; },
         [a](double t) { return t < a ? -4.0 * std::pow(a - t, 3) : 0.0; }, a},
        {"bump", [](double t) { return t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; },
         [](double t) {
             if (t >= 1.0) return 0.0;
             const double u = 1.0 - t * t;
             return -2.0 * t / (u * u) * std::exp(-1.0 / u);
         },
         1.0},
        {"poly-exp", [](double t) { return t < 2.0 ? std::pow(2.0 - t, 5) * std::exp(-t) : 0.0; },
         [](double t) { return t < 2.0 ? -std::pow(2.0 - t, 4) * (7.0 - t) * std::exp(-t) : 0.0; }, 2.0},
    };

    // Power kernel profile: (a - w)^(9/2) B(5, 1/2).
    for (double w : {0.0, 0.25, 0.9}) {
        const double oracle = 2.0 * std::pow(a - w, 4.5) * dfact_ratio(4);
        CHECK(abel_forward(cases[0].k, w, KernelDecay{a, 0.0}, 1e-12).value == doctest::Approx(oracle).epsilon(1e-10));
    }

    for (const auto& c : cases) {
        CAPTURE(c.name);
        const KernelDecay decay{c.support, 0.0};
        // Derivative supplied in closed form agrees with finite differences.
        const std::function<double(double)> k = c.k;
        CHECK(c.kd(0.4 * c.support) == doctest::Approx(derivative(k, 0.4 * c.support)).epsilon(1e-8));
        // Q' is the profile of k' because k vanishes at the support end.
        const RealFunction qd = [&](double w) { return abel_forward(c.kd, w, decay, 1e-10).value; };
        for (double t : {0.05, 0.3, 0.6, 0.85 * c.support}) {
            const double back = abel_inverse(qd, t, 0.0, 1e-8, 0.5, c.support).value;
            CHECK(back == doctest::Approx(c.k(t)).epsilon(1e-5).scale(1e-7));
        }
    }
}

TEST_CASE("truncated transform tail agrees with a nested quadrature") {
    const double T = 2.0;
    const TruncatedTransform tt(T, 1e-12);
    REQUIRE(tt.chain_used());
    CHECK(tt.cutoff() == doctest::Approx(std::pow(std::sinh(2 * T), 2)));
    boost::math::quadrature::exp_sinh<double> es;
    for (double w : {0.0, 1.0, 10.0, 700.0}) {
        const double start = std::max(w, tt.cutoff());
        const double oracle = es.integrate(
            [&](double s) { return k_oracle(T, start + s) / std::sqrt(start + s - w); }, 0.0,
            std::numeric_limits<double>::infinity());
        CHECK(tt.tail_profile(w) == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(tt.truncated_profile(w) == doctest::Approx(q_oracle(T, w) / (2 * pi) - oracle).epsilon(1e-7));
    }
    CHECK(tt.truncated_profile(tt.cutoff() * 1.01) == 0.0);
}

TEST_CASE("truncated transform deviation stays within the certified bound") {
    for (double T : {1.0, 3.0, 5.0}) {
        const TruncatedTransform tt(T);
        const double bound = tt.certified_bound() + tt.quadrature_error();
        CHECK(tt.certified_bound() == doctest::Approx(0.5 / std::sinh(T)));
        for (double r : {0.0, 0.5, 2.0, 5.0}) {
            const auto p = SpectralParameter::real(r);
            CHECK(std::abs(tt.deviation(p)) <= bound);
            CHECK(tt.value(p) == doctest::Approx(h_oracle(T, r) + tt.deviation(p)).epsilon(1e-12));
        }
        for (double y : {0.0, 0.25, 0.5}) CHECK(std::abs(tt.deviation(SpectralParameter::imag(y))) <= bound);
    }
    const TruncatedTransform far(40.0, 1e-12);
    CHECK_FALSE(far.chain_used());
    CHECK(far.deviation(SpectralParameter::real(1.0)) == 0.0);
    CHECK(far.error_bound() >= far.certified_bound());
}

TEST_CASE("kernel sup and tail follow exponential envelopes") {
    const auto sweep = selberg_sweep({4.0, 5.0, 6.0});
    REQUIRE(sweep.sup_norm.size() == 3);
    for (std::size_t i = 0; i < sweep.T.size(); ++i) {
        const double T = sweep.T[i];
        // For T >= 2 the sup is attained at t = 0 where the oracle is explicit.
        CHECK(sweep.sup_norm[i] >= std::abs(k_oracle(T, 0.0)) * (1 - 1e-9));
        CHECK(sweep.sup_constant[i] == doctest::Approx(sweep.sup_norm[i] * std::exp(T / 2)));
    }
    // The e^{-T/2} rate is asymptotic; small T sits below the envelope.
    CHECK(sweep.sup_fit.slope <= -0.45);
    CHECK(sweep.tail_fit.slope <= -1.0);
    CHECK(std::isfinite(sweep.sup_constant_max));
    CHECK(std::isfinite(sweep.tail_constant_max));
}

TEST_CASE("fit_line recovers an exact line") {
    const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
}
