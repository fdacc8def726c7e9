#include "skl/selberg.hpp"

#include "skl/errors.hpp"
#include "skl/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skl {

namespace {

constexpr double kPi = std::numbers::pi;

// (1 - y^2) / (1 + y^2)^2 without overflow for large y.
double derivative_shape(double y) {
    if (y <= 1.0) {
        const double y2 = y * y;
        return (1.0 - y2) / ((1.0 + y2) * (1.0 + y2));
    }
    const double z2 = 1.0 / (y * y);
    return z2 * (z2 - 1.0) / ((1.0 + z2) * (1.0 + z2));
}

// y / (1 + y^2) without overflow.
double profile_shape(double y) {
    if (y <= 1.0) return y / (1.0 + y * y);
    const double z = 1.0 / y;
    return z / (1.0 + z * z);
}

double scaled_omega(double T, double omega) { return (4.0 * omega + 2.0) / (2.0 * std::sinh(T)); }

double normalized_q_derivative(double T, double v) { return profile_q_derivative(T, v) / kSelbergNormalization; }

}  // namespace

double SpectralParameter::fourier_weight(double u) const {
    return imaginary ? std::cosh(value * u) : std::cos(value * u);
}

double profile_h(double T, const SpectralParameter& r) {
    if (r.imaginary) return std::cosh(r.value * T) / std::cos(0.5 * kPi * r.value);
    return std::cos(r.value * T) / std::cosh(0.5 * kPi * r.value);
}

double profile_g(double T, double u) { return 1.0 / std::cosh(u - T) + 1.0 / std::cosh(u + T); }

// Q_T = 2 x cosh T / (x^2 + 4 sinh^2 T) with x = 4 omega + 2, rewritten in y = x / (2 sinh T).
double profile_q(double T, double omega) { return profile_shape(scaled_omega(T, omega)) / std::tanh(T); }

// Q_T' = 8 cosh T (4 sinh^2 T - x^2) / (4 sinh^2 T + x^2)^2 in the same variable.
double profile_q_derivative(double T, double omega) {
    return 2.0 / (std::sinh(T) * std::tanh(T)) * derivative_shape(scaled_omega(T, omega));
}

double profile_q_derivative_bound(double T, double omega) {
    const double a = omega + 0.5;
    return std::cosh(T) / (2.0 * a * a);
}

EvenProfile selberg_profile(double T) {
    EvenProfile p;
    p.g = [T](double u) { return profile_g(T, u) / kSelbergNormalization; };
    // sech x <= 2 e^{-|x|} gives g_T(u) <= 4 cosh T e^{-u} for u >= T.
    p.decay_from = T;
    p.decay_coeff = 4.0 * std::cosh(T) / kSelbergNormalization;
    p.decay_rate = 1.0;
    return p;
}

QuadResult fourier_h(const EvenProfile& profile, const SpectralParameter& r, double tol) {
    const double rate = profile.decay_rate - (r.imaginary ? std::abs(r.value) : 0.0);
    double upper = profile.support_end;
    double tail = 0.0;
    if (!std::isfinite(upper)) {
        if (!(rate > 0.0)) throw InvalidArgument("profile decays too slowly for this spectral parameter");
        upper = profile.decay_from;
        if (profile.decay_coeff > 0.0) {
            // 2 * integral_U^inf coeff e^{-rate u} du <= tol / 2
            upper = std::max(upper, std::log(4.0 * profile.decay_coeff / (rate * tol)) / rate);
            tail = 2.0 * profile.decay_coeff * std::exp(-rate * upper) / rate;
        }
    }
    if (!(upper > 0.0)) return {0.0, tail};
    const double freq = r.imaginary ? 0.0 : std::abs(r.value);
    const int panels = std::max({1, static_cast<int>(std::ceil(upper / 2.0)),
                                 static_cast<int>(std::ceil(upper * freq / (2.0 * kPi)))});
    auto f = [&](double u) { return r.fourier_weight(u) * profile.g(u); };
    auto body = integrate(f, 0.0, upper, 1e-13, panels);
    QuadResult out{2.0 * body.value, 2.0 * body.error + tail};
    if (out.error > tol) {
        throw QuadratureFailure("fourier_h error estimate " + std::to_string(out.error) + " exceeds tol " +
                                std::to_string(tol));
    }
    return out;
}

QuadResult abel_forward(const RealFunction& k, double omega, const KernelDecay& decay, double rel_tol) {
    auto f = [&](double s) { return 2.0 * k(omega + s * s); };
    if (std::isfinite(decay.support_end)) {
        if (omega >= decay.support_end) return {};
        const double top = std::sqrt(decay.support_end - omega);
        return integrate(f, 0.0, top, rel_tol, 4);
    }
    // integral_S^inf 2 coeff (omega + 1/2 + s^2)^{-3/2} ds <= coeff / S^2
    const double c = decay.coeff;
    const double scale = 0.5 * std::sqrt(omega + 0.5);
    return integrate_half_line(f, 0.0, scale, [c](double S) { return c / (S * S); }, rel_tol, 1e-300);
}

QuadResult abel_inverse(const RealFunction& q_derivative, double t, double derivative_coeff, double rel_tol,
                        double feature_scale, double support_end) {
    auto f = [&](double s) { return q_derivative(t + s * s); };
    if (std::isfinite(support_end)) {
        if (!(t < support_end)) return {};
        const double top = std::sqrt(support_end - t);
        const auto part = integrate(f, 0.0, top, rel_tol, std::max(1, static_cast<int>(std::ceil(top / feature_scale))));
        return {-2.0 / kPi * part.value, 2.0 / kPi * part.error};
    }
    // integral_S^inf coeff s^{-4} ds = coeff / (3 S^3)
    const double c = derivative_coeff;
    auto part = integrate_half_line(f, 0.0, feature_scale, [c](double S) { return c / (3.0 * S * S * S); }, rel_tol,
                                    1e-300);
    return {-2.0 / kPi * part.value, 2.0 / kPi * part.error};
}

QuadResult kernel_k(double T, double t, double rel_tol) {
    if (!(T > 0.0)) throw InvalidArgument("T must be positive");
    if (!(t >= 0.0)) throw InvalidArgument("t must be non-negative");
    const double coeff = std::cosh(T) / (2.0 * kSelbergNormalization);
    const double scale = 0.5 * std::sqrt(t + 0.5 + 0.5 * std::sinh(T));
    return abel_inverse([T](double v) { return normalized_q_derivative(T, v); }, t, coeff, rel_tol, scale);
}

double kernel_k_bound(double T, double t) { return std::cosh(T) / (8.0 * kPi) * std::pow(t + 0.5, -1.5); }

TransformTriple selberg_triple(double T, double rel_tol) {
    TransformTriple tr;
    tr.T = T;
    tr.rel_tol = rel_tol;
    tr.h = [T](const SpectralParameter& r) { return profile_h(T, r); };
    tr.g = [T](double u) { return profile_g(T, u) / kSelbergNormalization; };
    tr.q = [T](double w) { return profile_q(T, w) / kSelbergNormalization; };
    tr.k = [T, rel_tol](double t) { return kernel_k(T, t, rel_tol).value; };
    return tr;
}

namespace {

// Discarded profile for omega = t* - gap below the cutoff. Exchanging the
// order in integral_{t*}^inf k(t) (t - omega)^{-1/2} dt with k written through
// Q' leaves the inner integral in closed form:
//   tail = -(2/pi) integral_{t*}^inf Q'(v) arccos(sqrt(gap / (v - omega))) dv,
// and with v = t* + s^2 the arccos becomes atan(s / sqrt(gap)).
double tail_profile_below(double T, double cutoff, double gap) {
    const double root_gap = std::sqrt(std::max(gap, 0.0));
    auto f = [&](double s) {
        const double angle = root_gap > 0.0 ? std::atan(s / root_gap) : 0.5 * kPi;
        return 2.0 * s * normalized_q_derivative(T, cutoff + s * s) * angle;
    };
    const double a = cutoff + 0.5;
    const double c = std::cosh(T) / (4.0 * kPi);
    const double first = 0.5 * std::min(root_gap > 0.0 ? root_gap : std::sqrt(a), std::sqrt(a));
    auto part = integrate_half_line(f, 0.0, std::max(first, 1e-3), [a, c](double S) { return c / (a + S * S); },
                                    1e-11, 1e-300, 2000);
    return -2.0 / kPi * part.value;
}

}  // namespace

TruncatedTransform::TruncatedTransform(double T, double tol, double r_max)
    : T_(T), tol_(tol), cutoff_(std::pow(std::sinh(2.0 * T), 2)) {
    if (!(T > 0.0)) throw InvalidArgument("T must be positive");
    chain_ = certified_bound() > tol_;
    if (!chain_) return;
    const double top = 4.0 * T_;
    const double width = std::min(0.5, 2.5 / std::max(r_max, 1.0));
    auto g_tail = [&](double u) {
        // t* - sinh^2(u/2) = sinh(2T - u/2) sinh(2T + u/2), free of cancellation
        const double gap = std::sinh(2.0 * T_ - 0.5 * u) * std::sinh(2.0 * T_ + 0.5 * u);
        return 2.0 * tail_profile_below(T_, cutoff_, gap);
    };
    rule_ = graded_gauss_legendre(0.0, top, width, 40, 20);
    tail_values_ = parallel_map(rule_.nodes.size(), [&](std::size_t i) { return g_tail(rule_.nodes[i]); });

    const auto coarse = graded_gauss_legendre(0.0, top, width, 40, 10);
    const auto coarse_values = parallel_map(coarse.nodes.size(), [&](std::size_t i) { return g_tail(coarse.nodes[i]); });
    for (const auto& r : {SpectralParameter::real(0.0), SpectralParameter::real(r_max), SpectralParameter::imag(0.5)}) {
        const double fine = rule_.apply([&](std::size_t i) { return r.fourier_weight(rule_.nodes[i]) * tail_values_[i]; });
        const double rough =
            coarse.apply([&](std::size_t i) { return r.fourier_weight(coarse.nodes[i]) * coarse_values[i]; });
        rule_error_ = std::max(rule_error_, 2.0 * std::abs(fine - rough));
    }
}

double TruncatedTransform::certified_bound() const { return 0.5 / std::sinh(T_); }

double TruncatedTransform::tail_profile(double omega) const {
    if (omega >= cutoff_) return profile_q(T_, omega) / kSelbergNormalization;
    return tail_profile_below(T_, cutoff_, cutoff_ - omega);
}

double TruncatedTransform::truncated_profile(double omega) const {
    if (omega >= cutoff_) return 0.0;
    return profile_q(T_, omega) / kSelbergNormalization - tail_profile(omega);
}

double TruncatedTransform::deviation(const SpectralParameter& r) const {
    if (!chain_) return 0.0;
    const double inside =
        2.0 * rule_.apply([&](std::size_t i) { return r.fourier_weight(rule_.nodes[i]) * tail_values_[i]; });
    const double rate = 1.0 - (r.imaginary ? std::abs(r.value) : 0.0);
    const double coeff = 4.0 * std::cosh(T_) / kSelbergNormalization;
    const double T = T_;
    auto outside = integrate_half_line(
        [&](double u) { return r.fourier_weight(u) * profile_g(T, u) / kSelbergNormalization; }, 4.0 * T_, 1.0,
        [coeff, rate](double S) { return coeff * std::exp(-rate * S) / rate; }, 1e-12, 1e-18);
    return -(inside + 2.0 * outside.value);
}

double TruncatedTransform::value(const SpectralParameter& r) const { return profile_h(T_, r) + deviation(r); }

double TruncatedTransform::error_bound() const { return chain_ ? rule_error_ : certified_bound(); }

KernelSup kernel_sup(double T, double rel_tol) {
    auto magnitude = [&](double x) { return std::abs(kernel_k(T, std::expm1(x), rel_tol).value); };
    const int n = 160;
    const double top = std::log1p(100.0 * std::cosh(T));
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i) xs[i] = top * i / n;
    const auto values = parallel_map(xs.size(), [&](std::size_t i) { return magnitude(xs[i]); });
    const auto best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
    double lo = xs[std::max(best - 1, 0)];
    double hi = xs[std::min(best + 1, n)];
    KernelSup out{values[best], xs[best]};
    // Golden-section refinement of the bracketing cell.
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = magnitude(a);
    double fb = magnitude(b);
    for (int it = 0; it < 60; ++it) {
        if (fa > fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = magnitude(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = magnitude(b);
        }
    }
    for (auto [x, v] : {std::pair{a, fa}, std::pair{b, fb}}) {
        if (v > out.sup) out = {v, x};
    }
    out.argmax = std::expm1(out.argmax);
    return out;
}

QuadResult kernel_tail_integral(double T, double rel_tol) {
    const double start = std::log(std::pow(std::sinh(2.0 * T), 2));
    auto f = [&](double x) {
        const double t = std::exp(x);
        return std::abs(kernel_k(T, t, 1e-11).value) * t;
    };
    const double c = std::cosh(T) / (4.0 * kPi);
    // integral_V^inf cosh T/(8 pi) (t + 1/2)^{-3/2} dt = cosh T / (4 pi sqrt(V + 1/2))
    return integrate_half_line(f, start, 1.0, [c](double X) { return c / std::sqrt(std::exp(X) + 0.5); }, rel_tol,
                               1e-300);
}

KernelShape kernel_shape(double T, int samples) {
    const double ch = std::cosh(T);
    KernelShape s;
    for (int i = 0; i <= samples; ++i) {
        const double t = std::expm1(std::log1p(ch) * i / samples);
        s.plateau_constant = std::max(s.plateau_constant, std::abs(kernel_k(T, t).value) * std::sqrt(ch));
        const double far = ch * std::exp(std::log(1e6) * i / samples);
        s.decay_constant = std::max(s.decay_constant, std::abs(kernel_k(T, far).value) * std::pow(far, 1.5) / ch);
    }
    return s;
}

Regression fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw InvalidArgument("fit_line needs two or more points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

SelbergSweep selberg_sweep(const std::vector<double>& Ts) {
    SelbergSweep s;
    s.T = Ts;
    struct Row {
        double sup = 0.0;
        double tail = 0.0;
    };
    const auto rows = parallel_map(Ts.size(), [&](std::size_t i) {
        return Row{kernel_sup(Ts[i]).sup, kernel_tail_integral(Ts[i]).value};
    });
    std::vector<double> log_sup, log_tail;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        s.sup_norm.push_back(rows[i].sup);
        s.tail_integral.push_back(rows[i].tail);
        s.sup_constant.push_back(rows[i].sup * std::exp(0.5 * Ts[i]));
        s.tail_constant.push_back(rows[i].tail * std::exp(Ts[i]));
        log_sup.push_back(std::log(rows[i].sup));
        log_tail.push_back(std::log(rows[i].tail));
    }
    if (Ts.size() >= 2) {
        s.sup_fit = fit_line(Ts, log_sup);
        s.tail_fit = fit_line(Ts, log_tail);
    }
    s.sup_constant_max = *std::max_element(s.sup_constant.begin(), s.sup_constant.end());
    s.tail_constant_max = *std::max_element(s.tail_constant.begin(), s.tail_constant.end());
    return s;
}

nlohmann::json to_json(const SelbergSweep& s) {
    return {{"T_sweep", s.T},
            {"sup_norm", s.sup_norm},
            {"tail_integral", s.tail_integral},
            {"sup_constant", s.sup_constant},
            {"tail_constant", s.tail_constant},
            {"sup_fitted_exponent", s.sup_fit.slope},
            {"tail_fitted_exponent", s.tail_fit.slope},
            {"sup_fitted_constant", s.sup_constant_max},
            {"tail_fitted_constant", s.tail_constant_max}};
}

}  // namespace skl
