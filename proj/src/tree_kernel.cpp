#include "skl/tree_kernel.hpp"

#include "skl/angles.hpp"
#include "skl/chebyshev.hpp"
#include "skl/errors.hpp"
#include "skl/parallel.hpp"
#include "skl/wave.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace skl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative agreement that treats equal infinities as exact.
double relative_gap(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b ? 0.0 : kInf;
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

// log sinh(z) for z > 0 without overflow.
double log_sinh(double z) {
    if (z > 20.0) return z + std::log1p(-std::exp(-2.0 * z)) - std::numbers::ln2;
    return std::log(std::sinh(z));
}

// p^(-d/2) in Q(sqrt p).
AlgebraicNumber inverse_half_power(long p, int d) {
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d / 2));
    AlgebraicNumber r(mpq_class(mpz_class(1), denom));
    if (d % 2 != 0) r *= AlgebraicNumber::inv_sqrt_p(p);
    return r;
}

double log_sqrt_p(long p) { return 0.5 * std::log(static_cast<double>(p)); }

}  // namespace

SpectralPoint SpectralPoint::tempered(double theta) {
    if (!(theta >= 0.0 && theta <= kPi)) throw InvalidArgument("tempered theta must lie in [0, pi]");
    return {SpectralClass::Tempered, theta};
}

SpectralPoint SpectralPoint::untempered_positive(double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("untempered beta must be positive");
    return {SpectralClass::UntemperedPositive, beta};
}

SpectralPoint SpectralPoint::untempered_negative(double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("untempered beta must be positive");
    return {SpectralClass::UntemperedNegative, beta};
}

double SpectralPoint::eigenvalue() const {
    switch (cls) {
        case SpectralClass::Tempered: return 2.0 * std::cos(parameter);
        case SpectralClass::UntemperedPositive: return 2.0 * std::cosh(parameter);
        case SpectralClass::UntemperedNegative: return -2.0 * std::cosh(parameter);
    }
    return 0.0;
}

bool SpectralPoint::within_spectrum(long p) const {
    return is_tempered() || parameter <= log_sqrt_p(p);
}

std::string to_string(SpectralClass c) {
    switch (c) {
        case SpectralClass::Tempered: return "tempered";
        case SpectralClass::UntemperedPositive: return "untempered_positive";
        case SpectralClass::UntemperedNegative: return "untempered_negative";
    }
    return "unknown";
}

// psi[d] = p^(d/2) phi[d] obeys psi[d+1] + psi[d-1] = lambda psi[d] with
// psi[0] = 1, psi[1] = lambda p / (p+1). Untempered points track
// psi[d] e^(-d beta), which stays bounded.
namespace {

std::vector<double> scaled_psi(long p, const SpectralPoint& point, int radius) {
    const double lambda = point.eigenvalue();
    const double decay = point.is_tempered() ? 1.0 : std::exp(-point.parameter);
    std::vector<double> psi(static_cast<std::size_t>(radius) + 1);
    psi[0] = 1.0;
    if (radius >= 1) psi[1] = lambda * static_cast<double>(p) / static_cast<double>(p + 1) * decay;
    for (int d = 1; d < radius; ++d) {
        psi[d + 1] = lambda * decay * psi[d] - decay * decay * psi[d - 1];
    }
    return psi;
}

}  // namespace

std::vector<double> spherical_eigenfunction(long p, const SpectralPoint& point, int radius) {
    if (radius < 0) throw InvalidArgument("radius must be non-negative");
    auto phi = scaled_psi(p, point, radius);
    const double growth = point.is_tempered() ? 0.0 : point.parameter;
    for (int d = 0; d <= radius; ++d) phi[d] *= std::exp(d * (growth - log_sqrt_p(p)));
    return phi;
}

SphericalTransform::SphericalTransform(const RadialFunction& kernel)
    : p_(kernel.p()), support_(kernel.support_radius()) {
    const int n = std::max(support_, 0) + 1;
    weight_.assign(n, 0.0);
    log_weight_.assign(n, -kInf);
    sign_.assign(n, 0);
    if (support_ < 0) return;
    const SphereSizes sizes(p_, support_);
    for (int d = 0; d <= support_; ++d) {
        if (kernel[d].is_zero()) continue;
        AlgebraicNumber w = kernel[d] * AlgebraicNumber(mpq_class(sizes[d])) * inverse_half_power(p_, d);
        weight_[d] = w.to_double();
        log_weight_[d] = w.log_abs();
        sign_[d] = w.sign();
    }
}

double SphericalTransform::operator()(const SpectralPoint& point) const {
    if (support_ < 0) return 0.0;
    const auto psi = scaled_psi(p_, point, support_);
    if (point.is_tempered()) {
        long double acc = 0;
        for (int d = 0; d <= support_; ++d) acc += static_cast<long double>(weight_[d]) * psi[d];
        return static_cast<double>(acc);
    }
    // Terms sign * exp(log|w| + d beta) * psi~[d], summed relative to the largest.
    const double beta = point.parameter;
    std::vector<double> logs(static_cast<std::size_t>(support_) + 1, -kInf);
    double top = -kInf;
    for (int d = 0; d <= support_; ++d) {
        if (sign_[d] == 0 || psi[d] == 0.0) continue;
        logs[d] = log_weight_[d] + d * beta + std::log(std::abs(psi[d]));
        top = std::max(top, logs[d]);
    }
    if (top == -kInf) return 0.0;
    long double acc = 0;
    for (int d = 0; d <= support_; ++d) {
        if (logs[d] == -kInf) continue;
        const int s = sign_[d] * (psi[d] > 0 ? 1 : -1);
        acc += s * std::exp(static_cast<long double>(logs[d] - top));
    }
    if (acc == 0) return 0.0;
    const long double log_mag = std::log(std::fabs(acc)) + top;
    if (log_mag > std::log(std::numeric_limits<double>::max())) return acc > 0 ? kInf : -kInf;
    return static_cast<double>((acc > 0 ? 1 : -1) * std::exp(log_mag));
}

double spherical_transform(const RadialFunction& kernel, const SpectralPoint& point) {
    return SphericalTransform(kernel)(point);
}

double fejer(int order, double x) {
    if (order < 1) throw InvalidArgument("Fejer order must be positive");
    const double s = std::sin(0.5 * x);
    if (std::abs(s) < 1e-6) {
        double acc = 1.0;
        for (int j = 1; j < order; ++j) acc += 2.0 * (1.0 - double(j) / order) * std::cos(j * x);
        return acc;
    }
    const double r = std::sin(0.5 * order * x) / s;
    return r * r / order;
}

double fejer_imaginary(int order, double y) {
    if (order < 1) throw InvalidArgument("Fejer order must be positive");
    y = std::abs(y);
    if (y < 1e-6) {
        double acc = 1.0;
        for (int j = 1; j < order; ++j) acc += 2.0 * (1.0 - double(j) / order) * std::cosh(j * y);
        return acc;
    }
    const double log_value = 2.0 * (log_sinh(0.5 * order * y) - log_sinh(0.5 * y)) - std::log(double(order));
    if (log_value > std::log(std::numeric_limits<double>::max())) return kInf;
    return std::exp(log_value);
}

KernelDesign design_kernel(long p, double eta, int N, double theta0) {
    if (!(eta > 0.0 && eta < 0.5)) throw EtaOutOfRange("eta must lie in (0, 1/2), got " + std::to_string(eta));
    if (!(theta0 >= 0.0 && theta0 <= kPi)) throw InvalidArgument("theta0 must lie in [0, pi]");
    if (!is_prime(p)) throw InvalidArgument("p must be prime, got " + std::to_string(p));
    if (N < 2) throw NTooSmall("N must be at least 2, got " + std::to_string(N));

    KernelDesign d;
    d.p = p;
    d.eta = eta;
    d.N = N;
    d.theta0 = theta0;
    const double endpoint_gap = std::min(theta0, kPi - theta0);
    const double half_window = 0.5 / N;

    if (endpoint_gap <= half_window) {
        // Window around 0 or pi: h = F_L(q theta) - 1 with q even, so both
        // endpoints see the main lobe. L grows until the lobe clears 1/eta
        // across the whole window.
        d.branch = DesignBranch::Simple;
        int L = static_cast<int>(std::ceil(1.0 / eta)) + 1;
        for (;; ++L) {
            const long q = 2 * (N / (2L * L));
            if (q < 2) {
                throw NTooSmall("no even period q = 2 floor(N/2L) >= 2 reaches the window bound (L = " +
                                std::to_string(L) + ", N = " + std::to_string(N) + ")");
            }
            const double edge = q * (endpoint_gap + half_window);
            if (edge <= 2.0 * kPi / L && fejer(L, edge) - 1.0 >= 1.0 / eta) {
                d.L = L;
                d.q = q;
                break;
            }
        }
        d.q_prime = d.q;
        d.fejer_order = d.L;
        for (int j = 1; j < d.L; ++j) d.terms.push_back({static_cast<int>(j * d.q), mpq_class(2 * (d.L - j), d.L)});
    } else {
        d.branch = DesignBranch::Dirichlet;
        d.L = static_cast<int>(std::floor(1.0 / eta));
        d.Q = static_cast<long>(std::ceil(N * eta / 8.0));
        d.q = dirichlet_search(theta0, d.Q);
        const double lo = d.Q * eta / 128.0;
        const double hi = d.Q * eta / 64.0;
        if (d.q >= lo) {
            d.multiplier = 1;
        } else {
            d.multiplier = static_cast<long>(std::ceil(lo / d.q));
            if (d.multiplier * d.q > hi) {
                throw NTooSmall("no multiple of q = " + std::to_string(d.q) + " lies in [Q eta/128, Q eta/64]");
            }
        }
        d.q_prime = 2 * d.multiplier * d.q;
        d.fejer_order = 2 * d.L;
        d.small_multiplier = 2.0 * d.multiplier < d.Q * eta / 32.0;
        d.folded_remainder = static_cast<double>(folded_multiple(d.q_prime, theta0));

        if (d.q_prime < d.Q * eta / 64.0 || d.q_prime > 2 * d.Q) {
            throw NTooSmall("q' = " + std::to_string(d.q_prime) + " outside [Q eta/64, 2Q]");
        }
        if (!(folded_multiple(d.q_prime, theta0) < kPi * eta / 16.0)) {
            throw NTooSmall("|q' theta0 mod 2pi| = " + std::to_string(d.folded_remainder) +
                            " is not below pi eta/16 = " + std::to_string(kPi * eta / 16.0) +
                            " (Q = " + std::to_string(d.Q) + ", q' = " + std::to_string(d.q_prime) + ")");
        }
        if (!(static_cast<double>(d.Q) / N < eta / 6.0)) {
            throw NTooSmall("Q/N = " + std::to_string(double(d.Q) / N) + " is not below eta/6");
        }
        if (2L * d.L * d.q_prime > N) {
            throw NTooSmall("support 2L q' = " + std::to_string(2L * d.L * d.q_prime) + " exceeds N");
        }
        for (int j = 1; j < 2 * d.L; ++j) {
            d.terms.push_back({static_cast<int>(j * d.q_prime), mpq_class(2 * d.L - j, d.L)});
        }
    }
    if (d.branch == DesignBranch::Simple) d.folded_remainder = static_cast<double>(folded_multiple(d.q, theta0));

    d.kernel = RadialFunction(p, N);
    for (auto& term : d.terms) {
        term.weight.canonicalize();
        d.kernel += AlgebraicNumber(term.weight) * propagate_closed_form(p, term.time, N);
    }
    return d;
}

double design_closed_form(const KernelDesign& d, const SpectralPoint& point) {
    const double m = static_cast<double>(d.q_prime);
    if (point.is_tempered()) return fejer(d.fejer_order, m * point.parameter) - 1.0;
    // q' is even, so theta = pi + i beta gives the same value as i beta.
    return fejer_imaginary(d.fejer_order, m * point.parameter) - 1.0;
}

bool PropertyReport::property_lower_bound() const { return min_h_full_spectrum >= -1.0 - 1e-8; }

bool PropertyReport::property_window(double eta) const {
    return std::min(min_h_window, min_h_untempered) >= 1.0 / eta - 1e-8;
}

bool PropertyReport::cross_check_ok() const { return max_cross_check_deviation <= 1e-8; }

bool PropertyReport::all_pass(double eta) const {
    return property_support() && property_decay() && property_lower_bound() && property_window(eta) &&
           cross_check_ok();
}

PropertyReport verify_design(const KernelDesign& d, const GridSizes& grids) {
    PropertyReport r;
    r.grids = grids;
    r.support_radius = d.kernel.support_radius();
    r.support_ok = r.support_radius <= d.N;

    AlgebraicNumber sup(0);
    for (const auto& v : d.kernel.values()) {
        const auto a = abs(v);
        if (sup < a) sup = a;
    }
    const double log_p = std::log(static_cast<double>(d.p));
    r.sup_norm_log = sup.is_zero() ? -kInf : sup.log_abs();
    r.delta_measured = -r.sup_norm_log / (d.N * log_p);
    r.delta_required = d.eta * d.eta / 512.0;
    r.delta_nominal = d.branch == DesignBranch::Simple ? static_cast<double>(d.q) / (2.0 * d.N) : 0.0;
    r.implied_constant = std::exp(r.sup_norm_log + d.N * r.delta_required * log_p);
    r.nonnegativity_analytic = true;

    std::vector<SpectralPoint> points;
    for (int i = 0; i < grids.tempered; ++i) {
        points.push_back(SpectralPoint::tempered(grids.tempered == 1 ? 0.0 : kPi * i / (grids.tempered - 1)));
    }
    const std::size_t untempered_begin = points.size();
    const double beta_max = log_sqrt_p(d.p);
    for (int i = 0; i < grids.untempered_per_sign; ++i) {
        const double beta = beta_max * (i + 1) / (grids.untempered_per_sign + 1);
        points.push_back(SpectralPoint::untempered_positive(beta));
        points.push_back(SpectralPoint::untempered_negative(beta));
    }
    const std::size_t window_begin = points.size();
    r.window_lo = std::max(0.0, d.theta0 - 0.5 / d.N);
    r.window_hi = std::min(kPi, d.theta0 + 0.5 / d.N);
    for (int i = 0; i < grids.window; ++i) {
        const double t = grids.window == 1 ? 0.5 : double(i) / (grids.window - 1);
        points.push_back(SpectralPoint::tempered(r.window_lo + t * (r.window_hi - r.window_lo)));
    }

    const SphericalTransform transform(d.kernel);
    struct Sample {
        double h = 0.0;
        double gap = 0.0;
    };
    const auto samples = parallel_map(points.size(), [&](std::size_t i) {
        const double h = transform(points[i]);
        return Sample{h, relative_gap(h, design_closed_form(d, points[i]))};
    });

    r.min_h_full_spectrum = kInf;
    r.min_h_untempered = kInf;
    r.min_h_window = kInf;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        r.max_cross_check_deviation = std::max(r.max_cross_check_deviation, samples[i].gap);
        if (i < window_begin) r.min_h_full_spectrum = std::min(r.min_h_full_spectrum, samples[i].h);
        if (i >= untempered_begin && i < window_begin) r.min_h_untempered = std::min(r.min_h_untempered, samples[i].h);
        if (i >= window_begin) r.min_h_window = std::min(r.min_h_window, samples[i].h);
    }
    return r;
}

double recurrence_angle(double lambda) {
    if (lambda > 2.0) return 0.0;
    if (lambda < -2.0) return kPi;
    return std::acos(lambda / 2.0);
}

RecurrenceKernel recurrence_kernel(long p, int L, double lambda, bool build_kernel) {
    if (L < 1) throw InvalidArgument("L must be positive");
    if (!is_prime(p)) throw InvalidArgument("p must be prime");
    const double edge = (p + 1) / std::sqrt(static_cast<double>(p));
    if (!(std::abs(lambda) <= edge)) throw OutOfSpectrum("|lambda| exceeds (p+1)/sqrt(p)");

    RecurrenceKernel r;
    r.p = p;
    r.L = L;
    r.lambda = lambda;
    const double angle = recurrence_angle(lambda);
    if (std::abs(lambda) <= 2.0) {
        r.theta = SpectralPoint::tempered(angle);
    } else {
        const double beta = std::acosh(std::abs(lambda) / 2.0);
        r.theta = lambda > 0 ? SpectralPoint::untempered_positive(beta) : SpectralPoint::untempered_negative(beta);
    }
    r.q = first_multiple_within(angle, 100L * L, static_cast<long double>(kPi) / (50.0L * L));
    if (r.q == 0) throw InvalidArgument("recurrence search exhausted 1..100L");
    r.support = 2 * r.q * L;
    for (int l = 1; l <= L; ++l) r.a += cheb_eval(ChebKind::First, static_cast<int>(2 * r.q * l), lambda / 2.0);
    if (build_kernel) {
        RadialFunction k(p, static_cast<int>(r.support));
        for (int l = 1; l <= L; ++l) k += propagate_closed_form(p, static_cast<int>(2 * r.q * l), k.radius());
        r.kernel = std::move(k);
    }
    return r;
}

nlohmann::json to_json(const KernelDesign& d, bool include_kernel) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : d.terms) terms.push_back({{"time", t.time}, {"weight", t.weight.get_str()}});
    nlohmann::json j = {{"p", d.p},
                        {"eta", d.eta},
                        {"N", d.N},
                        {"theta0", d.theta0},
                        {"branch", d.branch == DesignBranch::Simple ? "simple" : "dirichlet"},
                        {"L", d.L},
                        {"Q", d.Q},
                        {"q", d.q},
                        {"l", d.multiplier},
                        {"q_prime", d.q_prime},
                        {"fejer_order", d.fejer_order},
                        {"folded_remainder", d.folded_remainder},
                        {"small_multiplier", d.small_multiplier},
                        {"terms", terms}};
    if (include_kernel) j["kernel"] = to_json(d.kernel);
    return j;
}

nlohmann::json to_json(const PropertyReport& r, double eta) {
    return {{"support_ok", r.support_ok},
            {"support_radius", r.support_radius},
            {"sup_norm_log", r.sup_norm_log},
            {"delta_measured", r.delta_measured},
            {"delta_required", r.delta_required},
            {"delta_nominal", r.delta_nominal},
            {"implied_constant", r.implied_constant},
            {"min_h_full_spectrum", r.min_h_full_spectrum},
            {"min_h_window", r.min_h_window},
            {"min_h_untempered", r.min_h_untempered},
            {"window", {r.window_lo, r.window_hi}},
            {"max_cross_check_deviation", r.max_cross_check_deviation},
            {"nonnegativity", r.nonnegativity_analytic ? "analytic" : "sampled"},
            {"grids",
             {{"tempered", r.grids.tempered},
              {"untempered_per_sign", r.grids.untempered_per_sign},
              {"window", r.grids.window}}},
            {"pass",
             {{"support", r.property_support()},
              {"decay", r.property_decay()},
              {"lower_bound", r.property_lower_bound()},
              {"window", r.property_window(eta)},
              {"cross_check", r.cross_check_ok()},
              {"all", r.all_pass(eta)}}}};
}

nlohmann::json to_json(const RecurrenceKernel& r) {
    nlohmann::json j = {{"p", r.p},
                        {"L", r.L},
                        {"lambda", r.lambda},
                        {"class", to_string(r.theta.cls)},
                        {"parameter", r.theta.parameter},
                        {"q", r.q},
                        {"a", r.a},
                        {"a_over_L", r.a / r.L},
                        {"support", r.support}};
    if (r.kernel) j["kernel"] = to_json(*r.kernel);
    return j;
}

}  // namespace skl
