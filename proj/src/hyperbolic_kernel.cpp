#include "skl/hyperbolic_kernel.hpp"

#include "skl/angles.hpp"
#include "skl/errors.hpp"
#include "skl/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace skl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cutoff_for(double time) { return std::pow(std::sinh(2.0 * time), 2); }

}  // namespace

std::shared_ptr<const TruncatedTransform> TransformCache::get(double T) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(T); it != entries_.end()) return it->second;
    }
    auto made = std::make_shared<const TruncatedTransform>(T, tol_, r_max_);
    std::lock_guard lock(mutex_);
    return entries_.emplace(T, std::move(made)).first->second;
}

double CombinedKernel::support_radius() const {
    double top = 0.0;
    for (const auto& t : terms) top = std::max(top, t.time);
    return 4.0 * top;
}

double CombinedKernel::stated_support_radius() const { return 8.0 * L * static_cast<double>(q_prime); }

CombinedKernel design_hyperbolic_kernel(double eta, int N, const SpectralParameter& r_target, double r_bound) {
    if (!(eta > 0.0 && eta < 0.5)) throw EtaOutOfRange("eta must lie in (0, 1/2), got " + std::to_string(eta));
    if (N < 2) throw NTooSmall("N must be at least 2");
    if (r_target.imaginary && !(std::abs(r_target.value) <= 0.5)) {
        throw InvalidArgument("untempered targets need |Im r| <= 1/2");
    }
    if (!r_target.imaginary && !(std::abs(r_target.value) <= r_bound)) {
        throw InvalidArgument("|r_target| exceeds the configured bound " + std::to_string(r_bound));
    }

    CombinedKernel k;
    k.eta = eta;
    k.N = N;
    k.r_target = r_target;
    k.theta0 = r_target.imaginary ? 0.0 : std::fmod(std::abs(r_target.value), 2.0 * kPi);
    k.L = static_cast<int>(std::ceil(1.0 / eta));
    k.Q = static_cast<long>(std::ceil(N * eta / 8.0));
    k.q = dirichlet_search(k.theta0, k.Q);
    const double lo = k.Q * eta / 128.0;
    const double hi = k.Q * eta / 64.0;
    if (k.q < lo) {
        k.multiplier = static_cast<long>(std::ceil(lo / k.q));
        if (k.multiplier * k.q > hi) {
            throw NTooSmall("no multiple of q = " + std::to_string(k.q) + " lies in [Q eta/128, Q eta/64]");
        }
    }
    k.q_prime = 2 * k.multiplier * k.q;
    k.T = 0.5 * static_cast<double>(k.q_prime);
    k.small_multiplier = 2.0 * k.multiplier < k.Q * eta / 32.0;
    k.folded_remainder = static_cast<double>(folded_multiple(k.q_prime, k.theta0));

    if (k.q_prime < k.Q * eta / 64.0 || k.q_prime > 2 * k.Q) {
        throw NTooSmall("q' = " + std::to_string(k.q_prime) + " outside [Q eta/64, 2Q]");
    }
    if (!(folded_multiple(k.q_prime, k.theta0) < kPi * eta / 16.0)) {
        throw NTooSmall("|q' r mod 2pi| = " + std::to_string(k.folded_remainder) + " is not below pi eta/16 = " +
                        std::to_string(kPi * eta / 16.0) + " (Q = " + std::to_string(k.Q) +
                        ", q' = " + std::to_string(k.q_prime) + ")");
    }
    if (!(static_cast<double>(k.Q) / N < eta / 6.0)) {
        throw NTooSmall("Q/N = " + std::to_string(double(k.Q) / N) + " is not below eta/6");
    }
    if (!(k.stated_support_radius() < 2.0 * N)) {
        throw NTooSmall("support radius 8 L q' = " + std::to_string(k.stated_support_radius()) +
                        " is not below 2N = " + std::to_string(2 * N));
    }
    for (int j = 1; j < 2 * k.L; ++j) {
        k.terms.push_back({j, double(2 * k.L - j) / k.L, static_cast<double>(j * k.q_prime)});
    }
    return k;
}

CombinedTransform::CombinedTransform(const CombinedKernel& kernel, TransformCache& cache) {
    for (const auto& t : kernel.terms) {
        weights_.push_back(t.weight);
        parts_.push_back(cache.get(t.time));
    }
}

double CombinedTransform::value(const SpectralParameter& r) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) acc += weights_[i] * parts_[i]->value(r);
    return acc;
}

double CombinedTransform::untruncated(const SpectralParameter& r) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) acc += weights_[i] * profile_h(parts_[i]->T(), r);
    return acc;
}

double CombinedTransform::error_bound() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) acc += std::abs(weights_[i]) * parts_[i]->error_bound();
    return acc;
}

double combined_kernel_value(const CombinedKernel& kernel, double t) {
    double acc = 0.0;
    for (const auto& term : kernel.terms) {
        if (t <= cutoff_for(term.time)) acc += term.weight * kernel_k(term.time, t, 1e-10).value;
    }
    return acc;
}

bool CombinedReport::window_ok() const { return min_h_window >= window_threshold; }
bool CombinedReport::untempered_ok(int L) const { return min_h_untempered > L; }
bool CombinedReport::lower_ok() const { return std::isfinite(lower_constant); }
bool CombinedReport::all_pass(int L) const {
    return support_ok && std::isfinite(sup_constant) && lower_ok() && window_ok() && untempered_ok(L);
}

CombinedReport verify_hyperbolic_kernel(const CombinedKernel& kernel, TransformCache& cache,
                                        const HyperbolicGrids& grids) {
    CombinedReport rep;
    rep.grids = grids;
    rep.support_radius = kernel.support_radius();
    rep.support_ok = rep.support_radius <= kernel.stated_support_radius() && kernel.stated_support_radius() < 2.0 * kernel.N;

    // Sup norm over a log-spaced scan of the support, refined around the peak.
    double top_cutoff = 0.0;
    for (const auto& t : kernel.terms) top_cutoff = std::max(top_cutoff, cutoff_for(t.time));
    const double x_top = std::log1p(std::min(top_cutoff, 1e300));
    const int scan = 400;
    const auto mags = parallel_map(static_cast<std::size_t>(scan + 1), [&](std::size_t i) {
        return std::abs(combined_kernel_value(kernel, std::expm1(x_top * double(i) / scan)));
    });
    const auto best = static_cast<int>(std::max_element(mags.begin(), mags.end()) - mags.begin());
    rep.sup_norm = mags[best];
    {
        double lo = x_top * std::max(best - 1, 0) / scan;
        double hi = x_top * std::min(best + 1, scan) / scan;
        for (int it = 0; it < 40; ++it) {
            const double a = lo + (hi - lo) / 3.0;
            const double b = hi - (hi - lo) / 3.0;
            const double fa = std::abs(combined_kernel_value(kernel, std::expm1(a)));
            const double fb = std::abs(combined_kernel_value(kernel, std::expm1(b)));
            rep.sup_norm = std::max({rep.sup_norm, fa, fb});
            if (fa > fb) {
                hi = b;
            } else {
                lo = a;
            }
        }
    }
    rep.sup_constant = rep.sup_norm * std::exp(kernel.T);
    rep.sup_exponent = -std::log(rep.sup_norm) / kernel.T;

    const CombinedTransform h(kernel, cache);
    rep.quadrature_error = h.error_bound();

    std::vector<SpectralParameter> global;
    for (int i = 0; i < grids.tempered; ++i) {
        global.push_back(SpectralParameter::real(grids.r_max * i / std::max(grids.tempered - 1, 1)));
    }
    const std::size_t untempered_begin = global.size();
    for (int i = 0; i < grids.untempered; ++i) {
        global.push_back(SpectralParameter::imag(0.5 * i / std::max(grids.untempered - 1, 1)));
    }
    const std::size_t window_begin = global.size();
    const double half = 0.5 / kernel.N;
    const double center = kernel.r_target.value;
    rep.window_lo = kernel.r_target.imaginary ? std::max(-0.5, center - half) : center - half;
    rep.window_hi = kernel.r_target.imaginary ? std::min(0.5, center + half) : center + half;
    for (int i = 0; i < grids.window; ++i) {
        const double v = rep.window_lo + (rep.window_hi - rep.window_lo) * i / std::max(grids.window - 1, 1);
        global.push_back(kernel.r_target.imaginary ? SpectralParameter::imag(v) : SpectralParameter::real(v));
    }

    struct Sample {
        double value = 0.0;
        double effect = 0.0;
    };
    const auto samples = parallel_map(global.size(), [&](std::size_t i) {
        const double v = h.value(global[i]);
        return Sample{v, std::abs(v - h.untruncated(global[i]))};
    });
    rep.min_h_global = kInf;
    rep.min_h_untempered = kInf;
    rep.min_h_window = kInf;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        rep.max_truncation_effect = std::max(rep.max_truncation_effect, samples[i].effect);
        if (i < window_begin) rep.min_h_global = std::min(rep.min_h_global, samples[i].value);
        if (i >= untempered_begin && i < window_begin) rep.min_h_untempered = std::min(rep.min_h_untempered, samples[i].value);
        if (i >= window_begin) rep.min_h_window = std::min(rep.min_h_window, samples[i].value);
    }
    rep.lower_constant = std::max(0.0, -rep.min_h_global);
    rep.window_threshold = 0.5 / kernel.eta;
    rep.window_constant = rep.min_h_window * kernel.eta;
    rep.window_constant_scaled =
        kernel.r_target.imaginary ? rep.window_constant
                                  : rep.window_constant * std::cosh(0.5 * kPi * kernel.r_target.value);
    return rep;
}

TruncationSweep truncation_sweep(const std::vector<double>& Ts, TransformCache& cache) {
    TruncationSweep s;
    s.T = Ts;
    s.certified_ok = true;
    std::vector<double> fit_x, fit_y;
    for (double T : Ts) {
        const auto tt = cache.get(T);
        double dev = 0.0;
        for (int i = 0; i < 64; ++i) dev = std::max(dev, std::abs(tt->deviation(SpectralParameter::real(8.0 * i / 63))));
        for (int i = 0; i <= 16; ++i) dev = std::max(dev, std::abs(tt->deviation(SpectralParameter::imag(0.5 * i / 16))));
        s.max_deviation.push_back(dev);
        s.certified.push_back(tt->certified_bound());
        s.quadrature_error.push_back(tt->quadrature_error());
        s.fitted_constant = std::max(s.fitted_constant, dev * std::exp(T));
        if (dev > tt->certified_bound() + tt->quadrature_error()) s.certified_ok = false;
        if (dev > 0.0) {
            fit_x.push_back(T);
            fit_y.push_back(std::log(dev));
        }
    }
    if (fit_x.size() >= 2) s.fit = fit_line(fit_x, fit_y);
    return s;
}

HyperbolicRecurrence recurrence_amplification(const SpectralParameter& r_star, int L, TransformCache& cache) {
    if (L < 2) throw InvalidArgument("recurrence amplification needs L >= 2");
    if (r_star.imaginary && !(std::abs(r_star.value) <= 0.5)) throw InvalidArgument("untempered r needs |Im r| <= 1/2");
    HyperbolicRecurrence rec;
    rec.r_star = r_star;
    rec.L = L;
    if (r_star.imaginary) {
        rec.q = 1;
    } else {
        rec.q = first_multiple_within(std::abs(r_star.value), 100L * L, static_cast<long double>(kPi) / (50.0L * L));
        if (rec.q == 0) throw InvalidArgument("recurrence search exhausted 1..100L");
    }
    for (int l = 1; l <= L; ++l) {
        const auto tt = cache.get(2.0 * static_cast<double>(rec.q) * l);
        rec.term_values.push_back(tt->value(r_star));
        rec.h_value += rec.term_values.back();
        rec.error_bound += tt->error_bound();
    }
    rec.amplification = rec.h_value / L;
    rec.amplification_scaled =
        r_star.imaginary ? rec.amplification : rec.amplification * std::cosh(0.5 * kPi * r_star.value);
    return rec;
}

AnnulusValue annulus_l2(long q, int L, double lo, double hi, double rel_tol) {
    AnnulusValue out;
    out.t_lo = lo;
    out.t_hi = hi;
    if (!(hi > lo)) return out;
    std::vector<double> times, cutoffs;
    for (int l = 1; l <= L; ++l) {
        times.push_back(2.0 * static_cast<double>(q) * l);
        cutoffs.push_back(cutoff_for(times.back()));
    }
    auto kernel = [&](double t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (t <= cutoffs[i]) acc += kernel_k(times[i], t, 1e-10).value;
        }
        return acc;
    };
    std::vector<double> breaks{lo};
    if (lo < 1.0 && hi > 1.0) breaks.push_back(1.0);
    for (double c : cutoffs) {
        if (c > lo && c < hi) breaks.push_back(c);
    }
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        QuadResult piece;
        if (b <= 1.0) {
            piece = integrate([&](double t) { return std::pow(kernel(t), 2); }, a, b, rel_tol);
        } else {
            // t = e^x
            const double xa = std::log(a);
            const double xb = std::log(b);
            const int panels = std::max(1, static_cast<int>(std::ceil((xb - xa) / 4.0)));
            piece = integrate(
                [&](double x) {
                    // Stay inside [a, b] so the cutoff at an endpoint is honoured.
                    const double t = std::clamp(std::exp(x), a, b);
                    return std::pow(kernel(t), 2) * t;
                },
                xa, xb, rel_tol, panels);
        }
        out.value += 4.0 * kPi * piece.value;
        out.error += 4.0 * kPi * piece.error;
    }
    return out;
}

AnnuliReport verify_annuli_bounds(long q, int L, double rel_tol) {
    if (q < 1 || L < 1) throw InvalidArgument("annuli need q >= 1 and L >= 1");
    AnnuliReport rep;
    rep.q = q;
    rep.L = L;
    std::vector<std::pair<double, double>> ranges;
    ranges.emplace_back(0.0, std::cosh(2.0 * q));
    for (int l = 1; l < L; ++l) ranges.emplace_back(std::cosh(2.0 * l * q), std::cosh(2.0 * (l + 1) * q));
    ranges.emplace_back(std::cosh(2.0 * L * q), std::pow(std::sinh(4.0 * q * L), 2));
    rep.annuli = parallel_map(ranges.size(), [&](std::size_t i) {
        auto a = annulus_l2(q, L, ranges[i].first, ranges[i].second, rel_tol);
        a.index = static_cast<int>(i);
        return a;
    });
    for (const auto& a : rep.annuli) rep.max_value = std::max(rep.max_value, a.value);
    return rep;
}

nlohmann::json to_json(const SpectralParameter& r) {
    return {{"value", r.value}, {"imaginary", r.imaginary}};
}

nlohmann::json to_json(const CombinedKernel& k) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : k.terms) terms.push_back({{"j", t.j}, {"weight", t.weight}, {"time", t.time}});
    return {{"eta", k.eta},
            {"N", k.N},
            {"r_target", to_json(k.r_target)},
            {"theta0", k.theta0},
            {"L", k.L},
            {"Q", k.Q},
            {"q", k.q},
            {"l", k.multiplier},
            {"q_prime", k.q_prime},
            {"T", k.T},
            {"folded_remainder", k.folded_remainder},
            {"small_multiplier", k.small_multiplier},
            {"support_radius", k.support_radius()},
            {"stated_support_radius", k.stated_support_radius()},
            {"terms", terms}};
}

nlohmann::json to_json(const CombinedReport& r, int L) {
    return {{"support_ok", r.support_ok},
            {"support_radius", r.support_radius},
            {"sup_norm", r.sup_norm},
            {"sup_constant", r.sup_constant},
            {"sup_exponent", r.sup_exponent},
            {"min_h_global", r.min_h_global},
            {"lower_constant", r.lower_constant},
            {"min_h_window", r.min_h_window},
            {"window", {r.window_lo, r.window_hi}},
            {"window_threshold", r.window_threshold},
            {"window_constant", r.window_constant},
            {"window_constant_scaled", r.window_constant_scaled},
            {"min_h_untempered", r.min_h_untempered},
            {"max_truncation_effect", r.max_truncation_effect},
            {"quadrature_error", r.quadrature_error},
            {"grids",
             {{"tempered", r.grids.tempered},
              {"untempered", r.grids.untempered},
              {"window", r.grids.window},
              {"r_max", r.grids.r_max}}},
            {"pass",
             {{"support", r.support_ok},
              {"sup_norm", std::isfinite(r.sup_constant)},
              {"lower_bound", r.lower_ok()},
              {"window", r.window_ok()},
              {"untempered", r.untempered_ok(L)},
              {"all", r.all_pass(L)}}}};
}

nlohmann::json to_json(const TruncationSweep& s) {
    return {{"T_sweep", s.T},
            {"max_deviation", s.max_deviation},
            {"certified_bound", s.certified},
            {"quadrature_error", s.quadrature_error},
            {"fitted_constant", s.fitted_constant},
            {"fitted_exponent", s.fit.slope},
            {"certified_ok", s.certified_ok}};
}

nlohmann::json to_json(const HyperbolicRecurrence& r) {
    return {{"r_star", to_json(r.r_star)},
            {"L", r.L},
            {"q", r.q},
            {"term_values", r.term_values},
            {"h_value", r.h_value},
            {"amplification", r.amplification},
            {"amplification_scaled", r.amplification_scaled},
            {"error_bound", r.error_bound}};
}

nlohmann::json to_json(const AnnuliReport& r) {
    nlohmann::json annuli = nlohmann::json::array();
    for (const auto& a : r.annuli) {
        annuli.push_back({{"index", a.index}, {"t_lo", a.t_lo}, {"t_hi", a.t_hi}, {"value", a.value}, {"error", a.error}});
    }
    return {{"q", r.q}, {"L", r.L}, {"annuli", annuli}, {"max_value", r.max_value}};
}

}  // namespace skl
