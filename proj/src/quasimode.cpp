#include "skl/quasimode.hpp"

#include "skl/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace skl {

namespace {

// Relative slack for rounding in the squared quantities of the projection bound.
constexpr double kRoundingSlack = 1e-12;

std::vector<Component> normalize(std::vector<Component> comps) {
    for (const auto& c : comps) {
        if (!std::isfinite(c.parameter) || !std::isfinite(c.coefficient)) {
            throw InvalidArgument("decomposition entries must be finite");
        }
    }
    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) { return a.parameter < b.parameter; });
    std::vector<Component> merged;
    for (const auto& c : comps) {
        if (!merged.empty() && merged.back().parameter == c.parameter) {
            merged.back().coefficient = std::hypot(merged.back().coefficient, c.coefficient);
        } else {
            merged.push_back(c);
        }
    }
    double norm2 = 0.0;
    for (const auto& c : merged) norm2 += c.coefficient * c.coefficient;
    if (!(norm2 > 0.0)) throw InvalidArgument("decomposition has zero norm");
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& c : merged) c.coefficient *= scale;
    return merged;
}

}  // namespace

std::string to_string(Convention c) { return c == Convention::Laplace ? "laplace" : "hecke"; }

SpectralDecomposition::SpectralDecomposition(Convention c, std::optional<long> p, std::vector<Component> components)
    : convention_(c), p_(p), components_(normalize(std::move(components))) {}

SpectralDecomposition SpectralDecomposition::laplace(std::vector<Component> components) {
    for (const auto& c : components) {
        if (c.parameter < 0.0) throw InvalidArgument("Laplace spectral parameters must be nonnegative");
    }
    return {Convention::Laplace, std::nullopt, std::move(components)};
}

SpectralDecomposition SpectralDecomposition::hecke(long p, std::vector<Component> components) {
    if (p < 2) throw InvalidArgument("p must be at least 2");
    const double edge = (p + 1) / std::sqrt(static_cast<double>(p));
    for (const auto& c : components) {
        if (std::abs(c.parameter) > edge) {
            throw OutOfSpectrum("eigenvalue " + std::to_string(c.parameter) + " exceeds (p+1)/sqrt(p)");
        }
    }
    return {Convention::Hecke, p, std::move(components)};
}

double SpectralDecomposition::mass() const {
    double m = 0.0;
    for (const auto& c : components_) m += c.coefficient * c.coefficient;
    return m;
}

Window::Window(double center_, double half_width_) : center(center_), half_width(half_width_) {
    if (!(half_width > 0.0)) throw InvalidArgument("window half width must be positive");
}

double laplace_defect(const SpectralDecomposition& psi, double r) {
    if (psi.convention() != Convention::Laplace) throw ConventionMismatch("laplace_defect needs a Laplace decomposition");
    double acc = 0.0;
    for (const auto& c : psi.components()) {
        // r^2 - r_i^2 factored to avoid cancellation near r_i = r.
        const double d = c.coefficient * (r - c.parameter) * (r + c.parameter);
        acc += d * d;
    }
    return std::sqrt(acc);
}

double hecke_defect(const SpectralDecomposition& psi, double lambda) {
    if (psi.convention() != Convention::Hecke) throw ConventionMismatch("hecke_defect needs a Hecke decomposition");
    double acc = 0.0;
    for (const auto& c : psi.components()) {
        const double d = c.coefficient * (c.parameter - lambda);
        acc += d * d;
    }
    return std::sqrt(acc);
}

bool is_laplace_quasimode(const SpectralDecomposition& psi, double r, double omega) {
    return laplace_defect(psi, r) <= r * omega * std::sqrt(psi.mass());
}

WindowProjection project_window(const SpectralDecomposition& psi, const Window& w) {
    WindowProjection out;
    for (const auto& c : psi.components()) {
        const double m = c.coefficient * c.coefficient;
        if (w.contains(c.parameter)) {
            out.inside.push_back(c);
            out.inside_mass += m;
        } else {
            out.outside_mass += m;
        }
    }
    return out;
}

ProjectionReport verify_projection_bound(const SpectralDecomposition& psi, double r, double omega) {
    if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
    ProjectionReport rep;
    rep.r = r;
    rep.omega = omega;
    rep.gap = omega * (2.0 * r - omega);
    if (!(rep.gap > 0.0)) {
        throw DegenerateWindow("2 omega r <= omega^2 for r = " + std::to_string(r) + ", omega = " + std::to_string(omega));
    }
    rep.defect = laplace_defect(psi, r);
    rep.outside_mass = project_window(psi, Window(r, omega)).outside_mass;
    const double q = rep.defect / rep.gap;
    rep.bound = q * q;
    rep.ratio = rep.bound > 0.0 ? rep.outside_mass / rep.bound : (rep.outside_mass > 0.0 ? INFINITY : 0.0);
    rep.holds = rep.outside_mass <= rep.bound * (1.0 + kRoundingSlack);
    return rep;
}

SpectralPoint hecke_theta(double lambda, long p) {
    if (p < 2) throw InvalidArgument("p must be at least 2");
    const double edge = (p + 1) / std::sqrt(static_cast<double>(p));
    if (!(std::abs(lambda) <= edge)) {
        throw OutOfSpectrum("eigenvalue " + std::to_string(lambda) + " exceeds (p+1)/sqrt(p)");
    }
    if (lambda > 2.0) return SpectralPoint::untempered_positive(std::acosh(lambda / 2.0));
    if (lambda < -2.0) return SpectralPoint::untempered_negative(std::acosh(-lambda / 2.0));
    return SpectralPoint::tempered(std::acos(lambda / 2.0));
}

KernelApplication apply_kernel(const SpectralDecomposition& psi, const SphericalTransform& h, double lambda) {
    if (psi.convention() != Convention::Hecke) throw ConventionMismatch("apply_kernel needs a Hecke decomposition");
    if (*psi.prime() != h.p()) throw MismatchedTree("kernel and decomposition use different p");
    KernelApplication out;
    out.lambda = lambda;
    out.h_at_lambda = h(hecke_theta(lambda, h.p()));
    out.defect = hecke_defect(psi, lambda);
    double acc = 0.0;
    for (const auto& c : psi.components()) {
        const double diff = h(hecke_theta(c.parameter, h.p())) - out.h_at_lambda;
        acc += c.coefficient * c.coefficient * diff * diff;
        if (c.parameter != lambda) out.lipschitz = std::max(out.lipschitz, std::abs(diff) / std::abs(c.parameter - lambda));
    }
    out.residual = std::sqrt(acc);
    out.lipschitz_bound_holds = out.residual <= out.lipschitz * out.defect * (1.0 + kRoundingSlack) + 1e-300;
    return out;
}

TrialSummary run_projection_trials(const TrialConfig& config) {
    if (config.trials < 1 || config.components < 1) throw InvalidArgument("trial counts must be positive");
    if (!(config.r_lo > 0.0 && config.r_hi >= config.r_lo && config.omega_lo > 0.0 && config.omega_hi >= config.omega_lo)) {
        throw InvalidArgument("trial ranges must be nonempty and positive");
    }
    TrialSummary s;
    s.config = config;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double outside_total = 0.0;
    for (int trial = 0; trial < config.trials; ++trial) {
        const double r = config.r_lo + (config.r_hi - config.r_lo) * unit(rng);
        const double omega = config.omega_lo + (config.omega_hi - config.omega_lo) * unit(rng);
        // Parameters spread over a few window widths so both sides are populated.
        const double spread = 4.0 * omega * (0.25 + 2.0 * unit(rng));
        std::vector<Component> comps;
        for (int i = 0; i < config.components; ++i) {
            const double param = std::max(0.0, r + spread * (2.0 * unit(rng) - 1.0));
            comps.push_back({param, 2.0 * unit(rng) - 1.0});
        }
        const auto psi = SpectralDecomposition::laplace(std::move(comps));
        auto rep = verify_projection_bound(psi, r, omega);
        if (config.inject_fault && trial == 0) {
            rep.defect = 0.0;
            rep.bound = 0.0;
            rep.ratio = rep.outside_mass > 0.0 ? INFINITY : 0.0;
            rep.holds = rep.outside_mass == 0.0;
        }
        outside_total += rep.outside_mass;
        if (std::isfinite(rep.ratio)) s.max_ratio = std::max(s.max_ratio, rep.ratio);
        if (rep.holds) {
            ++s.passed;
        } else {
            ++s.failed;
            s.failures.push_back(rep);
        }
    }
    s.mean_outside_mass = outside_total / config.trials;
    return s;
}

ProjectionReport adversarial_projection(double r, double omega, double outside_mass, double overshoot) {
    if (!(outside_mass > 0.0 && outside_mass < 1.0 && overshoot > 0.0)) {
        throw InvalidArgument("adversarial construction needs 0 < outside_mass < 1 and overshoot > 0");
    }
    const auto psi = SpectralDecomposition::laplace(
        {{r, std::sqrt(1.0 - outside_mass)}, {r + omega + overshoot, std::sqrt(outside_mass)}});
    return verify_projection_bound(psi, r, omega);
}

nlohmann::json to_json(const SpectralDecomposition& psi) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : psi.components()) comps.push_back({c.parameter, c.coefficient});
    nlohmann::json j = {{"convention", to_string(psi.convention())}, {"components", comps}};
    if (psi.prime()) j["p"] = *psi.prime();
    return j;
}

SpectralDecomposition decomposition_from_json(const nlohmann::json& j) {
    try {
        std::vector<Component> comps;
        for (const auto& c : j.at("components")) comps.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        const auto conv = j.at("convention").get<std::string>();
        if (conv == "laplace") return SpectralDecomposition::laplace(std::move(comps));
        if (conv == "hecke") return SpectralDecomposition::hecke(j.at("p").get<long>(), std::move(comps));
        throw InvalidArgument("unknown convention '" + conv + "'");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed decomposition: ") + e.what());
    }
}

nlohmann::json to_json(const ProjectionReport& r) {
    return {{"r", r.r},
            {"omega", r.omega},
            {"defect", r.defect},
            {"outside_mass", r.outside_mass},
            {"gap", r.gap},
            {"bound", r.bound},
            {"ratio", std::isfinite(r.ratio) ? nlohmann::json(r.ratio) : nlohmann::json("inf")},
            {"holds", r.holds}};
}

nlohmann::json to_json(const KernelApplication& k) {
    return {{"lambda", k.lambda},
            {"h_at_lambda", k.h_at_lambda},
            {"residual", k.residual},
            {"defect", k.defect},
            {"lipschitz", k.lipschitz},
            {"lipschitz_bound_holds", k.lipschitz_bound_holds}};
}

nlohmann::json to_json(const TrialSummary& s) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : s.failures) failures.push_back(to_json(f));
    return {{"seed", s.config.seed},
            {"inject_fault", s.config.inject_fault},
            {"trials", s.config.trials},
            {"components", s.config.components},
            {"r_range", {s.config.r_lo, s.config.r_hi}},
            {"omega_range", {s.config.omega_lo, s.config.omega_hi}},
            {"passed", s.passed},
            {"failed", s.failed},
            {"max_ratio", s.max_ratio},
            {"mean_outside_mass", s.mean_outside_mass},
            {"failures", failures}};
}

}  // namespace skl
