#pragma once

#include "skl/tree_kernel.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skl {

/// Laplace components are indexed by a spectral parameter r >= 0 (eigenvalue
/// -(1/4 + r^2)); Hecke components by a T_p eigenvalue.
enum class Convention { Laplace, Hecke };

std::string to_string(Convention c);

struct Component {
    double parameter = 0.0;
    double coefficient = 0.0;
};

/// A finite spectral expansion of a quasimode. Components are sorted by
/// parameter, parameters are distinct and the coefficients have unit l2 norm.
class SpectralDecomposition {
public:
    /// Merges equal parameters in quadrature and rescales to unit norm.
    /// Hecke decompositions need p and every eigenvalue inside the spectrum.
    static SpectralDecomposition laplace(std::vector<Component> components);
    static SpectralDecomposition hecke(long p, std::vector<Component> components);

    Convention convention() const { return convention_; }
    std::optional<long> prime() const { return p_; }
    const std::vector<Component>& components() const { return components_; }
    double mass() const;

private:
    SpectralDecomposition(Convention c, std::optional<long> p, std::vector<Component> components);

    Convention convention_;
    std::optional<long> p_;
    std::vector<Component> components_;
};

struct Window {
    double center = 0.0;
    double half_width = 0.0;

    Window(double center, double half_width);
    bool contains(double x) const { return x >= center - half_width && x <= center + half_width; }
};

/// ||(Delta + 1/4 + r^2) psi|| = sqrt(sum c_i^2 (r^2 - r_i^2)^2).
double laplace_defect(const SpectralDecomposition& psi, double r);
/// ||(T_p - lambda) psi|| = sqrt(sum c_i^2 (lambda_i - lambda)^2).
double hecke_defect(const SpectralDecomposition& psi, double lambda);

/// True when the Laplace defect is at most r omega ||psi||.
bool is_laplace_quasimode(const SpectralDecomposition& psi, double r, double omega);

struct WindowProjection {
    std::vector<Component> inside;  // unnormalized
    double inside_mass = 0.0;
    double outside_mass = 0.0;
};

WindowProjection project_window(const SpectralDecomposition& psi, const Window& w);

struct ProjectionReport {
    double r = 0.0;
    double omega = 0.0;
    double defect = 0.0;
    double outside_mass = 0.0;
    double gap = 0.0;    // 2 omega r - omega^2
    double bound = 0.0;  // (defect / gap)^2
    double ratio = 0.0;  // outside_mass / bound, 0 when both vanish
    bool holds = false;
};

/// Checks outside_mass <= (defect / (2 omega r - omega^2))^2 for the window
/// [r - omega, r + omega]. Throws DegenerateWindow when 2 omega r <= omega^2.
ProjectionReport verify_projection_bound(const SpectralDecomposition& psi, double r, double omega);

/// Case split theta = arccos(lambda/2), 0 above the tempered range and pi
/// below it; the untempered beta is arccosh(|lambda|/2).
SpectralPoint hecke_theta(double lambda, long p);

/// Applying a radial kernel with transform h to psi, compared against the
/// scalar h(theta(lambda)). lipschitz is measured over the components.
struct KernelApplication {
    double lambda = 0.0;
    double h_at_lambda = 0.0;
    double residual = 0.0;  // ||K psi - h(theta(lambda)) psi||
    double defect = 0.0;    // hecke_defect(psi, lambda)
    double lipschitz = 0.0;
    bool lipschitz_bound_holds = false;  // residual <= lipschitz * defect
};

KernelApplication apply_kernel(const SpectralDecomposition& psi, const SphericalTransform& h, double lambda);

struct TrialConfig {
    std::uint64_t seed = 1;
    int trials = 1000;
    int components = 50;
    double r_lo = 10.0;
    double r_hi = 100.0;
    double omega_lo = 0.01;
    double omega_hi = 1.0;
    /// Negative control: the first trial reports a zero defect, so any mass
    /// outside its window breaks the bound.
    bool inject_fault = false;
};

struct TrialSummary {
    TrialConfig config;
    int passed = 0;
    int failed = 0;
    double max_ratio = 0.0;
    double mean_outside_mass = 0.0;
    std::vector<ProjectionReport> failures;
};

/// Random Laplace decompositions concentrated near a random r, checked against
/// the projection bound. Reproducible from the seed.
TrialSummary run_projection_trials(const TrialConfig& config);

/// One component just past the window edge, one at r. Returns the report so
/// the tightness ratio can be inspected.
ProjectionReport adversarial_projection(double r, double omega, double outside_mass, double overshoot);

nlohmann::json to_json(const SpectralDecomposition& psi);
SpectralDecomposition decomposition_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProjectionReport& r);
nlohmann::json to_json(const KernelApplication& k);
nlohmann::json to_json(const TrialSummary& s);

}  // namespace skl
