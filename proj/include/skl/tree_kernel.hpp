#pragma once

#include "skl/tree.hpp"

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace skl {

enum class SpectralClass { Tempered, UntemperedPositive, UntemperedNegative };

/// A point of the T_p spectrum written as lambda = 2 cos theta. Tempered points
/// carry theta in [0, pi]; untempered points carry beta > 0 with theta = i beta
/// (lambda = 2 cosh beta) or theta = pi + i beta (lambda = -2 cosh beta).
struct SpectralPoint {
    SpectralClass cls = SpectralClass::Tempered;
    double parameter = 0.0;

    static SpectralPoint tempered(double theta);
    static SpectralPoint untempered_positive(double beta);
    static SpectralPoint untempered_negative(double beta);

    bool is_tempered() const { return cls == SpectralClass::Tempered; }
    double eigenvalue() const;
    /// True when |lambda| <= (p+1)/sqrt(p).
    bool within_spectrum(long p) const;
};

std::string to_string(SpectralClass c);

/// Root-normalized radial eigenfunction of T_p with eigenvalue 2 cos theta on
/// distances 0..radius. Untempered values are computed without overflow and
/// may underflow to zero at large distance.
std::vector<double> spherical_eigenfunction(long p, const SpectralPoint& point, int radius);

/// Evaluator of h_k(theta) = sum_d k[d] |S_d| phi_theta(d). The exact weights
/// k[d] |S_d| p^(-d/2) are formed once; each evaluation is O(support).
class SphericalTransform {
public:
    explicit SphericalTransform(const RadialFunction& kernel);

    long p() const { return p_; }
    double operator()(const SpectralPoint& point) const;

private:
    long p_;
    int support_;
    std::vector<double> weight_;      // k[d] |S_d| p^(-d/2)
    std::vector<double> log_weight_;  // log |weight|, -inf for zero
    std::vector<int> sign_;
};

double spherical_transform(const RadialFunction& kernel, const SpectralPoint& point);

/// Fejer kernel F_M(x) = (1/M) (sin(Mx/2) / sin(x/2))^2, equal to M at x = 0 mod 2 pi.
double fejer(int order, double x);
/// F_M(i y) = (1/M) (sinh(My/2) / sinh(y/2))^2; +inf once it leaves the double range.
double fejer_imaginary(int order, double y);

enum class DesignBranch { Simple, Dirichlet };

struct FejerTerm {
    int time = 0;      // propagation time n of P_n(T/2) delta_0
    mpq_class weight;  // coefficient in the kernel
};

/// A kernel k_N on the (p+1)-regular tree whose spherical transform is
/// F_L(q theta) - 1 (simple branch) or F_{2L}(q' theta) - 1 (Dirichlet branch).
struct KernelDesign {
    long p = 0;
    double eta = 0.0;
    int N = 0;
    double theta0 = 0.0;
    DesignBranch branch = DesignBranch::Simple;
    int L = 0;
    long Q = 0;            // Dirichlet range; 0 on the simple branch
    long q = 0;            // Dirichlet denominator, or the simple-branch period
    long multiplier = 1;   // l with q' = 2 l q on the Dirichlet branch
    long q_prime = 0;      // frequency multiplier of the Fejer kernel
    int fejer_order = 0;   // L (simple) or 2L (Dirichlet)
    double folded_remainder = 0.0;  // |q' theta0 mod 2 pi|
    bool small_multiplier = true;   // 2l < Q eta / 32, informational
    std::vector<FejerTerm> terms;
    RadialFunction kernel{2, 0};
};

/// Builds the kernel for 0 < eta < 1/2 and theta0 in [0, pi]. Throws
/// EtaOutOfRange, InvalidArgument, or NTooSmall naming the violated condition.
KernelDesign design_kernel(long p, double eta, int N, double theta0);

/// F(q' theta) - 1 in closed form, for any spectral point.
double design_closed_form(const KernelDesign& d, const SpectralPoint& point);

struct GridSizes {
    int tempered = 2048;
    int untempered_per_sign = 512;
    int window = 257;
};

struct PropertyReport {
    bool support_ok = false;
    int support_radius = -1;
    double sup_norm_log = 0.0;       // log ||k||_inf
    double delta_measured = 0.0;     // -log_p ||k||_inf / N
    double delta_required = 0.0;     // eta^2 / 512
    double delta_nominal = 0.0;      // q / 2N on the simple branch, 0 otherwise
    double implied_constant = 0.0;   // ||k||_inf p^(N delta_required)
    double min_h_full_spectrum = 0.0;
    double min_h_window = 0.0;
    double min_h_untempered = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double max_cross_check_deviation = 0.0;  // transform vs closed form, relative
    bool nonnegativity_analytic = false;
    GridSizes grids;

    bool property_support() const { return support_ok; }
    bool property_decay() const { return delta_measured >= delta_required; }
    bool property_lower_bound() const;
    bool property_window(double eta) const;
    bool cross_check_ok() const;
    bool all_pass(double eta) const;
};

PropertyReport verify_design(const KernelDesign& d, const GridSizes& grids = {});

struct RecurrenceKernel {
    long p = 0;
    int L = 0;
    double lambda = 0.0;
    SpectralPoint theta;       // angle used for the search
    long q = 0;
    double a = 0.0;            // sum_{l=1}^L P_{2ql}(lambda/2)
    long support = 0;          // 2 q L
    std::optional<RadialFunction> kernel;
};

/// Finds q in 1..100L with |q theta mod 2 pi| <= pi/(50L) and the amplification
/// a. The exact kernel sum_l P_{2ql}(T/2) delta_0 is built only when asked.
RecurrenceKernel recurrence_kernel(long p, int L, double lambda, bool build_kernel = false);

/// Angle for the recurrence search: arccos(lambda/2) inside [-2, 2], else 0 or pi.
double recurrence_angle(double lambda);

nlohmann::json to_json(const KernelDesign& d, bool include_kernel = false);
nlohmann::json to_json(const PropertyReport& r, double eta);
nlohmann::json to_json(const RecurrenceKernel& r);

}  // namespace skl
