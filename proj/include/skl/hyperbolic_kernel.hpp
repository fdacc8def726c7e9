#pragma once

#include "skl/selberg.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace skl {

/// Shares TruncatedTransform instances between kernels with equal times.
class TransformCache {
public:
    explicit TransformCache(double tol = 1e-12, double r_max = 12.0) : tol_(tol), r_max_(r_max) {}
    std::shared_ptr<const TruncatedTransform> get(double T);

private:
    double tol_;
    double r_max_;
    std::mutex mutex_;
    std::map<double, std::shared_ptr<const TruncatedTransform>> entries_;
};

struct HyperbolicTerm {
    int j = 0;             // index in the Fejer sum
    double weight = 0.0;   // (2L - j) / L
    double time = 0.0;     // 2 j T = j q'
};

/// k_{L,T} = sum_j (2L-j)/L k~_{2jT}, the truncated Selberg kernels combined
/// with Fejer weights so that h_{L,T} ~ (F_{2L}(q' r) - 1) / cosh(pi r / 2).
struct CombinedKernel {
    double eta = 0.0;
    int N = 0;
    SpectralParameter r_target;
    double theta0 = 0.0;   // r_target mod 2 pi, or 0 when untempered
    int L = 0;
    long Q = 0;
    long q = 0;
    long multiplier = 1;
    long q_prime = 0;
    double T = 0.0;        // q' / 2
    double folded_remainder = 0.0;
    bool small_multiplier = true;
    std::vector<HyperbolicTerm> terms;

    double support_radius() const;       // hyperbolic distance 4 * max time
    double stated_support_radius() const;  // 8 L q'
};

/// Throws EtaOutOfRange, InvalidArgument (|r_target| above r_bound or
/// |Im r_target| > 1/2) or NTooSmall naming the violated side condition.
CombinedKernel design_hyperbolic_kernel(double eta, int N, const SpectralParameter& r_target,
                                        double r_bound = 10.0);

/// h_{L,T} through the truncated transforms.
class CombinedTransform {
public:
    CombinedTransform(const CombinedKernel& kernel, TransformCache& cache);
    double value(const SpectralParameter& r) const;
    /// Same combination of the untruncated closed forms h_{2jT}.
    double untruncated(const SpectralParameter& r) const;
    double error_bound() const;

private:
    std::vector<double> weights_;
    std::vector<std::shared_ptr<const TruncatedTransform>> parts_;
};

/// k_{L,T}(t), each term cut off beyond sinh^2(2 * time).
double combined_kernel_value(const CombinedKernel& kernel, double t);

struct HyperbolicGrids {
    int tempered = 1024;
    int untempered = 65;
    int window = 257;
    double r_max = 12.0;
};

struct CombinedReport {
    bool support_ok = false;
    double support_radius = 0.0;
    double sup_norm = 0.0;
    double sup_constant = 0.0;         // sup * e^T
    double sup_exponent = 0.0;         // -log(sup) / T
    double min_h_global = 0.0;
    double lower_constant = 0.0;       // C0 = max(0, -min h)
    double min_h_window = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double window_threshold = 0.0;     // 0.5 / eta
    double window_constant = 0.0;      // min_h_window * eta
    double window_constant_scaled = 0.0;  // window_constant * cosh(pi r / 2), tempered targets
    double min_h_untempered = 0.0;
    double max_truncation_effect = 0.0;   // |h_{L,T} - untruncated combination|
    double quadrature_error = 0.0;
    HyperbolicGrids grids;

    bool window_ok() const;
    bool untempered_ok(int L) const;
    bool lower_ok() const;
    bool all_pass(int L) const;
};

CombinedReport verify_hyperbolic_kernel(const CombinedKernel& kernel, TransformCache& cache,
                                        const HyperbolicGrids& grids = {});

struct TruncationSweep {
    std::vector<double> T;
    std::vector<double> max_deviation;   // over tempered r in [0, 8] and r = i y, y in [0, 1/2]
    std::vector<double> certified;       // 1 / (2 sinh T)
    std::vector<double> quadrature_error;
    double fitted_constant = 0.0;        // max dev * e^T
    Regression fit;                      // log dev vs T
    bool certified_ok = false;           // dev <= certified + quadrature error everywhere
};

TruncationSweep truncation_sweep(const std::vector<double>& Ts, TransformCache& cache);

struct HyperbolicRecurrence {
    SpectralParameter r_star;
    int L = 0;
    long q = 0;
    std::vector<double> term_values;   // h~_{2ql}(r*)
    double h_value = 0.0;
    double amplification = 0.0;        // h / L
    double amplification_scaled = 0.0; // h / L * cosh(pi r / 2) for tempered r*
    double error_bound = 0.0;
};

/// q in 1..100L with |q r* mod 2 pi| <= pi/(50L) (q = 1 for untempered r*),
/// and h(r*) = sum_{l=1}^L h~_{2ql}(r*).
HyperbolicRecurrence recurrence_amplification(const SpectralParameter& r_star, int L, TransformCache& cache);

struct AnnulusValue {
    int index = 0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double value = 0.0;   // 4 pi integral |k|^2 dt over the annulus
    double error = 0.0;
};

struct AnnuliReport {
    long q = 0;
    int L = 0;
    std::vector<AnnulusValue> annuli;
    double max_value = 0.0;
};

/// 4 pi integral_lo^hi |k(t)|^2 dt for k = sum_{l=1}^L k~_{2ql}; 0 when hi <= lo.
AnnulusValue annulus_l2(long q, int L, double lo, double hi, double rel_tol);

/// The annuli A_0 = [0, cosh 2q], A_l = (cosh 2lq, cosh 2(l+1)q], A_L = (cosh 2Lq, sinh^2(4qL)].
AnnuliReport verify_annuli_bounds(long q, int L, double rel_tol = 1e-8);

nlohmann::json to_json(const CombinedKernel& k);
nlohmann::json to_json(const CombinedReport& r, int L);
nlohmann::json to_json(const TruncationSweep& s);
nlohmann::json to_json(const HyperbolicRecurrence& r);
nlohmann::json to_json(const AnnuliReport& r);
nlohmann::json to_json(const SpectralParameter& r);

}  // namespace skl
