#pragma once

#include "skl/quadrature.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <limits>
#include <vector>

namespace skl {

/// Spectral parameter r of the hyperbolic Laplacian (eigenvalue 1/4 + r^2):
/// real r, or r = i y with |y| <= 1/2 for the untempered part.
struct SpectralParameter {
    double value = 0.0;
    bool imaginary = false;

    static SpectralParameter real(double r) { return {r, false}; }
    static SpectralParameter imag(double y) { return {y, true}; }

    /// Fourier weight e^{iru} symmetrized: cos(r u), or cosh(y u) when r = i y.
    double fourier_weight(double u) const;
};

// The (h_T, g_T, Q_T) family in its literal closed form. These satisfy
// g_T = 2 Q_T(sinh^2(u/2)) and integral of g_T = 2 pi, so the transform of
// g_T is 2 pi h_T; kernel_k divides by 2 pi to pair exactly with h_T.
double profile_h(double T, const SpectralParameter& r);
double profile_g(double T, double u);
double profile_q(double T, double omega);
double profile_q_derivative(double T, double omega);

/// Normalization between the literal g_T and the g whose transform is h_T.
inline constexpr double kSelbergNormalization = 6.283185307179586476925286766559;

/// Upper bound |Q_T'(omega)| <= cosh T / (2 (omega + 1/2)^2) for the literal profile.
double profile_q_derivative_bound(double T, double omega);

/// Decay of an even profile g: |g(u)| <= coeff * exp(-rate * u) for u >= from,
/// and g = 0 beyond support_end.
struct EvenProfile {
    RealFunction g;
    double support_end = std::numeric_limits<double>::infinity();
    double decay_from = 0.0;
    double decay_coeff = 0.0;
    double decay_rate = 1.0;
};

/// g_T / (2 pi) with its certified exponential envelope.
EvenProfile selberg_profile(double T);

/// h(r) = 2 * integral_0^inf w_r(u) g(u) du, with the infinite range cut where
/// the certified envelope drops below tol.
QuadResult fourier_h(const EvenProfile& profile, const SpectralParameter& r, double tol);

/// Decay envelope |k(t)| <= coeff (t + 1/2)^(-3/2), or compact support.
struct KernelDecay {
    double support_end = std::numeric_limits<double>::infinity();
    double coeff = 0.0;
};

/// Q(omega) = integral_omega^inf k(t) (t - omega)^(-1/2) dt = 2 integral_0^inf k(omega + s^2) ds.
QuadResult abel_forward(const RealFunction& k, double omega, const KernelDecay& decay, double rel_tol);

/// k(t) = -(1/pi) integral_0^inf v^(-1/2) Q'(v + t) dv = -(2/pi) integral_0^inf Q'(t + s^2) ds,
/// given |Q'(v)| <= coeff (v + 1/2)^(-2), or Q' = 0 beyond a finite support_end.
QuadResult abel_inverse(const RealFunction& q_derivative, double t, double derivative_coeff, double rel_tol,
                        double feature_scale = 1.0,
                        double support_end = std::numeric_limits<double>::infinity());

/// Point-pair kernel k_T(t) whose spherical transform is h_T, by quadrature.
QuadResult kernel_k(double T, double t, double rel_tol = 1e-11);

/// Envelope |k_T(t)| <= cosh T / (8 pi) (t + 1/2)^(-3/2).
double kernel_k_bound(double T, double t);

/// A Selberg/Harish-Chandra triple with its intermediate profile.
struct TransformTriple {
    double T = 0.0;
    double rel_tol = 0.0;
    std::function<double(const SpectralParameter&)> h;
    RealFunction g;  // normalized so fourier_h(g) = h
    RealFunction q;  // g(u) = 2 q(sinh^2(u/2))
    RealFunction k;  // by quadrature
};

TransformTriple selberg_triple(double T, double rel_tol = 1e-11);

/// Spherical transform of k_T cut off beyond t* = sinh^2(2T). The deviation
/// from h_T is the transform of the discarded tail; it is evaluated by the
/// forward chain (tail profile, then Fourier) whenever the certified bound
/// 1 / (2 sinh T) exceeds tol, and bounded by it otherwise.
class TruncatedTransform {
public:
    TruncatedTransform(double T, double tol = 1e-12, double r_max = 12.0);

    double T() const { return T_; }
    double cutoff() const { return cutoff_; }
    bool chain_used() const { return chain_; }
    double certified_bound() const;
    /// Estimated quadrature error of deviation(), excluding the certified bound
    /// when the chain is skipped.
    double quadrature_error() const { return rule_error_; }

    /// Discarded part of the profile: integral_{max(omega,t*)}^inf k_T(t) (t-omega)^(-1/2) dt.
    double tail_profile(double omega) const;
    /// Profile of the truncated kernel: Q_T/(2 pi) - tail, zero beyond t*.
    double truncated_profile(double omega) const;

    /// h~_T(r) - h_T(r).
    double deviation(const SpectralParameter& r) const;
    /// h~_T(r).
    double value(const SpectralParameter& r) const;
    /// Error bound on value(): quadrature error, or the certified bound when skipped.
    double error_bound() const;

private:
    double T_;
    double tol_;
    double cutoff_;
    bool chain_ = false;
    CompositeRule rule_;
    std::vector<double> tail_values_;  // g_tail at rule_ nodes
    double rule_error_ = 0.0;
};

struct KernelSup {
    double sup = 0.0;
    double argmax = 0.0;
};

/// sup_t |k_T(t)| by a log-spaced scan refined with golden-section search.
KernelSup kernel_sup(double T, double rel_tol = 1e-10);

/// integral_{sinh^2(2T)}^inf |k_T(t)| dt.
QuadResult kernel_tail_integral(double T, double rel_tol = 1e-8);

struct KernelShape {
    double plateau_constant = 0.0;  // sup_{t <= cosh T} |k_T| (cosh T)^{1/2}
    double decay_constant = 0.0;    // sup_{t >= cosh T} |k_T| t^{3/2} / cosh T
};

KernelShape kernel_shape(double T, int samples = 96);

struct Regression {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares fit of ys against xs.
Regression fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

struct SelbergSweep {
    std::vector<double> T;
    std::vector<double> sup_norm;
    std::vector<double> tail_integral;
    std::vector<double> sup_constant;   // sup * e^{T/2}
    std::vector<double> tail_constant;  // tail * e^{T}
    Regression sup_fit;                 // log sup vs T
    Regression tail_fit;                // log tail vs T
    double sup_constant_max = 0.0;
    double tail_constant_max = 0.0;
};

SelbergSweep selberg_sweep(const std::vector<double>& Ts);

nlohmann::json to_json(const SelbergSweep& s);

}  // namespace skl
