#pragma once

#include <functional>
#include <vector>

namespace skl {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error, including certified truncation

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
};

using RealFunction = std::function<double(double)>;

/// Adaptive 31-point Gauss-Kronrod on [a, b], split into `panels` equal pieces.
/// The relative tolerance applies to the L1 norm of the integrand on each panel.
QuadResult integrate(const RealFunction& f, double a, double b, double rel_tol, int panels = 1);

/// Integral of f over [a, infinity). Panels grow geometrically from width
/// `scale`; integration stops once tail_bound(S), a certified bound on the
/// integral of |f| over [S, infinity), is below rel_tol times the running
/// magnitude or below abs_floor. Throws QuadratureFailure if no such S is
/// reached before `max_panels`.
QuadResult integrate_half_line(const RealFunction& f, double a, double scale,
                               const std::function<double(double)>& tail_bound, double rel_tol,
                               double abs_floor = 0.0, int max_panels = 400);

/// Composite Gauss-Legendre rule with fixed nodes, for integrands evaluated once
/// and reused against many weights.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double apply(F&& f) const {
        long double acc = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(i);
        return static_cast<double>(acc);
    }
};

/// Equal panels of width at most `max_width` on [a, b]; the last panel is
/// additionally graded geometrically toward b (`grading` levels) to absorb a
/// square-root endpoint singularity. `order` is 10 or 20.
CompositeRule graded_gauss_legendre(double a, double b, double max_width, int grading, int order);

}  // namespace skl
