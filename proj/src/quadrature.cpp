#include "skl/quadrature.hpp"

#include "skl/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace skl {

namespace {

constexpr unsigned kMaxDepth = 18;

template <unsigned Order>
void append_panel(CompositeRule& rule, double a, double b) {
    using Rule = boost::math::quadrature::gauss<double, Order>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    // Boost stores the non-negative half of the symmetric rule.
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            rule.nodes.push_back(mid);
            rule.weights.push_back(half * w[i]);
            continue;
        }
        rule.nodes.push_back(mid - half * x[i]);
        rule.weights.push_back(half * w[i]);
        rule.nodes.push_back(mid + half * x[i]);
        rule.weights.push_back(half * w[i]);
    }
}

}  // namespace

QuadResult integrate(const RealFunction& f, double a, double b, double rel_tol, int panels) {
    QuadResult total;
    if (!(b > a)) return total;
    panels = std::max(panels, 1);
    const double width = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * width;
        const double hi = i + 1 == panels ? b : lo + width;
        double err = 0.0;
        double l1 = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, kMaxDepth, rel_tol,
                                                                                       &err, &l1);
        if (!std::isfinite(v)) throw QuadratureFailure("non-finite integral on [" + std::to_string(lo) + ", " +
                                                       std::to_string(hi) + "]");
        total += QuadResult{v, err};
    }
    return total;
}

QuadResult integrate_half_line(const RealFunction& f, double a, double scale,
                               const std::function<double(double)>& tail_bound, double rel_tol, double abs_floor,
                               int max_panels) {
    if (!(scale > 0.0)) throw InvalidArgument("integrate_half_line needs a positive scale");
    QuadResult total;
    double magnitude = 0.0;
    double lo = a;
    double width = scale;
    for (int k = 0; k < max_panels; ++k) {
        const double hi = lo + width;
        const auto piece = integrate(f, lo, hi, rel_tol);
        total += piece;
        magnitude += std::abs(piece.value);
        const double tail = tail_bound(hi);
        if (tail <= rel_tol * magnitude || tail <= abs_floor) {
            total.error += tail;
            return total;
        }
        lo = hi;
        width *= 2.0;
        if (!std::isfinite(lo)) break;
    }
    throw QuadratureFailure("tail bound not reached after " + std::to_string(max_panels) + " panels");
}

CompositeRule graded_gauss_legendre(double a, double b, double max_width, int grading, int order) {
    CompositeRule rule;
    if (!(b > a)) return rule;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    const double width = (b - a) / panels;
    auto add = [&](double lo, double hi) {
        if (order == 10) {
            append_panel<10>(rule, lo, hi);
        } else if (order == 20) {
            append_panel<20>(rule, lo, hi);
        } else {
            throw InvalidArgument("graded_gauss_legendre supports orders 10 and 20");
        }
    };
    for (int i = 0; i + 1 < panels; ++i) add(a + i * width, a + (i + 1) * width);
    double lo = b - width;
    double gap = width;
    for (int g = 0; g < grading; ++g) {
        gap *= 0.5;
        add(lo, b - gap);
        lo = b - gap;
    }
    add(lo, b);
    return rule;
}

}  // namespace skl
