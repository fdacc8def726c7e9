#include "skl/chebyshev.hpp"

#include "skl/errors.hpp"

#include <cmath>

namespace skl {

ChebValues<double> chebyshev_pair(int n, double x) {
    if (n < 0) throw InvalidArgument("Chebyshev degree must be non-negative");
    if (std::abs(x) <= 1.0) return chebyshev_pair_recursive(n, x);
    const double beta = std::acosh(std::abs(x));
    double first = std::cosh(n * beta);
    double second = n == 0 ? 0.0 : std::sinh(n * beta) / std::sinh(beta);
    if (x < 0) {
        if (n % 2 == 1) first = -first;
        if (n % 2 == 0) second = -second;
    }
    return {first, second};
}

double cheb_eval(ChebKind kind, int index, double x) {
    if (index < 0) throw InvalidArgument("Chebyshev index must be non-negative");
    if (kind == ChebKind::First) return chebyshev_pair(index, x).first;
    return chebyshev_pair(index + 1, x).second;
}

mpq_class cheb_eval(ChebKind kind, int index, const mpq_class& x) {
    if (index < 0) throw InvalidArgument("Chebyshev index must be non-negative");
    if (kind == ChebKind::First) return chebyshev_pair_recursive<mpq_class>(index, x).first;
    return chebyshev_pair_recursive<mpq_class>(index + 1, x).second;
}

namespace {

std::vector<mpq_class> times_x(const std::vector<mpq_class>& a) {
    std::vector<mpq_class> out(a.size() + 1, mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i + 1] = a[i];
    return out;
}

std::vector<mpq_class> axpy(std::vector<mpq_class> y, const std::vector<mpq_class>& x, const mpq_class& alpha) {
    if (y.size() < x.size()) y.resize(x.size(), mpq_class(0));
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
    return y;
}

void trim(std::vector<mpq_class>& a) {
    while (a.size() > 1 && sgn(a.back()) == 0) a.pop_back();
}

template <class T>
T horner(const std::vector<mpq_class>& c, const T& x) {
    T acc = T(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + T(*it);
    return acc;
}

double horner_double(const std::vector<mpq_class>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + it->get_d();
    return acc;
}

}  // namespace

ChebyshevPair::ChebyshevPair(int n) : n_(n) {
    if (n < 0) throw InvalidArgument("Chebyshev degree must be non-negative");
    // Same joint recursion as chebyshev_pair_recursive, on coefficient vectors.
    std::vector<mpq_class> p{mpq_class(1)};
    std::vector<mpq_class> q{mpq_class(0)};
    for (int k = 0; k < n; ++k) {
        // x P - (1 - x^2) Q = x P - Q + x^2 Q
        auto next_p = axpy(times_x(p), q, mpq_class(-1));
        next_p = axpy(std::move(next_p), times_x(times_x(q)), mpq_class(1));
        q = axpy(times_x(q), p, mpq_class(1));
        p = std::move(next_p);
        trim(p);
        trim(q);
    }
    first_ = std::move(p);
    second_ = std::move(q);
}

double ChebyshevPair::first(double x) const { return horner_double(first_, x); }
double ChebyshevPair::second(double x) const { return horner_double(second_, x); }
mpq_class ChebyshevPair::first(const mpq_class& x) const { return horner<mpq_class>(first_, x); }
mpq_class ChebyshevPair::second(const mpq_class& x) const { return horner<mpq_class>(second_, x); }

std::vector<RadialFunction> chebyshev_first_sequence(int n_max, const RadialFunction& f) {
    if (n_max < 0) throw InvalidArgument("Chebyshev degree must be non-negative");
    std::vector<RadialFunction> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    out.push_back(f);
    if (n_max == 0) return out;
    out.push_back(AlgebraicNumber(mpq_class(1, 2)) * tp_apply(f));
    for (int k = 1; k < n_max; ++k) out.push_back(tp_apply(out[k]) - out[k - 1]);
    return out;
}

RadialFunction chebyshev_first_apply(int n, const RadialFunction& f) {
    if (n < 0) throw InvalidArgument("Chebyshev degree must be non-negative");
    if (n == 0) return f;
    RadialFunction prev = f;
    RadialFunction cur = AlgebraicNumber(mpq_class(1, 2)) * tp_apply(f);
    for (int k = 1; k < n; ++k) {
        RadialFunction next = tp_apply(cur) - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

RadialFunction chebyshev_second_apply(int m, const RadialFunction& f) {
    if (m < -1) throw InvalidArgument("second-kind index must be >= -1");
    if (m == -1) return RadialFunction(f.p(), f.radius());
    if (m == 0) return f;
    RadialFunction prev = f;
    RadialFunction cur = tp_apply(f);
    for (int k = 1; k < m; ++k) {
        RadialFunction next = tp_apply(cur) - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace skl
