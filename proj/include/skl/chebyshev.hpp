#pragma once

#include "skl/tree.hpp"

#include <gmpxx.h>

#include <vector>

namespace skl {

enum class ChebKind { First, Second };

/// P_n(x) and Q_{n-1}(x), the Chebyshev polynomials of the first and second
/// kind with P_n(cos t) = cos nt and Q_{n-1}(cos t) = sin nt / sin t.
template <class T>
struct ChebValues {
    T first;   // P_n(x)
    T second;  // Q_{n-1}(x); Q_{-1} = 0
};

/// Joint recursion P_{k+1} = x P_k - (1 - x^2) Q_{k-1}, Q_k = x Q_{k-1} + P_k,
/// started from P_0 = 1, Q_{-1} = 0. Exact for exact scalar types.
template <class T>
ChebValues<T> chebyshev_pair_recursive(int n, const T& x) {
    T p = T(1);
    T q = T(0);
    const T one_minus_x2 = T(1) - x * x;
    for (int k = 0; k < n; ++k) {
        T next_p = x * p - one_minus_x2 * q;
        q = x * q + p;
        p = std::move(next_p);
    }
    return {p, q};
}

/// Floating-point P_n(x), Q_{n-1}(x). Uses the joint recursion for |x| <= 1 and
/// the cosh/sinh closed forms for |x| > 1.
ChebValues<double> chebyshev_pair(int n, double x);

/// P_index(x) for ChebKind::First, Q_index(x) for ChebKind::Second.
double cheb_eval(ChebKind kind, int index, double x);
mpq_class cheb_eval(ChebKind kind, int index, const mpq_class& x);

/// Exact rational coefficient vectors (lowest degree first) of P_n and Q_{n-1}.
class ChebyshevPair {
public:
    explicit ChebyshevPair(int n);

    int degree() const { return n_; }
    const std::vector<mpq_class>& first_coefficients() const { return first_; }
    const std::vector<mpq_class>& second_coefficients() const { return second_; }

    double first(double x) const;
    double second(double x) const;
    mpq_class first(const mpq_class& x) const;
    mpq_class second(const mpq_class& x) const;

private:
    int n_;
    std::vector<mpq_class> first_;
    std::vector<mpq_class> second_;
};

/// P_0(T_p/2) f, ..., P_{n_max}(T_p/2) f via the three-term recurrence
/// P_{k+1}(T/2) = T P_k(T/2) - P_{k-1}(T/2). Exact in Q(sqrt p).
std::vector<RadialFunction> chebyshev_first_sequence(int n_max, const RadialFunction& f);

/// P_n(T_p/2) f.
RadialFunction chebyshev_first_apply(int n, const RadialFunction& f);

/// Q_m(T_p/2) f for m >= -1 (Q_{-1} = 0), by Q_{k+1} = T Q_k - Q_{k-1}.
RadialFunction chebyshev_second_apply(int m, const RadialFunction& f);

}  // namespace skl
