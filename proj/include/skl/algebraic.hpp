#pragma once

#include <gmpxx.h>

#include <string>

namespace skl {

/// Returns true if p is a prime number (trial division; p is small).
bool is_prime(long p);

/// Exact element u + v*sqrt(p) of the quadratic field Q(sqrt p), p prime.
///
/// Rationals embed with v = 0; such values combine with elements of any field.
/// Mixing two irrational elements of different fields throws MismatchedTree.
class AlgebraicNumber {
public:
    AlgebraicNumber() = default;
    AlgebraicNumber(long value);  // NOLINT: rationals embed implicitly
    AlgebraicNumber(mpq_class u);  // NOLINT
    AlgebraicNumber(mpq_class u, mpq_class v, long p);

    static AlgebraicNumber sqrt_p(long p);
    static AlgebraicNumber inv_sqrt_p(long p);

    const mpq_class& rational_part() const { return u_; }
    const mpq_class& surd_part() const { return v_; }
    /// Radicand; 0 for a plain rational that has never been tied to a field.
    long radicand() const { return p_; }

    bool is_zero() const { return sgn(u_) == 0 && sgn(v_) == 0; }
    bool is_rational() const { return sgn(v_) == 0; }
    /// Exact sign of u + v sqrt(p): -1, 0 or +1.
    int sign() const;

    AlgebraicNumber conjugate() const;
    /// Field norm u^2 - p v^2.
    mpq_class norm() const;

    double to_double() const;
    /// Natural log of |value|; exact inputs far below the double range still
    /// produce a finite result. Returns -inf for zero.
    double log_abs() const;
    std::string to_string() const;

    AlgebraicNumber& operator+=(const AlgebraicNumber& o);
    AlgebraicNumber& operator-=(const AlgebraicNumber& o);
    AlgebraicNumber& operator*=(const AlgebraicNumber& o);
    AlgebraicNumber& operator/=(const AlgebraicNumber& o);

    friend AlgebraicNumber operator+(AlgebraicNumber a, const AlgebraicNumber& b) { return a += b; }
    friend AlgebraicNumber operator-(AlgebraicNumber a, const AlgebraicNumber& b) { return a -= b; }
    friend AlgebraicNumber operator*(AlgebraicNumber a, const AlgebraicNumber& b) { return a *= b; }
    friend AlgebraicNumber operator/(AlgebraicNumber a, const AlgebraicNumber& b) { return a /= b; }
    AlgebraicNumber operator-() const;

    friend bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend bool operator!=(const AlgebraicNumber& a, const AlgebraicNumber& b) { return !(a == b); }
    friend bool operator<(const AlgebraicNumber& a, const AlgebraicNumber& b) { return (a - b).sign() < 0; }

private:
    long unify(const AlgebraicNumber& o) const;
    void canonicalize();

    mpq_class u_{0};
    mpq_class v_{0};
    long p_{0};
};

AlgebraicNumber abs(const AlgebraicNumber& x);

}  // namespace skl
