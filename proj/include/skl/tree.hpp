#pragma once

#include "skl/algebraic.hpp"

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace skl {

/// Vertex counts of the spheres around the root of the (p+1)-regular tree:
/// 1 at radius 0, (p+1) p^(j-1) at radius j >= 1.
class SphereSizes {
public:
    SphereSizes(long p, int radius);

    long p() const { return p_; }
    int radius() const { return static_cast<int>(sizes_.size()) - 1; }
    const mpz_class& operator[](int j) const { return sizes_.at(static_cast<std::size_t>(j)); }

private:
    long p_;
    std::vector<mpz_class> sizes_;
};

/// A spherically symmetric function on the (p+1)-regular tree, truncated at
/// radius R. values()[d] is the value at every vertex at distance d from the
/// root; distances beyond R are zero.
class RadialFunction {
public:
    RadialFunction(long p, int radius);
    RadialFunction(long p, std::vector<AlgebraicNumber> values);

    long p() const { return p_; }
    int radius() const { return static_cast<int>(values_.size()) - 1; }
    const std::vector<AlgebraicNumber>& values() const { return values_; }

    const AlgebraicNumber& operator[](int d) const { return values_.at(static_cast<std::size_t>(d)); }
    AlgebraicNumber& operator[](int d) { return values_.at(static_cast<std::size_t>(d)); }

    bool is_zero() const;
    /// Largest d with a nonzero value, or -1 for the zero function.
    int support_radius() const;
    /// Same tree, zero-padded (or exactly truncated) to a new radius. Throws
    /// TruncationOverflow if shrinking would drop a nonzero value.
    RadialFunction resized(int radius) const;
    std::vector<double> to_doubles() const;

    RadialFunction& operator+=(const RadialFunction& o);
    RadialFunction& operator-=(const RadialFunction& o);
    RadialFunction& operator*=(const AlgebraicNumber& s);

    friend RadialFunction operator+(RadialFunction a, const RadialFunction& b) { return a += b; }
    friend RadialFunction operator-(RadialFunction a, const RadialFunction& b) { return a -= b; }
    friend RadialFunction operator*(const AlgebraicNumber& s, RadialFunction f) { return f *= s; }
    friend bool operator==(const RadialFunction& a, const RadialFunction& b);

private:
    void check_compatible(const RadialFunction& o) const;

    long p_;
    std::vector<AlgebraicNumber> values_;
};

RadialFunction delta_at_root(long p, int radius);

/// Normalized Hecke operator T_p = p^(-1/2) * (sum over neighbours) acting on a
/// radial function. Requires f[R] == 0 so the image fits in the truncation.
RadialFunction tp_apply(const RadialFunction& f);

/// Counting-measure inner product sum_d |S_d| f[d] g[d].
AlgebraicNumber radial_inner(const RadialFunction& f, const RadialFunction& g);

/// {p, R, values: [[u_num, u_den, v_num, v_den], ...]}; integers that do not
/// fit in int64 are written as decimal strings.
nlohmann::json to_json(const RadialFunction& f);
RadialFunction radial_function_from_json(const nlohmann::json& j);

}  // namespace skl
