#include "skl/algebraic.hpp"

#include "skl/errors.hpp"

#include <cmath>
#include <limits>

namespace skl {

namespace {
constexpr mp_bitcnt_t kFloatBits = 256;
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

AlgebraicNumber::AlgebraicNumber(long value) : u_(value) {}

AlgebraicNumber::AlgebraicNumber(mpq_class u) : u_(std::move(u)) { u_.canonicalize(); }

AlgebraicNumber::AlgebraicNumber(mpq_class u, mpq_class v, long p)
    : u_(std::move(u)), v_(std::move(v)), p_(p) {
    if (!is_prime(p)) throw InvalidArgument("radicand must be prime, got " + std::to_string(p));
    canonicalize();
}

AlgebraicNumber AlgebraicNumber::sqrt_p(long p) { return {0, 1, p}; }

AlgebraicNumber AlgebraicNumber::inv_sqrt_p(long p) { return {0, mpq_class(mpz_class(1), mpz_class(p)), p}; }

void AlgebraicNumber::canonicalize() {
    u_.canonicalize();
    v_.canonicalize();
}

long AlgebraicNumber::unify(const AlgebraicNumber& o) const {
    if (p_ == o.p_) return p_;
    if (o.p_ == 0) return p_;
    if (p_ == 0) return o.p_;
    if (sgn(v_) == 0) return o.p_;
    if (sgn(o.v_) == 0) return p_;
    throw MismatchedTree("cannot combine elements of Q(sqrt " + std::to_string(p_) +
                         ") and Q(sqrt " + std::to_string(o.p_) + ")");
}

int AlgebraicNumber::sign() const {
    const int su = sgn(u_);
    const int sv = sgn(v_);
    if (sv == 0) return su;
    if (su == 0 || su == sv) return sv;
    // Opposite signs: compare u^2 with p v^2.
    const mpq_class uu = u_ * u_;
    const mpq_class pvv = v_ * v_ * p_;
    const int c = cmp(uu, pvv);
    if (c == 0) return 0;  // impossible for prime p unless both zero
    return c > 0 ? su : sv;
}

AlgebraicNumber AlgebraicNumber::conjugate() const {
    AlgebraicNumber r = *this;
    r.v_ = -r.v_;
    return r;
}

mpq_class AlgebraicNumber::norm() const { return u_ * u_ - v_ * v_ * p_; }

double AlgebraicNumber::to_double() const {
    if (sgn(v_) == 0) return u_.get_d();
    mpf_class a(u_, kFloatBits);
    mpf_class b(v_, kFloatBits);
    mpf_class s(p_, kFloatBits);
    s = sqrt(s);
    a += b * s;
    return a.get_d();
}

double AlgebraicNumber::log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    mpf_class a(u_, kFloatBits);
    if (sgn(v_) != 0) {
        mpf_class b(v_, kFloatBits);
        mpf_class s(p_, kFloatBits);
        s = sqrt(s);
        a += b * s;
    }
    a = abs(a);
    long exponent = 0;
    const double mantissa = mpf_get_d_2exp(&exponent, a.get_mpf_t());
    return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

std::string AlgebraicNumber::to_string() const {
    if (sgn(v_) == 0) return u_.get_str();
    std::string s = sgn(u_) == 0 ? std::string() : u_.get_str() + (sgn(v_) > 0 ? "+" : "");
    return s + v_.get_str() + "*sqrt(" + std::to_string(p_) + ")";
}

AlgebraicNumber& AlgebraicNumber::operator+=(const AlgebraicNumber& o) {
    p_ = unify(o);
    u_ += o.u_;
    v_ += o.v_;
    return *this;
}

AlgebraicNumber& AlgebraicNumber::operator-=(const AlgebraicNumber& o) {
    p_ = unify(o);
    u_ -= o.u_;
    v_ -= o.v_;
    return *this;
}

AlgebraicNumber& AlgebraicNumber::operator*=(const AlgebraicNumber& o) {
    const long p = unify(o);
    mpq_class u = u_ * o.u_ + v_ * o.v_ * p;
    mpq_class v = u_ * o.v_ + v_ * o.u_;
    u_ = std::move(u);
    v_ = std::move(v);
    p_ = p;
    return *this;
}

AlgebraicNumber& AlgebraicNumber::operator/=(const AlgebraicNumber& o) {
    if (o.is_zero()) throw InvalidArgument("division by zero in Q(sqrt p)");
    const long p = unify(o);
    AlgebraicNumber conj = o.conjugate();
    const mpq_class n = o.norm();
    *this *= conj;
    u_ /= n;
    v_ /= n;
    p_ = p;
    return *this;
}

AlgebraicNumber AlgebraicNumber::operator-() const {
    AlgebraicNumber r = *this;
    r.u_ = -r.u_;
    r.v_ = -r.v_;
    return r;
}

bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.u_ != b.u_ || a.v_ != b.v_) return false;
    return sgn(a.v_) == 0 || a.p_ == b.p_;
}

AlgebraicNumber abs(const AlgebraicNumber& x) { return x.sign() < 0 ? -x : x; }

}  // namespace skl
