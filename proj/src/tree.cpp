#include "skl/tree.hpp"

#include "skl/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>

namespace skl {

namespace {

void check_prime(long p) {
    if (!is_prime(p)) throw InvalidArgument("tree degree parameter p must be prime, got " + std::to_string(p));
}

nlohmann::json integer_to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
    return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& j) {
    if (j.is_string()) return mpz_class(j.get<std::string>());
    if (j.is_number_integer()) return mpz_class(static_cast<long>(j.get<std::int64_t>()));
    throw InvalidArgument("expected integer or decimal string in radial function JSON");
}

}  // namespace

SphereSizes::SphereSizes(long p, int radius) : p_(p) {
    check_prime(p);
    if (radius < 0) throw InvalidArgument("sphere radius must be non-negative");
    sizes_.reserve(static_cast<std::size_t>(radius) + 1);
    sizes_.emplace_back(1);
    if (radius >= 1) sizes_.emplace_back(p + 1);
    for (int j = 2; j <= radius; ++j) sizes_.push_back(sizes_.back() * p);
}

RadialFunction::RadialFunction(long p, int radius) : p_(p) {
    check_prime(p);
    if (radius < 0) throw InvalidArgument("radius must be non-negative");
    values_.assign(static_cast<std::size_t>(radius) + 1, AlgebraicNumber{});
}

RadialFunction::RadialFunction(long p, std::vector<AlgebraicNumber> values) : p_(p), values_(std::move(values)) {
    check_prime(p);
    if (values_.empty()) throw InvalidArgument("radial function needs at least one value");
    for (const auto& v : values_) {
        if (!v.is_rational() && v.radicand() != p) throw MismatchedTree("value outside Q(sqrt p)");
    }
}

bool RadialFunction::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const AlgebraicNumber& v) { return v.is_zero(); });
}

int RadialFunction::support_radius() const {
    for (int d = radius(); d >= 0; --d) {
        if (!values_[static_cast<std::size_t>(d)].is_zero()) return d;
    }
    return -1;
}

RadialFunction RadialFunction::resized(int radius) const {
    if (radius < 0) throw InvalidArgument("radius must be non-negative");
    if (support_radius() > radius) {
        throw TruncationOverflow("shrinking to radius " + std::to_string(radius) + " drops support at distance " +
                                 std::to_string(support_radius()));
    }
    RadialFunction out(p_, radius);
    const int n = std::min(radius, this->radius());
    for (int d = 0; d <= n; ++d) out[d] = (*this)[d];
    return out;
}

std::vector<double> RadialFunction::to_doubles() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) out.push_back(v.to_double());
    return out;
}

void RadialFunction::check_compatible(const RadialFunction& o) const {
    if (p_ != o.p_ || radius() != o.radius()) {
        throw MismatchedTree("radial functions on (p=" + std::to_string(p_) + ", R=" + std::to_string(radius()) +
                             ") and (p=" + std::to_string(o.p_) + ", R=" + std::to_string(o.radius()) + ")");
    }
}

RadialFunction& RadialFunction::operator+=(const RadialFunction& o) {
    check_compatible(o);
    for (std::size_t d = 0; d < values_.size(); ++d) values_[d] += o.values_[d];
    return *this;
}

RadialFunction& RadialFunction::operator-=(const RadialFunction& o) {
    check_compatible(o);
    for (std::size_t d = 0; d < values_.size(); ++d) values_[d] -= o.values_[d];
    return *this;
}

RadialFunction& RadialFunction::operator*=(const AlgebraicNumber& s) {
    for (auto& v : values_) v *= s;
    return *this;
}

bool operator==(const RadialFunction& a, const RadialFunction& b) {
    return a.p_ == b.p_ && a.values_ == b.values_;
}

RadialFunction delta_at_root(long p, int radius) {
    RadialFunction f(p, radius);
    f[0] = AlgebraicNumber(1);
    return f;
}

RadialFunction tp_apply(const RadialFunction& f) {
    const long p = f.p();
    const int R = f.radius();
    if (!f[R].is_zero()) {
        throw TruncationOverflow("T_p image of a function nonzero at the truncation radius " + std::to_string(R) +
                                 " does not fit");
    }
    RadialFunction g(p, R);
    if (R == 0) return g;
    const AlgebraicNumber scale = AlgebraicNumber::inv_sqrt_p(p);
    g[0] = AlgebraicNumber(p + 1) * scale * f[1];
    for (int d = 1; d < R; ++d) g[d] = scale * (f[d - 1] + AlgebraicNumber(p) * f[d + 1]);
    g[R] = scale * f[R - 1];
    return g;
}

AlgebraicNumber radial_inner(const RadialFunction& f, const RadialFunction& g) {
    if (f.p() != g.p() || f.radius() != g.radius()) {
        throw MismatchedTree("inner product of functions on different truncated trees");
    }
    const SphereSizes sizes(f.p(), f.radius());
    AlgebraicNumber acc;
    for (int d = 0; d <= f.radius(); ++d) {
        if (f[d].is_zero() || g[d].is_zero()) continue;
        acc += AlgebraicNumber(mpq_class(sizes[d])) * f[d] * g[d];
    }
    return acc;
}

nlohmann::json to_json(const RadialFunction& f) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& v : f.values()) {
        values.push_back({integer_to_json(v.rational_part().get_num()), integer_to_json(v.rational_part().get_den()),
                          integer_to_json(v.surd_part().get_num()), integer_to_json(v.surd_part().get_den())});
    }
    return {{"p", f.p()}, {"R", f.radius()}, {"values", std::move(values)}};
}

RadialFunction radial_function_from_json(const nlohmann::json& j) {
    const long p = j.at("p").get<long>();
    const int R = j.at("R").get<int>();
    const auto& values = j.at("values");
    if (!values.is_array() || static_cast<int>(values.size()) != R + 1) {
        throw InvalidArgument("radial function JSON must carry R+1 values");
    }
    std::vector<AlgebraicNumber> out;
    out.reserve(values.size());
    for (const auto& entry : values) {
        if (!entry.is_array() || entry.size() != 4) throw InvalidArgument("each value must be [u_num, u_den, v_num, v_den]");
        mpq_class u(integer_from_json(entry[0]), integer_from_json(entry[1]));
        mpq_class v(integer_from_json(entry[2]), integer_from_json(entry[3]));
        if (u.get_den() == 0 || v.get_den() == 0) throw InvalidArgument("zero denominator in radial function JSON");
        out.emplace_back(std::move(u), std::move(v), p);
    }
    return RadialFunction(p, std::move(out));
}

}  // namespace skl
