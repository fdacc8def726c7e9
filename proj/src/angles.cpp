#include "skl/angles.hpp"

#include "skl/errors.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

namespace skl {

namespace {
constexpr long double kPi = std::numbers::pi_v<long double>;
constexpr long double kTwoPi = 2 * kPi;
}  // namespace

long double fold_angle(long double x) {
    long double r = std::fmod(x, kTwoPi);
    if (r > kPi) r -= kTwoPi;
    if (r <= -kPi) r += kTwoPi;
    return r;
}

long double folded_multiple(long q, double theta) {
    return std::fabs(fold_angle(static_cast<long double>(q) * static_cast<long double>(theta)));
}

long first_multiple_within(double theta, long q_max, long double bound) {
    for (long q = 1; q <= q_max; ++q) {
        if (folded_multiple(q, theta) <= bound) return q;
    }
    return 0;
}

long dirichlet_search(double theta, long Q) {
    if (Q < 1) throw InvalidArgument("dirichlet_search needs Q >= 1, got " + std::to_string(Q));
    const long double bound = kTwoPi / static_cast<long double>(Q);
    for (long q = 1; q <= Q; ++q) {
        if (folded_multiple(q, theta) < bound) return q;
    }
    // Pigeonhole guarantees a hit; reaching here means the fold is broken.
    assert(false && "dirichlet_search exhausted its range");
    throw InvalidArgument("dirichlet_search exhausted 1..Q");
}

}  // namespace skl
