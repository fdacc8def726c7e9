#pragma once

#include "skl/algebraic.hpp"
#include "skl/tree.hpp"

#include <random>

namespace skl::testing {

inline AlgebraicNumber random_algebraic(std::mt19937_64& rng, long p, int span = 20) {
    std::uniform_int_distribution<long> num(-span, span);
    std::uniform_int_distribution<long> den(1, 12);
    mpq_class u(mpz_class(num(rng)), mpz_class(den(rng)));
    mpq_class v(mpz_class(num(rng)), mpz_class(den(rng)));
    return AlgebraicNumber(u, v, p);
}

/// Random exact radial function supported in distance <= support.
inline RadialFunction random_radial(std::mt19937_64& rng, long p, int radius, int support) {
    RadialFunction f(p, radius);
    for (int d = 0; d <= support && d <= radius; ++d) f[d] = random_algebraic(rng, p);
    return f;
}

}  // namespace skl::testing
