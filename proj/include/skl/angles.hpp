#pragma once

namespace skl {

/// x reduced modulo 2 pi into (-pi, pi], computed in long double.
long double fold_angle(long double x);

/// |q * theta mod 2 pi| with the fold taken in long double.
long double folded_multiple(long q, double theta);

/// Smallest q in 1..Q with |q theta mod 2 pi| < 2 pi / Q. Always exists.
long dirichlet_search(double theta, long Q);

/// Smallest q in 1..q_max with |q theta mod 2 pi| <= bound, or 0 if none.
long first_multiple_within(double theta, long q_max, long double bound);

}  // namespace skl
