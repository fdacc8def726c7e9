#include "skl/wave.hpp"

#include "skl/chebyshev.hpp"
#include "skl/errors.hpp"

#include <nlohmann/json.hpp>

namespace skl {

namespace {

const AlgebraicNumber kHalf{mpq_class(1, 2)};
const AlgebraicNumber kQuarter{mpq_class(1, 4)};

// (1 - T^2/4) f
RadialFunction one_minus_quarter_t2(const RadialFunction& f) {
    return f - kQuarter * tp_apply(tp_apply(f));
}

AlgebraicNumber max_abs_difference(const RadialFunction& a, const RadialFunction& b) {
    AlgebraicNumber worst;
    for (int d = 0; d <= a.radius(); ++d) {
        AlgebraicNumber diff = abs(a[d] - b[d]);
        if (worst < diff) worst = std::move(diff);
    }
    return worst;
}

}  // namespace

WaveState::WaveState(RadialFunction phi_, RadialFunction psi_, int step_)
    : phi(std::move(phi_)), psi(std::move(psi_)), step(step_) {
    if (phi.p() != psi.p() || phi.radius() != psi.radius()) {
        throw MismatchedTree("wave state components live on different truncated trees");
    }
    if (step < 0) throw InvalidArgument("wave step must be non-negative");
}

WaveState wave_step(const WaveState& s) {
    const RadialFunction t_psi = tp_apply(s.psi);
    const RadialFunction t2_psi = tp_apply(t_psi);
    RadialFunction phi = kHalf * tp_apply(s.phi) - s.psi + kQuarter * t2_psi;
    RadialFunction psi = kHalf * t_psi + s.phi;
    return WaveState(std::move(phi), std::move(psi), s.step + 1);
}

AlgebraicNumber energy(const WaveState& s) {
    return radial_inner(s.phi, s.phi) + radial_inner(s.psi, one_minus_quarter_t2(s.psi));
}

RadialFunction propagate_closed_form(long p, int n, int radius) {
    if (n < 0) throw InvalidArgument("propagation time must be non-negative");
    if (n % 2 != 0) throw OddPropagationTime("closed form is stated for even n only, got n = " + std::to_string(n));
    if (radius < n) throw TruncationOverflow("radius " + std::to_string(radius) + " < propagation time " + std::to_string(n));
    if (n == 0) return delta_at_root(p, radius);
    RadialFunction f(p, radius);
    mpz_class pn;
    mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n / 2));
    const mpq_class interior(mpz_class(1 - p), 2 * pn);
    const mpq_class edge(mpz_class(1), 2 * pn);
    for (int d = 0; d < n; d += 2) f[d] = AlgebraicNumber(interior);
    f[n] = AlgebraicNumber(edge);
    return f;
}

ClosedFormReport wave_closed_form_check(int n, const RadialFunction& phi0, const RadialFunction& psi0) {
    if (n < 0) throw InvalidArgument("step count must be non-negative");
    WaveState s(phi0, psi0);
    const AlgebraicNumber e0 = energy(s);
    for (int k = 0; k < n; ++k) s = wave_step(s);

    const RadialFunction pn_phi = chebyshev_first_apply(n, phi0);
    const RadialFunction pn_psi = chebyshev_first_apply(n, psi0);
    const RadialFunction qn_phi = chebyshev_second_apply(n - 1, phi0);
    const RadialFunction qn_psi = chebyshev_second_apply(n - 1, psi0);
    const RadialFunction phi_closed = pn_phi - one_minus_quarter_t2(qn_psi);
    const RadialFunction psi_closed = pn_psi + qn_phi;

    ClosedFormReport r;
    r.p = phi0.p();
    r.n = n;
    AlgebraicNumber dev_phi = max_abs_difference(s.phi, phi_closed);
    AlgebraicNumber dev_psi = max_abs_difference(s.psi, psi_closed);
    r.max_abs_deviation = dev_phi < dev_psi ? dev_psi : dev_phi;
    r.energy_drift = energy(s) - e0;
    return r;
}

nlohmann::json to_json(const ClosedFormReport& r) {
    return {{"p", r.p},
            {"n", r.n},
            {"max_abs_deviation", r.max_abs_deviation.to_double()},
            {"max_abs_deviation_exact_zero", r.equal()},
            {"energy_drift", r.energy_drift.to_double()},
            {"energy_drift_exact_zero", r.conserved()}};
}

}  // namespace skl
