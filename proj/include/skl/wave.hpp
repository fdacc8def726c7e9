#pragma once

#include "skl/algebraic.hpp"
#include "skl/tree.hpp"

#include <nlohmann/json_fwd.hpp>

namespace skl {

/// State (Phi_n, Psi_n) of the p-adic wave equation
///   Phi_{n+1} = T/2 Phi_n - (1 - T^2/4) Psi_n,   Psi_{n+1} = T/2 Psi_n + Phi_n.
struct WaveState {
    RadialFunction phi;
    RadialFunction psi;
    int step = 0;

    WaveState(RadialFunction phi_, RadialFunction psi_, int step_ = 0);
};

WaveState wave_step(const WaveState& s);

/// ||Phi||^2 + <Psi, (1 - T^2/4) Psi>, exact. Conserved by wave_step.
AlgebraicNumber energy(const WaveState& s);

/// P_n(T_p/2) delta_0 from the explicit formula: 0 at odd d and d > n,
/// (1-p)/(2 p^{n/2}) at even d < n, 1/(2 p^{n/2}) at d = n. n must be even.
RadialFunction propagate_closed_form(long p, int n, int radius);

struct ClosedFormReport {
    long p = 0;
    int n = 0;
    AlgebraicNumber max_abs_deviation;  // over both components and all d
    AlgebraicNumber energy_drift;       // energy(stepped_n) - energy(initial)
    bool equal() const { return max_abs_deviation.is_zero(); }
    bool conserved() const { return energy_drift.is_zero(); }
};

/// Steps (Phi_0, Psi_0) n times and compares with the Chebyshev closed form
///   Phi_n = P_n Phi_0 - (1 - T^2/4) Q_{n-1} Psi_0,  Psi_n = P_n Psi_0 + Q_{n-1} Phi_0
/// (operators evaluated at T_p/2), exactly.
ClosedFormReport wave_closed_form_check(int n, const RadialFunction& phi0, const RadialFunction& psi0);

nlohmann::json to_json(const ClosedFormReport& r);

}  // namespace skl
