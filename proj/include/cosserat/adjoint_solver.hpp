#pragma once

#include <vector>

#include "cosserat/forward_solver.hpp"
#include "cosserat/rod_model.hpp"

namespace cosserat {

// Costate (mu, gamma) dual to (q, p) = ((r, theta), (p_r, p_theta)).
struct CostateState {
    Vec2Array mu_r;                   // N+1
    std::vector<double> mu_theta;     // N
    Vec2Array gamma_r;                // N+1
    std::vector<double> gamma_theta;  // N

    static CostateState zeros(int N);
    bool well_sized(int N) const;
    double max_abs() const;
};

using CostateRates = CostateState;

// Transversality for the tip-distance terminal cost: a Kronecker delta at the
// tip node, mu_r(tip) = -chi2 (r_tip - target), everything else zero.
CostateState terminal_costate(const RodState& final_state, const Vec2& target, double chi2);

// Time derivative of the costate along a frozen forward state. The mu rates
// are -(dF/dq)^T gamma - chi1 F with F the internal forces; the gamma rates
// are -(M^-1 mu - zeta gamma / (rho A)). Entries dual to the clamped base
// are zero.
CostateRates adjoint_rhs(const CostateState& costate, const RodState& forward_state, const RodProperties& props,
                         double chi1);

struct BackwardSweep {
    std::vector<CostateState> costates;  // steps + 1, aligned with the trajectory
    // gamma at t_k + dt/2, the value paired with control step k in the
    // gradient of the discrete cost.
    Vec2Array gamma_r_half;              // steps * (N+1)
    std::vector<double> gamma_theta_half;  // steps * N
    int N = 0;
    int steps = 0;
};

// Position-Verlet sweep from T back to 0. Each step is the exact transpose of
// the corresponding forward verlet_step, so the resulting gradient is the
// gradient of the discrete cost.
BackwardSweep simulate_backward(const Trajectory& trajectory, const ControlField& control,
                                const RodProperties& props, double chi1, double chi2, const Vec2& target);

}  // namespace cosserat
