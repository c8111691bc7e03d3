#include "cosserat/forward_solver.hpp"

#include <cmath>

namespace cosserat {

namespace {

void check_control_slice(std::span<const Vec2> uF, std::span<const double> uC, const RodProperties& props) {
    if (uF.size() != static_cast<std::size_t>(props.N) + 1 || uC.size() != static_cast<std::size_t>(props.N))
        throw SizeError("control slice does not match N = " + std::to_string(props.N));
}

void clamp_base(RodState& s) {
    s.p_r[0] = Vec2::Zero();
    s.p_theta[0] = 0.0;
}

}  // namespace

void internal_forces(const Vec2Array& r, const std::vector<double>& theta, const RodProperties& props,
                     Vec2Array& f_r, std::vector<double>& f_theta) {
    const auto N = static_cast<std::size_t>(props.N);
    const double ds = props.ds, inv_ds = 1.0 / ds;
    f_r.assign(N + 1, Vec2::Zero());
    f_theta.assign(N, 0.0);

    // Element stretch/shear: Q n goes to the two end nodes with opposite
    // signs (dtilde), the couple ds (nu x n) stays on the element.
    for (std::size_t j = 0; j < N; ++j) {
        const double c = std::cos(theta[j]), s = std::sin(theta[j]);
        const Vec2 e = (r[j + 1] - r[j]) * inv_ds;
        const Vec2 nu(c * e.x() + s * e.y(), -s * e.x() + c * e.y());
        const Vec2 n = props.S[j].cwiseProduct(nu - props.nu_intrinsic[j]);
        const Vec2 qn(c * n.x() - s * n.y(), s * n.x() + c * n.y());
        f_r[j] += qn;
        f_r[j + 1] -= qn;
        f_theta[j] += ds * cross(nu, n);
    }
    for (std::size_t l = 0; l + 1 < N; ++l) {
        const double m = props.B[l] * ((theta[l + 1] - theta[l]) * inv_ds - props.kappa_intrinsic[l]);
        f_theta[l] += m;
        f_theta[l + 1] -= m;
    }
    f_r[0] = Vec2::Zero();
    f_theta[0] = 0.0;
}

MomentumRates forward_rhs(const RodState& state, std::span<const Vec2> uF, std::span<const double> uC,
                          const RodProperties& props) {
    require_sized(state, props);
    check_control_slice(uF, uC, props);
    MomentumRates out;
    internal_forces(state.r, state.theta, props, out.dp_r, out.dp_theta);
    for (std::size_t i = 1; i < out.dp_r.size(); ++i)
        out.dp_r[i] += -props.zeta * state.p_r[i] / (props.rho * props.node_area[i]) + props.ds * uF[i];
    for (std::size_t j = 1; j < out.dp_theta.size(); ++j)
        out.dp_theta[j] += -props.zeta * state.p_theta[j] / (props.rho * props.I[j]) + props.ds * uC[j];
    for (const auto& v : out.dp_r)
        if (!v.allFinite()) throw BlowupError("forward_rhs: non-finite momentum rate", -1);
    for (double v : out.dp_theta)
        if (!std::isfinite(v)) throw BlowupError("forward_rhs: non-finite momentum rate", -1);
    return out;
}

RodState half_drift(const RodState& state, const RodProperties& props, double dt) {
    RodState h = state;
    const double half = 0.5 * dt;
    for (std::size_t i = 1; i < h.r.size(); ++i) h.r[i] += half * state.p_r[i] / props.node_mass(i);
    for (std::size_t j = 1; j < h.theta.size(); ++j)
        h.theta[j] += half * state.p_theta[j] / props.element_inertia(j);
    return h;
}

RodState verlet_step(const RodState& state, std::span<const Vec2> uF, std::span<const double> uC,
                     const RodProperties& props, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("verlet_step: dt must be positive");
    RodState mid = half_drift(state, props, dt);
    const MomentumRates rates = forward_rhs(mid, uF, uC, props);
    // Damping in forward_rhs used the pre-kick momenta carried in mid.
    for (std::size_t i = 0; i < mid.p_r.size(); ++i) mid.p_r[i] += dt * rates.dp_r[i];
    for (std::size_t j = 0; j < mid.p_theta.size(); ++j) mid.p_theta[j] += dt * rates.dp_theta[j];
    clamp_base(mid);
    return half_drift(mid, props, dt);
}

Trajectory simulate_forward(const RodState& initial, const ControlField& control, const RodProperties& props) {
    require_sized(initial, props);
    if (control.N != props.N) throw SizeError("simulate_forward: control N does not match rod");
    Trajectory traj;
    traj.dt = control.dt;
    traj.states.reserve(static_cast<std::size_t>(control.steps) + 1);
    traj.states.push_back(initial);
    for (int k = 0; k < control.steps; ++k) {
        RodState next;
        try {
            next = verlet_step(traj.states.back(), control.force_at(k), control.couple_at(k), props, control.dt);
        } catch (const BlowupError& e) {
            throw BlowupError(e.what(), k);
        }
        const double m = next.max_abs();
        if (!(m <= kBlowupLimit))
            throw BlowupError("forward sweep blew up at step " + std::to_string(k + 1), k + 1);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

}  // namespace cosserat
