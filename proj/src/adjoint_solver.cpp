#include "cosserat/adjoint_solver.hpp"

#include <cmath>
#include <limits>

namespace cosserat {

CostateState CostateState::zeros(int N) {
    const auto n = static_cast<std::size_t>(N);
    CostateState c;
    c.mu_r.assign(n + 1, Vec2::Zero());
    c.mu_theta.assign(n, 0.0);
    c.gamma_r.assign(n + 1, Vec2::Zero());
    c.gamma_theta.assign(n, 0.0);
    return c;
}

bool CostateState::well_sized(int N) const {
    const auto n = static_cast<std::size_t>(N);
    return mu_r.size() == n + 1 && mu_theta.size() == n && gamma_r.size() == n + 1 && gamma_theta.size() == n;
}

double CostateState::max_abs() const {
    double m = 0.0;
    bool finite = true;
    auto visit = [&](double v) {
        finite = finite && std::isfinite(v);
        m = std::max(m, std::abs(v));
    };
    for (const auto& v : mu_r) { visit(v.x()); visit(v.y()); }
    for (const auto& v : gamma_r) { visit(v.x()); visit(v.y()); }
    for (double v : mu_theta) visit(v);
    for (double v : gamma_theta) visit(v);
    return finite ? m : std::numeric_limits<double>::quiet_NaN();
}

CostateState terminal_costate(const RodState& final_state, const Vec2& target, double chi2) {
    const int N = final_state.segments();
    CostateState c = CostateState::zeros(N);
    c.mu_r[static_cast<std::size_t>(N)] = -chi2 * (final_state.r.back() - target);
    return c;
}

namespace {

// -(dF/dq)^T gamma at configuration (r, theta), written out term by term:
//   mu_r:     -dtilde(Q S Q^T dbar(gamma_r) / ds) - dtilde(Q (M2 n - S M2 nu) gamma_theta)
//   mu_theta: -dtilde(B dbar(gamma_theta) / ds) + [Q (M2 n - S M2 nu)] . dbar(gamma_r)
//             + ds [(M2 nu) x n + nu x (S M2 nu)] gamma_theta
// The force Jacobian is symmetric (F = -grad V), so this is also -dF[gamma].
void stiffness_rates(const Vec2Array& r, const std::vector<double>& theta, const Vec2Array& gamma_r,
                     const std::vector<double>& gamma_theta, const RodProperties& props, Vec2Array& dmu_r,
                     std::vector<double>& dmu_theta) {
    const auto N = static_cast<std::size_t>(props.N);
    const double ds = props.ds, inv_ds = 1.0 / ds;
    const Mat2 M2 = quarter_turn();
    dmu_r.assign(N + 1, Vec2::Zero());
    dmu_theta.assign(N, 0.0);

    for (std::size_t j = 0; j < N; ++j) {
        const Mat2 Q = rotation(theta[j]);
        const Vec2 nu = Q.transpose() * (r[j + 1] - r[j]) * inv_ds;
        const Vec2 Sd = props.S[j];
        const Vec2 n = Sd.cwiseProduct(nu - props.nu_intrinsic[j]);
        const Vec2 dg = gamma_r[j + 1] - gamma_r[j];

        const Vec2 stretch = Q * Sd.cwiseProduct(Q.transpose() * dg) * inv_ds;
        const Vec2 M2nu = M2 * nu;
        const Vec2 w = Q * (M2 * n - Sd.cwiseProduct(M2nu));
        const Vec2 b = stretch + w * gamma_theta[j];
        dmu_r[j] -= b;
        dmu_r[j + 1] += b;
        dmu_theta[j] += w.dot(dg) + ds * (cross(M2nu, n) + cross(nu, Sd.cwiseProduct(M2nu))) * gamma_theta[j];
    }
    for (std::size_t l = 0; l + 1 < N; ++l) {
        const double c = props.B[l] * (gamma_theta[l + 1] - gamma_theta[l]) * inv_ds;
        dmu_theta[l] -= c;
        dmu_theta[l + 1] += c;
    }
    dmu_r[0] = Vec2::Zero();
    dmu_theta[0] = 0.0;
}

void check_finite(const CostateState& c, int step) {
    const double m = c.max_abs();
    if (!(m <= kBlowupLimit)) throw BlowupError("backward sweep blew up at step " + std::to_string(step), step);
}

}  // namespace

CostateRates adjoint_rhs(const CostateState& costate, const RodState& forward_state, const RodProperties& props,
                         double chi1) {
    require_sized(forward_state, props);
    if (!costate.well_sized(props.N)) throw SizeError("adjoint_rhs: costate does not match N");
    CostateRates out;
    stiffness_rates(forward_state.r, forward_state.theta, costate.gamma_r, costate.gamma_theta, props, out.mu_r,
                    out.mu_theta);
    if (chi1 != 0.0) {
        Vec2Array f_r;
        std::vector<double> f_theta;
        internal_forces(forward_state.r, forward_state.theta, props, f_r, f_theta);
        for (std::size_t i = 0; i < f_r.size(); ++i) out.mu_r[i] -= chi1 * f_r[i];
        for (std::size_t j = 0; j < f_theta.size(); ++j) out.mu_theta[j] -= chi1 * f_theta[j];
    }
    const auto N = static_cast<std::size_t>(props.N);
    out.gamma_r.assign(N + 1, Vec2::Zero());
    out.gamma_theta.assign(N, 0.0);
    for (std::size_t i = 1; i <= N; ++i)
        out.gamma_r[i] = -costate.mu_r[i] / props.node_mass(i) +
                         props.zeta * costate.gamma_r[i] / (props.rho * props.node_area[i]);
    for (std::size_t j = 1; j < N; ++j)
        out.gamma_theta[j] = -costate.mu_theta[j] / props.element_inertia(j) +
                             props.zeta * costate.gamma_theta[j] / (props.rho * props.I[j]);
    if (!(out.max_abs() <= std::numeric_limits<double>::max()))
        throw BlowupError("adjoint_rhs: non-finite costate rate", -1);
    return out;
}

BackwardSweep simulate_backward(const Trajectory& trajectory, const ControlField& control,
                                const RodProperties& props, double chi1, double chi2, const Vec2& target) {
    const int K = trajectory.steps();
    if (K < 0 || control.steps != K || control.N != props.N)
        throw SizeError("simulate_backward: trajectory and control are not aligned");
    const auto N = static_cast<std::size_t>(props.N);
    const double h = trajectory.dt, half = 0.5 * h;

    BackwardSweep out;
    out.N = props.N;
    out.steps = K;
    out.costates.resize(static_cast<std::size_t>(K) + 1);
    out.gamma_r_half.assign(static_cast<std::size_t>(K) * (N + 1), Vec2::Zero());
    out.gamma_theta_half.assign(static_cast<std::size_t>(K) * N, 0.0);

    CostateState cur = terminal_costate(trajectory.final_state(), target, chi2);
    cur.mu_r[0] = Vec2::Zero();
    out.costates[static_cast<std::size_t>(K)] = cur;

    std::vector<double> inv_mass(N + 1, 0.0), inv_inertia(N, 0.0), damp_r(N + 1, 0.0), damp_t(N, 0.0);
    for (std::size_t i = 1; i <= N; ++i) {
        inv_mass[i] = 1.0 / props.node_mass(i);
        damp_r[i] = props.zeta / (props.rho * props.node_area[i]);
    }
    for (std::size_t j = 1; j < N; ++j) {
        inv_inertia[j] = 1.0 / props.element_inertia(j);
        damp_t[j] = props.zeta / (props.rho * props.I[j]);
    }

    Vec2Array dmu_r, f_r;
    std::vector<double> dmu_t, f_t;
    for (int k = K - 1; k >= 0; --k) {
        const RodState& qk = trajectory.states[static_cast<std::size_t>(k)];
        const RodState mid = half_drift(qk, props, h);

        // Transpose of the closing half drift.
        for (std::size_t i = 0; i <= N; ++i) cur.gamma_r[i] += half * inv_mass[i] * cur.mu_r[i];
        for (std::size_t j = 0; j < N; ++j) cur.gamma_theta[j] += half * inv_inertia[j] * cur.mu_theta[j];

        auto gr_half = std::span(out.gamma_r_half).subspan(static_cast<std::size_t>(k) * (N + 1), N + 1);
        auto gt_half = std::span(out.gamma_theta_half).subspan(static_cast<std::size_t>(k) * N, N);
        std::copy(cur.gamma_r.begin(), cur.gamma_r.end(), gr_half.begin());
        std::copy(cur.gamma_theta.begin(), cur.gamma_theta.end(), gt_half.begin());

        // Transpose of the kick: stiffness at the midpoint configuration.
        stiffness_rates(mid.r, mid.theta, cur.gamma_r, cur.gamma_theta, props, dmu_r, dmu_t);
        for (std::size_t i = 0; i <= N; ++i) cur.mu_r[i] -= h * dmu_r[i];
        for (std::size_t j = 0; j < N; ++j) cur.mu_theta[j] -= h * dmu_t[j];
        for (std::size_t i = 0; i <= N; ++i) cur.gamma_r[i] *= (1.0 - h * damp_r[i]);
        for (std::size_t j = 0; j < N; ++j) cur.gamma_theta[j] *= (1.0 - h * damp_t[j]);

        // Transpose of the opening half drift.
        for (std::size_t i = 0; i <= N; ++i) cur.gamma_r[i] += half * inv_mass[i] * cur.mu_r[i];
        for (std::size_t j = 0; j < N; ++j) cur.gamma_theta[j] += half * inv_inertia[j] * cur.mu_theta[j];

        // Running deformation cost chi1 V(q_k).
        if (chi1 != 0.0) {
            internal_forces(qk.r, qk.theta, props, f_r, f_t);
            for (std::size_t i = 0; i <= N; ++i) cur.mu_r[i] += h * chi1 * f_r[i];
            for (std::size_t j = 0; j < N; ++j) cur.mu_theta[j] += h * chi1 * f_t[j];
        }
        cur.mu_r[0] = Vec2::Zero();
        cur.mu_theta[0] = 0.0;
        cur.gamma_r[0] = Vec2::Zero();
        cur.gamma_theta[0] = 0.0;

        check_finite(cur, k);
        out.costates[static_cast<std::size_t>(k)] = cur;
    }
    return out;
}

}  // namespace cosserat
