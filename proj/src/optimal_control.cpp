#include "cosserat/optimal_control.hpp"

#include <cmath>
#include <limits>

namespace cosserat {

void CostWeights::validate() const {
    if (chi1 < 0) throw std::invalid_argument("weights: chi1 must be non-negative");
    if (!(chi2 >= 0)) throw std::invalid_argument("weights: chi2 must be non-negative");
    if (!(eta > 0)) throw std::invalid_argument("weights: eta must be positive");
    if (!(T > 0)) throw std::invalid_argument("weights: T must be positive");
}

CostBreakdown evaluate_cost(const Trajectory& trajectory, const ControlField& control, const RodProperties& props,
                            const CostWeights& weights, const Vec2& target) {
    if (trajectory.steps() != control.steps) throw SizeError("evaluate_cost: trajectory/control misaligned");
    const double dt = control.dt, ds = props.ds;
    double running = 0.0;
    for (int k = 0; k < control.steps; ++k) {
        double u2 = 0.0;
        for (const auto& f : control.force_at(k)) u2 += f.squaredNorm();
        for (double c : control.couple_at(k)) u2 += c * c;
        double v = 0.0;
        if (weights.chi1 != 0.0) v = potential_energy(trajectory.states[static_cast<std::size_t>(k)], props);
        running += dt * (0.5 * ds * u2 + weights.chi1 * v);
    }
    CostBreakdown out;
    out.running = running;
    out.terminal = 0.5 * weights.chi2 * (trajectory.final_state().r.back() - target).squaredNorm();
    out.total = out.running + out.terminal;
    return out;
}

ControlField control_gradient(const BackwardSweep& sweep, const ControlField& control) {
    if (sweep.N != control.N || sweep.steps != control.steps)
        throw SizeError("control_gradient: costate and control shapes differ");
    ControlField g(control.N, control.steps, control.dt);
    for (std::size_t i = 0; i < g.force.size(); ++i) g.force[i] = sweep.gamma_r_half[i] - control.force[i];
    for (std::size_t i = 0; i < g.couple.size(); ++i) g.couple[i] = sweep.gamma_theta_half[i] - control.couple[i];
    return g;
}

ControlField update_control(const ControlField& control, const ControlField& gradient, double eta) {
    if (!(eta > 0)) throw std::invalid_argument("update_control: eta must be positive");
    if (!control.same_shape(gradient)) throw SizeError("update_control: shape mismatch");
    ControlField next = control;
    for (std::size_t i = 0; i < next.force.size(); ++i) next.force[i] += eta * gradient.force[i];
    for (std::size_t i = 0; i < next.couple.size(); ++i) next.couple[i] += eta * gradient.couple[i];
    return next;
}

double control_inner(const ControlField& a, const ControlField& b, double ds) {
    if (!a.same_shape(b)) throw SizeError("control_inner: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.force.size(); ++i) s += a.force[i].dot(b.force[i]);
    for (std::size_t i = 0; i < a.couple.size(); ++i) s += a.couple[i] * b.couple[i];
    return s * a.dt * ds;
}

double max_abs_difference(const ControlField& a, const ControlField& b) {
    if (!a.same_shape(b)) throw SizeError("max_abs_difference: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.force.size(); ++i) m = std::max(m, (a.force[i] - b.force[i]).cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < a.couple.size(); ++i) m = std::max(m, std::abs(a.couple[i] - b.couple[i]));
    return m;
}

int steps_for_horizon(double T, double dt) {
    if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("horizon and step must be positive");
    const double n = T / dt;
    const long steps = std::lround(n);
    if (steps < 1 || std::abs(n - static_cast<double>(steps)) > 1e-6 * n)
        throw std::invalid_argument("T = " + std::to_string(T) + " is not a whole number of steps of dt = " +
                                    std::to_string(dt));
    return static_cast<int>(steps);
}

SolveResult solve(const RodState& initial, const RodProperties& props, const CostWeights& weights,
                  const Vec2& target, double dt, const SolveOptions& options) {
    weights.validate();
    if (options.max_iters < 1) throw std::invalid_argument("solve: max_iters must be at least 1");
    const int steps = steps_for_horizon(weights.T, dt);

    ControlField u = options.initial_control.value_or(ControlField(props.N, steps, dt));
    if (u.N != props.N || u.steps != steps || u.dt != dt)
        throw SizeError("solve: initial control does not match the horizon grid");

    SolveResult result;
    SolveLog& log = result.log;
    int rising = 0;
    for (int k = 1; k <= options.max_iters; ++k) {
        const double eta = options.eta_schedule ? options.eta_schedule(k) : weights.eta;
        Trajectory traj;
        BackwardSweep sweep;
        try {
            traj = simulate_forward(initial, u, props);
            if (options.on_iteration) options.on_iteration(k, traj, u);
            sweep = simulate_backward(traj, u, props, weights.chi1, weights.chi2, target);
        } catch (const BlowupError& e) {
            throw SolveAborted(std::string("iteration ") + std::to_string(k) + ": " + e.what(), log);
        }
        const CostBreakdown cost = evaluate_cost(traj, u, props, weights, target);
        // eta is a rate per unit segment length: the pointwise step is eta * ds * (gamma - u).
        ControlField next = update_control(u, control_gradient(sweep, u), eta * props.ds);

        IterationRecord rec;
        rec.k = k;
        rec.J = cost.total;
        rec.J_running = cost.running;
        rec.J_terminal = cost.terminal;
        rec.du_max = max_abs_difference(next, u);
        rec.tip_dist = (traj.final_state().r.back() - target).norm();
        if (!log.records.empty()) {
            rising = rec.J >= log.records.back().J ? rising + 1 : 0;
            if (rising == 5)
                log.warnings.push_back("J has not decreased for 5 consecutive iterations (k = " +
                                       std::to_string(k) + "); learning rate may be too large");
        }
        log.records.push_back(rec);

        result.control = std::move(u);
        result.trajectory = std::move(traj);
        result.next_control = next;
        if (rec.du_max < options.epsilon) {
            result.converged = true;
            break;
        }
        u = std::move(next);
    }
    return result;
}

}  // namespace cosserat
