#include "cosserat/rod_model.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace cosserat {

namespace {

double area_from_diameter(double phi) { return std::numbers::pi * phi * phi / 4.0; }

}  // namespace

RodProperties make_rod_properties(const RodParameters& params) {
    if (!(params.L0 > 0)) throw std::invalid_argument("rod: L0 must be positive");
    if (params.N < 2) throw std::invalid_argument("rod: need at least 2 segments");
    if (!(params.phi_tip > 0) || params.phi_base < params.phi_tip)
        throw std::invalid_argument("rod: require phi_base >= phi_tip > 0");
    if (!(params.rho > 0)) throw std::invalid_argument("rod: rho must be positive");
    if (!(params.E > 0)) throw std::invalid_argument("rod: E must be positive");
    if (params.zeta < 0) throw std::invalid_argument("rod: zeta must be non-negative");

    RodProperties p;
    p.L0 = params.L0;
    p.N = params.N;
    p.phi_base = params.phi_base;
    p.phi_tip = params.phi_tip;
    p.rho = params.rho;
    p.E = params.E;
    p.G = (4.0 / 3.0) * params.E / (2.0 * (1.0 + params.poisson));
    p.zeta = params.zeta;
    p.ds = params.L0 / params.N;

    const auto N = static_cast<std::size_t>(params.N);
    p.A.resize(N);
    p.I.resize(N);
    p.S.resize(N);
    p.nu_intrinsic.assign(N, Vec2(1.0, 0.0));
    for (std::size_t j = 0; j < N; ++j) {
        const double s_mid = (static_cast<double>(j) + 0.5) * p.ds;
        const double a = area_from_diameter(taper_profile(p, s_mid));
        p.A[j] = a;
        p.I[j] = a * a / (4.0 * std::numbers::pi);
        p.S[j] = Vec2(p.E * a, p.G * a);
    }

    p.B.resize(N - 1);
    p.kappa_intrinsic.assign(N - 1, 0.0);
    for (std::size_t l = 0; l + 1 < N; ++l) {
        const double s_node = static_cast<double>(l + 1) * p.ds;
        const double a = area_from_diameter(taper_profile(p, s_node));
        p.B[l] = p.E * a * a / (4.0 * std::numbers::pi);
    }

    p.node_area.assign(N + 1, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        p.node_area[j] += 0.5 * p.A[j];
        p.node_area[j + 1] += 0.5 * p.A[j];
    }
    return p;
}

double taper_profile(const RodProperties& props, double s) {
    if (!(s >= 0.0 && s <= props.L0))
        throw std::domain_error("taper_profile: s = " + std::to_string(s) + " outside [0, L0]");
    const double t = s / props.L0;
    return props.phi_base * (1.0 - t) + props.phi_tip * t;
}

RodState RodState::straight(const RodProperties& props) {
    const auto N = static_cast<std::size_t>(props.N);
    RodState st;
    st.r.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) st.r[i] = Vec2(static_cast<double>(i) * props.ds, 0.0);
    st.theta.assign(N, 0.0);
    st.p_r.assign(N + 1, Vec2::Zero());
    st.p_theta.assign(N, 0.0);
    return st;
}

bool RodState::well_sized(int N) const {
    const auto n = static_cast<std::size_t>(N);
    return r.size() == n + 1 && theta.size() == n && p_r.size() == n + 1 && p_theta.size() == n;
}

double RodState::max_abs() const {
    double m = 0.0;
    auto visit = [&m](double v) {
        if (!std::isfinite(v)) m = std::numeric_limits<double>::quiet_NaN();
        else if (!std::isnan(m)) m = std::max(m, std::abs(v));
    };
    for (const auto& v : r) { visit(v.x()); visit(v.y()); }
    for (const auto& v : p_r) { visit(v.x()); visit(v.y()); }
    for (double v : theta) visit(v);
    for (double v : p_theta) visit(v);
    return m;
}

void require_sized(const RodState& state, const RodProperties& props) {
    if (!state.well_sized(props.N))
        throw SizeError("rod state arrays do not match N = " + std::to_string(props.N));
}

StrainField compute_strains(const RodState& state, const RodProperties& props) {
    require_sized(state, props);
    const auto N = static_cast<std::size_t>(props.N);
    const double inv_ds = 1.0 / props.ds;
    StrainField f;
    f.nu.resize(N);
    f.sigma.resize(N);
    f.kappa.resize(N - 1);
    for (std::size_t j = 0; j < N; ++j) {
        const double c = std::cos(state.theta[j]), s = std::sin(state.theta[j]);
        const Vec2 e = (state.r[j + 1] - state.r[j]) * inv_ds;
        // Q^T e
        f.nu[j] = Vec2(c * e.x() + s * e.y(), -s * e.x() + c * e.y());
        f.sigma[j] = f.nu[j] - props.nu_intrinsic[j];
    }
    for (std::size_t l = 0; l + 1 < N; ++l) f.kappa[l] = (state.theta[l + 1] - state.theta[l]) * inv_ds;
    return f;
}

InternalLoads internal_loads(const StrainField& strains, const RodProperties& props) {
    const auto N = static_cast<std::size_t>(props.N);
    if (strains.sigma.size() != N || strains.kappa.size() + 1 != N)
        throw SizeError("internal_loads: strain field does not match N");
    InternalLoads out;
    out.n.resize(N);
    out.m.resize(N - 1);
    for (std::size_t j = 0; j < N; ++j) out.n[j] = props.S[j].cwiseProduct(strains.sigma[j]);
    for (std::size_t l = 0; l + 1 < N; ++l) out.m[l] = props.B[l] * (strains.kappa[l] - props.kappa_intrinsic[l]);
    return out;
}

double potential_energy(const RodState& state, const RodProperties& props) {
    const StrainField f = compute_strains(state, props);
    double v = 0.0;
    for (std::size_t j = 0; j < f.sigma.size(); ++j)
        v += 0.5 * f.sigma[j].dot(props.S[j].cwiseProduct(f.sigma[j]));
    for (std::size_t l = 0; l < f.kappa.size(); ++l) {
        const double dk = f.kappa[l] - props.kappa_intrinsic[l];
        v += 0.5 * props.B[l] * dk * dk;
    }
    return v * props.ds;
}

Energies energies(const RodState& state, const RodProperties& props) {
    require_sized(state, props);
    double t = 0.0;
    for (std::size_t i = 0; i < state.p_r.size(); ++i) t += state.p_r[i].squaredNorm() / props.node_mass(i);
    for (std::size_t j = 0; j < state.p_theta.size(); ++j)
        t += state.p_theta[j] * state.p_theta[j] / props.element_inertia(j);
    Energies e;
    e.kinetic = 0.5 * t;
    e.potential = potential_energy(state, props);
    e.total = e.kinetic + e.potential;
    return e;
}

}  // namespace cosserat
