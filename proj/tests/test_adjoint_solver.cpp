#include <doctest.h>

#include <random>

#include "cosserat/adjoint_solver.hpp"
#include "cosserat/experiments.hpp"
#include "oracles.hpp"

using namespace cosserat;
using doctest::Approx;

namespace {

RodProperties rod(int N) {
    RodParameters p;
    p.N = N;
    return make_rod_properties(p);
}

RodState deformed(const RodProperties& p, unsigned seed) {
    ExperimentConfig c = preset(TaskCase::shoot);
    c.rod.N = p.N;
    RodState s = initial_bent_state(c, p);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t i = 1; i < s.r.size(); ++i) s.r[i] += 0.05 * p.ds * Vec2(u(rng), u(rng));
    for (std::size_t j = 1; j < s.theta.size(); ++j) s.theta[j] += 0.05 * u(rng);
    for (std::size_t i = 1; i < s.p_r.size(); ++i) s.p_r[i] = 1e-5 * Vec2(u(rng), u(rng));
    for (std::size_t j = 1; j < s.p_theta.size(); ++j) s.p_theta[j] = 1e-10 * u(rng);
    return s;
}

CostateState random_costate(int N, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n01;
    CostateState c = CostateState::zeros(N);
    for (std::size_t i = 1; i < c.mu_r.size(); ++i) {
        c.mu_r[i] = Vec2(n01(rng), n01(rng));
        c.gamma_r[i] = Vec2(n01(rng), n01(rng));
    }
    for (std::size_t j = 1; j < c.mu_theta.size(); ++j) {
        c.mu_theta[j] = 1e-3 * n01(rng);
        c.gamma_theta[j] = 1e-3 * n01(rng);
    }
    return c;
}

}  // namespace

TEST_SUITE("adjoint-solver") {
    TEST_CASE("terminal costate") {
        const RodProperties p = rod(10);
        RodState s = RodState::straight(p);
        s.r[10] = Vec2(0.10, 0.10);
        const CostateState c = terminal_costate(s, Vec2(0.09, 0.09), 2e4);
        CHECK(c.mu_r[10].x() == Approx(-200.0));
        CHECK(c.mu_r[10].y() == Approx(-200.0));
        for (std::size_t i = 0; i < 10; ++i) CHECK(c.mu_r[i].norm() == 0.0);
        CHECK(c.max_abs() == Approx(200.0));
        CHECK(terminal_costate(s, Vec2(0.10, 0.10), 2e4).max_abs() == 0.0);
        CHECK(terminal_costate(s, Vec2(0.09, 0.09), 0.0).max_abs() == 0.0);
    }

    TEST_CASE("adjoint_rhs forcing isolation") {
        const RodProperties p = rod(10);
        const RodState s = deformed(p, 5);
        const CostateRates r0 = adjoint_rhs(CostateState::zeros(10), s, p, 0.0);
        CHECK(r0.max_abs() == 0.0);

        const CostateRates r = adjoint_rhs(CostateState::zeros(10), s, p, 7.0);
        Vec2Array fr;
        std::vector<double> ft;
        internal_forces(s.r, s.theta, p, fr, ft);
        for (std::size_t i = 0; i < fr.size(); ++i) CHECK((r.mu_r[i] + 7.0 * fr[i]).norm() <= 1e-12 * fr[i].norm());
        for (std::size_t j = 0; j < ft.size(); ++j) CHECK(r.mu_theta[j] == Approx(-7.0 * ft[j]));
        for (const auto& g : r.gamma_r) CHECK(g.norm() == 0.0);
        for (double g : r.gamma_theta) CHECK(g == 0.0);
    }

    TEST_CASE("mu rates are minus the transposed force Jacobian applied to gamma") {
        const RodProperties p = rod(10);
        for (bool straight : {true, false}) {
            const RodState s = straight ? RodState::straight(p) : deformed(p, 9);
            const CostateState c = random_costate(10, 21);
            const CostateRates r = adjoint_rhs(c, s, p, 0.0);
            const auto J = oracle::force_jacobian(s, p);
            const auto g = oracle::flatten(c.gamma_r, c.gamma_theta);
            const auto mu = oracle::flatten(r.mu_r, r.mu_theta);
            double scale = 0;
            std::vector<double> expect(g.size(), 0.0);
            for (std::size_t col = 0; col < g.size(); ++col) {
                for (std::size_t row = 0; row < g.size(); ++row) expect[col] -= J[row][col] * g[row];
                scale = std::max(scale, std::abs(expect[col]));
            }
            // Entries dual to the clamped base are pinned to zero.
            expect[0] = expect[1] = expect[22] = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                CHECK_MESSAGE(std::abs(mu[i] - expect[i]) <= 1e-6 * scale, "entry ", i, " straight=", straight);
        }
    }

    TEST_CASE("gamma rates") {
        const RodProperties p = rod(10);
        const CostateState c = random_costate(10, 4);
        const CostateRates r = adjoint_rhs(c, RodState::straight(p), p, 0.0);
        for (std::size_t i = 1; i <= 10; ++i) {
            const Vec2 e = -c.mu_r[i] / p.node_mass(i) + p.zeta * c.gamma_r[i] / (p.rho * p.node_area[i]);
            CHECK((r.gamma_r[i] - e).norm() <= 1e-12 * e.norm());
        }
        for (std::size_t j = 1; j < 10; ++j)
            CHECK(r.gamma_theta[j] ==
                  Approx(-c.mu_theta[j] / p.element_inertia(j) + p.zeta * c.gamma_theta[j] / (p.rho * p.I[j])));
        CHECK(r.gamma_r[0].norm() == 0.0);
        CHECK(r.gamma_theta[0] == 0.0);
    }

    TEST_CASE("adjoint_rhs validates sizes") {
        const RodProperties p = rod(10);
        CHECK_THROWS_AS(adjoint_rhs(CostateState::zeros(9), RodState::straight(p), p, 0.0), SizeError);
    }

    TEST_CASE("zero miss and no running cost give a zero costate") {
        const RodProperties p = rod(8);
        const RodState s = RodState::straight(p);
        const ControlField u(8, 100, 1e-5);
        const Trajectory t = simulate_forward(s, u, p);
        const BackwardSweep b = simulate_backward(t, u, p, 0.0, 2e4, s.r.back());
        REQUIRE(b.costates.size() == 101);
        for (const auto& c : b.costates) CHECK(c.max_abs() == 0.0);
    }

    TEST_CASE("one short backward step barely moves the costate") {
        const RodProperties p = rod(8);
        const RodState s = RodState::straight(p);
        const ControlField u(8, 1, 1e-9);
        const Trajectory t = simulate_forward(s, u, p);
        const BackwardSweep b = simulate_backward(t, u, p, 0.0, 2e4, Vec2(0.1, 0.1));
        const CostateState& end = b.costates[1];
        const CostateState& start = b.costates[0];
        for (std::size_t i = 0; i < end.mu_r.size(); ++i)
            CHECK((start.mu_r[i] - end.mu_r[i]).norm() <= 1e-6 * end.mu_r.back().norm());
        for (const auto& g : start.gamma_r) CHECK(g.norm() < 1e-3 * end.mu_r.back().norm());
    }

    TEST_CASE("backward sweep is linear in the terminal costate") {
        const RodProperties p = rod(8);
        const RodState s = deformed(p, 2);
        std::mt19937 rng(1);
        const ControlField u = oracle::random_smooth_control(8, 300, 1e-5, 0.3, rng);
        const Trajectory t = simulate_forward(s, u, p);
        const BackwardSweep a = simulate_backward(t, u, p, 0.0, 1e4, Vec2(0.09, 0.09));
        const BackwardSweep b = simulate_backward(t, u, p, 0.0, 2e4, Vec2(0.09, 0.09));
        for (std::size_t k = 0; k < a.costates.size(); k += 37) {
            const auto x = oracle::flatten(a.costates[k].gamma_r, a.costates[k].mu_theta);
            const auto y = oracle::flatten(b.costates[k].gamma_r, b.costates[k].mu_theta);
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == Approx(2 * x[i]).epsilon(1e-13).scale(1e-300));
        }
        CHECK(a.gamma_r_half.size() == 300 * 9);
        CHECK(a.gamma_theta_half.size() == 300 * 8);
    }

    TEST_CASE("initial costate is minus the gradient of J with respect to the initial state") {
        const RodProperties p = rod(6);
        const RodState s0 = deformed(p, 12);
        std::mt19937 rng(8);
        const ControlField u = oracle::random_smooth_control(6, 60, 1e-5, 0.5, rng);
        CostWeights w;
        w.chi1 = 10;
        const Vec2 target(0.09, 0.09);
        const BackwardSweep b = simulate_backward(simulate_forward(s0, u, p), u, p, w.chi1, w.chi2, target);
        const CostateState& c = b.costates[0];

        auto J = [&](const RodState& s) { return oracle::cost_of(s, u, p, w, target); };
        auto fd = [&](auto poke, double h) {
            RodState a = s0, m = s0;
            poke(a, h);
            poke(m, -h);
            return (J(a) - J(m)) / (2 * h);
        };
        double scale = 0;
        for (const auto& v : c.mu_r) scale = std::max(scale, v.norm());
        for (std::size_t i = 1; i <= 6; ++i)
            for (int d = 0; d < 2; ++d) {
                const double g = fd([&](RodState& s, double h) { s.r[i][d] += h; }, 1e-7);
                CHECK_MESSAGE(std::abs(c.mu_r[i][d] + g) <= 1e-3 * std::abs(g) + 1e-7 * scale, "r ", i, d);
                const double gp = fd([&](RodState& s, double h) { s.p_r[i][d] += h; }, 1e-9);
                CHECK_MESSAGE(c.gamma_r[i][d] == Approx(-gp).epsilon(1e-3), "p_r ", i, d);
            }
        double gscale = 0;
        for (double v : c.gamma_theta) gscale = std::max(gscale, std::abs(v));
        for (std::size_t j = 1; j < 6; ++j) {
            const double g = fd([&](RodState& s, double h) { s.theta[j] += h; }, 1e-7);
            CHECK_MESSAGE(c.mu_theta[j] == Approx(-g).epsilon(1e-3), "theta ", j);
            const double gp = fd([&](RodState& s, double h) { s.p_theta[j] += h; }, 1e-8);
            CHECK_MESSAGE(std::abs(c.gamma_theta[j] + gp) <= 1e-3 * std::abs(gp) + 1e-6 * gscale, "p_theta ", j);
        }
    }

    TEST_CASE("simulate_backward checks alignment") {
        const RodProperties p = rod(8);
        const Trajectory t = simulate_forward(RodState::straight(p), ControlField(8, 10, 1e-5), p);
        CHECK_THROWS_AS(simulate_backward(t, ControlField(8, 11, 1e-5), p, 0, 1, Vec2(0, 0)), SizeError);
    }
}
