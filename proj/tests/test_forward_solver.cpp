#include <doctest.h>

#include <cmath>
#include <random>

#include "cosserat/experiments.hpp"
#include "cosserat/forward_solver.hpp"
#include "oracles.hpp"

using namespace cosserat;
using doctest::Approx;

namespace {

RodProperties rod(int N, double zeta = 0.01) {
    RodParameters p;
    p.N = N;
    p.zeta = zeta;
    return make_rod_properties(p);
}

RodState bent(const RodProperties& p) {
    ExperimentConfig c = preset(TaskCase::shoot);
    c.rod.N = p.N;
    return initial_bent_state(c, p);
}

// A state with stretch, shear and bending all active.
RodState deformed(const RodProperties& p, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    RodState s = bent(p);
    for (std::size_t i = 1; i < s.r.size(); ++i) s.r[i] += 0.05 * p.ds * Vec2(u(rng), u(rng));
    for (std::size_t j = 1; j < s.theta.size(); ++j) s.theta[j] += 0.05 * u(rng);
    return s;
}

struct Zero {
    Vec2Array uF;
    std::vector<double> uC;
    explicit Zero(int N) : uF(static_cast<std::size_t>(N) + 1, Vec2::Zero()), uC(static_cast<std::size_t>(N), 0.0) {}
};

}  // namespace

TEST_SUITE("forward-solver") {
    TEST_CASE("rest state has zero rates") {
        const RodProperties p = rod(20);
        const Zero z(20);
        const MomentumRates r = forward_rhs(RodState::straight(p), z.uF, z.uC, p);
        for (const auto& v : r.dp_r) CHECK(v.norm() < 1e-12);
        for (double v : r.dp_theta) CHECK(std::abs(v) < 1e-12);
    }

    TEST_CASE("a tip force enters only at the tip, scaled by ds") {
        const RodProperties p = rod(20);
        Zero z(20);
        z.uF[20] = Vec2(0, 3.0);
        const MomentumRates r = forward_rhs(RodState::straight(p), z.uF, z.uC, p);
        for (std::size_t i = 0; i < 20; ++i) CHECK(r.dp_r[i].norm() < 1e-12);
        CHECK((r.dp_r[20] - Vec2(0, 3.0 * p.ds)).norm() < 1e-12);
        z.uF[0] = Vec2(5, 5);  // the clamped base ignores controls
        z.uC[0] = 2.0;
        const MomentumRates b = forward_rhs(RodState::straight(p), z.uF, z.uC, p);
        CHECK(b.dp_r[0].norm() == 0.0);
        CHECK(b.dp_theta[0] == 0.0);
    }

    TEST_CASE("internal forces are minus the gradient of the stored energy") {
        const RodProperties p = rod(10);
        for (unsigned seed : {1u, 2u, 3u}) {
            const RodState s = deformed(p, seed);
            Vec2Array fr;
            std::vector<double> ft;
            internal_forces(s.r, s.theta, p, fr, ft);
            const double h = 1e-7;
            for (std::size_t i = 1; i < s.r.size(); ++i)
                for (int c = 0; c < 2; ++c) {
                    RodState a = s, b = s;
                    a.r[i][c] += h;
                    b.r[i][c] -= h;
                    const double g = (potential_energy(a, p) - potential_energy(b, p)) / (2 * h);
                    CHECK(fr[i][c] == Approx(-g).epsilon(1e-5).scale(1e-6));
                }
            for (std::size_t j = 1; j < s.theta.size(); ++j) {
                RodState a = s, b = s;
                a.theta[j] += h;
                b.theta[j] -= h;
                const double g = (potential_energy(a, p) - potential_energy(b, p)) / (2 * h);
                CHECK(ft[j] == Approx(-g).epsilon(1e-5).scale(1e-8));
            }
            CHECK(fr[0].norm() == 0.0);
            CHECK(ft[0] == 0.0);
        }
    }

    TEST_CASE("a pure bend is restored toward the intrinsic curvature") {
        RodProperties p = rod(10);
        const double k0 = 5.0;
        std::fill(p.kappa_intrinsic.begin(), p.kappa_intrinsic.end(), k0);
        const Zero z(10);
        const MomentumRates r = forward_rhs(RodState::straight(p), z.uF, z.uC, p);
        for (const auto& v : r.dp_r) CHECK(v.norm() < 1e-12);
        // m = -B k0 at every interior node; dtilde(m) on elements 1..N-1.
        for (std::size_t j = 1; j + 1 < 10; ++j) CHECK(r.dp_theta[j] == Approx(-p.B[j] * k0 + p.B[j - 1] * k0));
        CHECK(r.dp_theta[9] == Approx(p.B[8] * k0));
        CHECK(r.dp_theta[9] > 0);  // the tip turns counter-clockwise, toward kappa > 0
    }

    TEST_CASE("damping opposes momentum") {
        const RodProperties p = rod(8, 0.5);
        RodState s = RodState::straight(p);
        s.p_r[5] = Vec2(1e-3, 0);
        s.p_theta[3] = 1e-6;
        const Zero z(8);
        const MomentumRates r = forward_rhs(s, z.uF, z.uC, p);
        CHECK(r.dp_r[5].x() == Approx(-0.5 * 1e-3 / (p.rho * p.node_area[5])));
        CHECK(r.dp_theta[3] == Approx(-0.5 * 1e-6 / (p.rho * p.I[3])));
    }

    TEST_CASE("forward_rhs validates its inputs") {
        const RodProperties p = rod(8);
        const Zero z(8);
        const Zero wrong(7);
        CHECK_THROWS_AS(forward_rhs(RodState::straight(p), wrong.uF, z.uC, p), SizeError);
        RodState s = RodState::straight(p);
        s.r[4].y() = std::nan("");
        CHECK_THROWS_AS(forward_rhs(s, z.uF, z.uC, p), BlowupError);
    }

    TEST_CASE("verlet step: trivial cases") {
        const RodProperties p = rod(12);
        const Zero z(12);
        const RodState s = RodState::straight(p);
        const RodState n = verlet_step(s, z.uF, z.uC, p, 1e-5);
        for (std::size_t i = 0; i < s.r.size(); ++i) CHECK(n.r[i] == s.r[i]);
        CHECK_THROWS_AS(verlet_step(s, z.uF, z.uC, p, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(verlet_step(s, z.uF, z.uC, p, -1e-5), std::invalid_argument);
    }

    TEST_CASE("drift is exact for a load-free rod") {
        RodProperties p = rod(12, 0.0);
        std::fill(p.S.begin(), p.S.end(), Vec2::Zero());
        std::fill(p.B.begin(), p.B.end(), 0.0);
        RodState s = RodState::straight(p);
        const Vec2 mom(2e-6, -1e-6);
        for (std::size_t i = 1; i < s.p_r.size(); ++i) s.p_r[i] = mom;
        const Zero z(12);
        const double dt = 1e-4;
        const RodState n = verlet_step(s, z.uF, z.uC, p, dt);
        CHECK(n.r[0] == s.r[0]);
        for (std::size_t i = 1; i < s.r.size(); ++i) {
            const Vec2 expect = s.r[i] + mom / p.node_mass(i) * dt;
            CHECK((n.r[i] - expect).norm() < 1e-15);
            CHECK(n.p_r[i] == mom);
        }
    }

    TEST_CASE("simulate_forward at rest and trajectory layout") {
        const RodProperties p = rod(10);
        const RodState s = RodState::straight(p);
        const ControlField u(10, 200, 1e-5);
        const Trajectory t = simulate_forward(s, u, p);
        CHECK(t.steps() == 200);
        CHECK(t.dt == 1e-5);
        for (const auto& st : t.states)
            for (std::size_t i = 0; i < st.r.size(); ++i) CHECK(st.r[i] == s.r[i]);
        CHECK_THROWS_AS(simulate_forward(s, ControlField(9, 10, 1e-5), p), SizeError);
    }

    TEST_CASE("equilibrium holds for 1e4 steps") {
        const RodProperties p = rod(50);
        const RodState s = RodState::straight(p);
        const Trajectory t = simulate_forward(s, ControlField(50, 10000, 1e-5), p);
        double worst = 0;
        for (const auto& st : t.states)
            for (std::size_t i = 0; i < st.r.size(); ++i) worst = std::max(worst, (st.r[i] - s.r[i]).norm());
        CHECK(worst < 1e-10);
    }

    TEST_CASE("blow-ups report the step") {
        const RodProperties p = rod(10);
        ControlField u(10, 50, 1e-5);
        for (int k = 20; k < 50; ++k) u.force_at(k)[10] = Vec2(0, 1e25);
        try {
            simulate_forward(RodState::straight(p), u, p);
            FAIL("expected a blow-up");
        } catch (const BlowupError& e) {
            CHECK(e.step() >= 21);
            CHECK(e.step() <= 50);
        }
    }

    TEST_CASE("conservative core is time reversible") {
        const RodProperties p = rod(30, 0.0);
        const RodState s0 = bent(p);
        const Zero z(30);
        RodState s = s0;
        for (int k = 0; k < 1000; ++k) s = verlet_step(s, z.uF, z.uC, p, 1e-5);
        for (auto& v : s.p_r) v = -v;
        for (auto& v : s.p_theta) v = -v;
        for (int k = 0; k < 1000; ++k) s = verlet_step(s, z.uF, z.uC, p, 1e-5);
        double scale = 0, err = 0;
        for (std::size_t i = 0; i < s.r.size(); ++i) {
            scale = std::max(scale, s0.r[i].norm());
            err = std::max(err, (s.r[i] - s0.r[i]).norm());
        }
        CHECK(err / scale < 1e-8);
    }

    TEST_CASE("energy stays bounded without damping") {
        const RodProperties p = rod(100, 0.0);
        RodState s = bent(p);
        const double H0 = energies(s, p).total;
        const Zero z(100);
        double worst = 0;
        for (int k = 0; k < 10000; ++k) {
            s = verlet_step(s, z.uF, z.uC, p, 1e-5);
            worst = std::max(worst, std::abs(energies(s, p).total - H0) / H0);
        }
        CHECK(worst < 1e-3);
    }

    TEST_CASE("damping dissipates energy after the first step from rest") {
        const RodProperties p = rod(100, 0.01);
        RodState s = bent(p);
        const Zero z(100);
        s = verlet_step(s, z.uF, z.uC, p, 1e-5);
        double H = energies(s, p).total;
        for (int k = 1; k < 10000; ++k) {
            s = verlet_step(s, z.uF, z.uC, p, 1e-5);
            const double Hn = energies(s, p).total;
            CHECK_MESSAGE(Hn <= H * (1 + 1e-14), "step ", k);
            H = Hn;
        }
    }

    TEST_CASE("the first step from rest gains energy at fourth order in dt") {
        // Starting at rest, the damping term has no momentum to act on, and the
        // position Verlet energy error is positive definite.
        const RodProperties p = rod(100, 0.01);
        const RodState s0 = bent(p);
        const Zero z(100);
        const double H0 = energies(s0, p).total;
        auto rise = [&](double dt) { return energies(verlet_step(s0, z.uF, z.uC, p, dt), p).total - H0; };
        const double r1 = rise(1e-5), r2 = rise(5e-6);
        CHECK(r1 > 0);
        CHECK(r1 / H0 < 1e-10);
        CHECK(r1 / r2 == Approx(16.0).epsilon(0.05));
    }
}
