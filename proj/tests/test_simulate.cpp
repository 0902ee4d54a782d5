#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "t4/simulate.hpp"

using namespace t4;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
SimConfig short_run(double tau, double t_max) {
    SimConfig c;
    c.tau = tau;
    c.t_max = t_max;
    return c;
}
}  // namespace

TEST_CASE("steady state is a fixed point", "[simulate]") {
    for (double tau : {0.5, -0.3}) {
        SimConfig cfg = short_run(tau, 1.0);
        const auto s = gm_steady_state(cfg.kinetics);
        SimState st;
        st.u.assign(256, s.u0);
        st.v.assign(256, s.v0);
        for (int i = 0; i < 3; ++i) st = step_imex(st, cfg);
        for (std::size_t i = 0; i < st.u.size(); ++i) {
            CHECK(st.u[i] == s.u0);
            CHECK(st.v[i] == s.v0);
        }
        cfg.perturbation_amplitude = 0.0;
        const auto rep = run(cfg);
        CHECK(rep.classification == Classification::Decayed);
        CHECK(rep.amplitude == 0.0);
    }
}

TEST_CASE("pure diffusion conserves mass", "[simulate][property]") {
    for (double tau : {0.5, -0.3, 2.0}) {
        ImexStepper st(build_diffusion_matrix(20.0, tau, 256), 30.0, 1e-3);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(0.5, 1.5);
        std::vector<double> u(256), v(256);
        for (auto& x : u) x = d(rng);
        for (auto& x : v) x = d(rng);
        const double mu0 = st.op().integrate(u), mv0 = st.op().integrate(v);
        const int steps = 5000;
        for (int i = 0; i < steps; ++i) st.step(u, v, NoReaction{});
        const double T = steps * st.dt();
        CHECK(std::abs(st.op().integrate(u) - mu0) / std::abs(mu0) / T < 1e-10);
        CHECK(std::abs(st.op().integrate(v) - mv0) / std::abs(mv0) / T < 1e-10);
    }
}

TEST_CASE("time step is halved until the implicit matrix is definite", "[simulate]") {
    ImexStepper ok(build_diffusion_matrix(20.0, 0.5, 256), 30.0, 1e-3);
    CHECK(ok.halvings() == 0);
    ImexStepper neg(build_diffusion_matrix(20.0, -40.0, 256), 30.0, 1e-2);
    CHECK(neg.halvings() > 0);
    CHECK(neg.dt() < 1e-2);
}

TEST_CASE("runs are deterministic in the seed", "[simulate]") {
    SimConfig cfg = short_run(0.5, 2.0);
    cfg.seed = 42;
    std::vector<double> a, b;
    run(cfg, [&](double, const std::vector<double>& u, const std::vector<double>&) { a = u; });
    run(cfg, [&](double, const std::vector<double>& u, const std::vector<double>&) { b = u; });
    CHECK(a == b);
    cfg.seed = 43;
    std::vector<double> c;
    run(cfg, [&](double, const std::vector<double>& u, const std::vector<double>&) { c = u; });
    CHECK(a != c);
}

TEST_CASE("snapshots follow the stride", "[simulate]") {
    SimConfig cfg = short_run(0.5, 1.0);
    cfg.snapshot_stride = 250;
    std::vector<double> times;
    run(cfg, [&](double t, const std::vector<double>&, const std::vector<double>&) { times.push_back(t); });
    REQUIRE(times.size() == 5);
    CHECK(times.front() == 0.0);
    CHECK_THAT(times.back(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("negative mode in the stable gap decays", "[simulate]") {
    // mu_0^odd ~ 3 tau / R^2 = -0.009 lies in (A, 0); all other modes exceed b.
    SimConfig cfg = short_run(-0.003, 50.0);
    cfg.R = 1.0;
    const auto rep = run(cfg);
    CHECK(rep.classification == Classification::Decayed);
}

TEST_CASE("blow-up detection", "[simulate]") {
    std::vector<double> u(4, 1.0), v(4, 1.0);
    CHECK_FALSE(fields_blown_up(u, v));
    u[2] = 2e6;
    CHECK(fields_blown_up(u, v));
    u[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK(fields_blown_up(u, v));
}

TEST_CASE("linear probe reproduces the dispersion relation", "[simulate]") {
    const SimConfig cfg;
    const auto m = probe_linear_rate(cfg, {Parity::Even, 1});
    CHECK(m.predicted_rate > 0.0);
    CHECK_THAT(m.measured_rate, WithinRel(m.predicted_rate, 0.05));
    CHECK_THAT(m.mu_discrete, WithinRel(m.mu, 1e-2));
}

TEST_CASE("configuration validation", "[simulate]") {
    SimConfig c;
    c.n_grid = 64;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    c = {};
    c.dt = 0.1;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    c = {};
    c.kinetics.k2 = 0.0;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
}
