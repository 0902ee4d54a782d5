#include <catch_amalgamated.hpp>

#include <cmath>

#include "t4/kinetics.hpp"

using namespace t4;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("steady state in closed form", "[kinetics]") {
    const auto s = gm_steady_state({});
    CHECK(s.u0 == 2.5);
    CHECK(s.v0 == 6.25);
    const GMConstants c{0.3, 0.7, 1.3, 0.9, 1.1};
    const auto t = gm_steady_state(c);
    const auto r = gm_eval(c, t.u0, t.v0);
    CHECK_THAT(r.f, WithinAbs(0.0, 1e-13));
    CHECK_THAT(r.g, WithinAbs(0.0, 1e-13));
    CHECK_THROWS_AS(gm_steady_state({0.0, 1e-320, 1.0, 1.0, 1.0}), NoSteadyState);
    CHECK_THROWS_AS(gm_steady_state({0.0, -0.4, 1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("Jacobian at the default constants", "[kinetics]") {
    const auto J = gm_jacobian({}, gm_steady_state({}));
    CHECK_THAT(J.f_u, WithinAbs(0.4, 1e-12));
    CHECK_THAT(J.f_v, WithinAbs(-0.16, 1e-12));
    CHECK_THAT(J.g_u, WithinAbs(5.0, 1e-12));
    CHECK_THAT(J.g_v, WithinAbs(-1.0, 1e-12));
    const auto p = J.with_ratio(30.0);
    CHECK(p.k == 30.0);
}

TEST_CASE("Jacobian matches central differences", "[kinetics][property]") {
    for (const GMConstants c : {GMConstants{}, GMConstants{0.3, 0.7, 1.3, 0.9, 1.1}, GMConstants{1.0, 2.0, 0.5, 3.0, 0.2}}) {
        const auto s = gm_steady_state(c);
        const auto J = gm_jacobian(c, s);
        const double hu = 1e-6 * s.u0, hv = 1e-6 * s.v0;
        auto at = [&](double u, double v) { return gm_eval(c, u, v); };
        const double fu = (at(s.u0 + hu, s.v0).f - at(s.u0 - hu, s.v0).f) / (2 * hu);
        const double fv = (at(s.u0, s.v0 + hv).f - at(s.u0, s.v0 - hv).f) / (2 * hv);
        const double gu = (at(s.u0 + hu, s.v0).g - at(s.u0 - hu, s.v0).g) / (2 * hu);
        const double gv = (at(s.u0, s.v0 + hv).g - at(s.u0, s.v0 - hv).g) / (2 * hv);
        CHECK_THAT(J.f_u, WithinAbs(fu, 1e-6 * (1 + std::abs(fu))));
        CHECK_THAT(J.f_v, WithinAbs(fv, 1e-6 * (1 + std::abs(fv))));
        CHECK_THAT(J.g_u, WithinAbs(gu, 1e-6 * (1 + std::abs(gu))));
        CHECK_THAT(J.g_v, WithinAbs(gv, 1e-6 * (1 + std::abs(gv))));
    }
}

TEST_CASE("inhibitor floor", "[kinetics]") {
    const GMConstants c{};
    const auto r = gm_eval(c, 1.0, -2.0);
    CHECK(r.floored);
    CHECK_THAT(r.f, WithinRel(-0.4 + 1.0 / default_v_floor, 1e-12));
    CHECK_FALSE(gm_eval(c, 1.0, 1.0).floored);
}

TEST_CASE("kinetics models", "[kinetics]") {
    static_assert(Kinetics<GiererMeinhardt>);
    static_assert(Kinetics<LinearKinetics>);
    static_assert(Kinetics<NoReaction>);
    const LinearKinetics lin{{1.0, 2.0, 3.0, 4.0}};
    const auto r = lin.eval(1.0, -1.0);
    CHECK(r.f == -1.0);
    CHECK(r.g == -1.0);
    CHECK(NoReaction{}.eval(5.0, 5.0).f == 0.0);
}
