#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "t4/spectrum.hpp"

using namespace t4;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Anchor {
    Parity parity;
    int l;
    double tau;
    double mu;
};

// Free rod on (-1, 1), from a 40-digit evaluation of the 2x2 boundary
// determinant in each symmetry class.
const Anchor anchors[] = {
    {Parity::Even, 0, 0.0, 31.285243858777037},    {Parity::Odd, 1, 0.0, 237.72106753111665},
    {Parity::Even, 1, 0.0, 913.60188319514642},    {Parity::Odd, 0, 10.0, 27.258802872502704},
    {Parity::Even, 0, 10.0, 147.22472798648474},   {Parity::Odd, 1, 10.0, 501.81326008096122},
    {Parity::Odd, 0, -5.0, -18.02955782393372},    {Parity::Even, 0, -5.0, -34.128865103892984},
    {Parity::Odd, 0, -20.0, -419.70556126207079},  {Parity::Even, 0, -20.0, -377.48993745678624},
    {Parity::Even, 0, -30.0, -901.10900163332774}, {Parity::Odd, 0, -30.0, -898.95180673577257},
    {Parity::Even, 1, -30.0, -147.0511877757039},  {Parity::Odd, 1, -30.0, -69.217638104885024},
};

}  // namespace

TEST_CASE("free branches match high-precision anchors", "[spectrum]") {
    for (const auto& a : anchors) {
        INFO(to_string(a.parity) << " l=" << a.l << " tau=" << a.tau);
        CHECK_THAT(free_branch_mu({a.parity, a.l}, a.tau, 1.0), WithinRel(a.mu, 1e-11));
        CHECK_THAT(determinant_branch_mu({a.parity, a.l}, a.tau, 1.0), WithinRel(a.mu, 1e-11));
    }
}

TEST_CASE("branches cross zero at the window starts", "[spectrum]") {
    CHECK_THAT(free_branch_mu({Parity::Even, 0}, -pi * pi / 4, 1.0), WithinAbs(0.0, 1e-9));
    CHECK_THAT(free_branch_mu({Parity::Odd, 1}, -pi * pi, 1.0), WithinAbs(0.0, 1e-9));
    CHECK_THAT(free_branch_mu({Parity::Odd, 0}, 0.0, 1.0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(determinant_branch_mu({Parity::Even, 0}, -pi * pi / 4, 1.0), WithinAbs(0.0, 1e-9));
    CHECK_THAT(determinant_branch_mu({Parity::Odd, 1}, -pi * pi, 1.0), WithinAbs(0.0, 1e-9));
}

TEST_CASE("rescaling to the unit interval", "[spectrum]") {
    for (double R : {0.3, 2.0, 7.5})
        for (double tau : {-3.0, -0.4, 0.0, 1.7}) {
            const double T = tau * R * R;
            for (Parity p : {Parity::Even, Parity::Odd})
                for (int l = 0; l < 3; ++l)
                    CHECK_THAT(free_branch_mu({p, l}, tau, R),
                               WithinRel(free_branch_mu({p, l}, T, 1.0) / std::pow(R, 4), 1e-12));
        }
    const auto s = rescale_mu(31.285243858777037, 0.0, 2.0);
    CHECK_THAT(s.mu, WithinRel(31.285243858777037 / 16.0, 1e-15));
    const auto u = unit_pair(s.mu, 0.3, 2.0);
    CHECK_THAT(u.mu, WithinRel(31.285243858777037, 1e-15));
    CHECK_THAT(u.tau, WithinRel(1.2, 1e-15));
}

TEST_CASE("branches increase with tension", "[spectrum][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> tau(-40.0, 40.0);
    for (int i = 0; i < 60; ++i) {
        const double t = tau(rng);
        for (Parity p : {Parity::Even, Parity::Odd})
            for (int l = 0; l < 3; ++l) CHECK(free_branch_mu({p, l}, t, 1.0) < free_branch_mu({p, l}, t + 0.25, 1.0));
    }
}

TEST_CASE("branch indices are ordered and parities interlace", "[spectrum][property]") {
    for (double t : {-60.0, -12.0, -1.0, 0.0, 3.0, 50.0}) {
        for (Parity p : {Parity::Even, Parity::Odd})
            for (int l = 0; l < 4; ++l) CHECK(free_branch_mu({p, l}, t, 1.0) < free_branch_mu({p, l + 1}, t, 1.0));
        if (t >= 0.0)
            for (int l = 0; l < 3; ++l) {
                CHECK(free_branch_mu({Parity::Odd, l}, t, 1.0) < free_branch_mu({Parity::Even, l}, t, 1.0));
                CHECK(free_branch_mu({Parity::Even, l}, t, 1.0) < free_branch_mu({Parity::Odd, l + 1}, t, 1.0));
            }
    }
}

TEST_CASE("spectrum lists", "[spectrum]") {
    SECTION("free, tau = 0 has a double zero") {
        const auto pts = spectrum_list({0.0, Boundary::Free}, 1.0, 3);
        REQUIRE(pts.size() == 3);
        CHECK(pts[0].mu == 0.0);
        CHECK_THAT(pts[1].mu, WithinAbs(0.0, 1e-12));
        CHECK_THAT(pts[2].mu, WithinRel(31.285243858777037, 1e-12));
    }
    SECTION("free, strongly negative tension starts below zero") {
        const auto pts = spectrum_list({-20.0, Boundary::Free}, 1.0, 2);
        CHECK_THAT(pts[0].mu, WithinRel(-419.70556126207079, 1e-11));
        CHECK(pts[0].method == Method::Determinant);
        CHECK(pts[0].branch == EigenBranchId{Parity::Odd, 0});
    }
    SECTION("param and det modes agree") {
        for (double t : {-25.0, -2.0, 0.5, 8.0}) {
            const auto a = spectrum_list({t, Boundary::Free}, 1.3, 8);
            const auto b = spectrum_list({t, Boundary::Free}, 1.3, 8, Method::Determinant);
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].branch == b[i].branch);
                CHECK_THAT(a[i].mu, WithinAbs(b[i].mu, 1e-9 * std::max(1.0, std::abs(a[i].mu))));
            }
        }
    }
    SECTION("sorted") {
        const auto pts = spectrum_list({-7.0, Boundary::Free}, 2.0, 12);
        CHECK(std::is_sorted(pts.begin(), pts.end(), [](auto& x, auto& y) { return x.mu < y.mu; }));
    }
    SECTION("periodic closed form with multiplicity two") {
        const auto pts = spectrum_list({0.0, Boundary::Periodic}, 1.0, 3);
        CHECK(pts[0].mu == 0.0);
        CHECK_THAT(pts[1].mu, WithinRel(std::pow(pi, 4), 1e-14));
        CHECK(pts[1].mu == pts[2].mu);
        CHECK(pts[1].method == Method::Exact);
        CHECK_THAT(periodic_mu(2, -1.0, 2.0), WithinRel(87.5394866329131, 1e-12));
    }
    SECTION("up to a ceiling") {
        const auto pts = spectrum_up_to({0.5, Boundary::Free}, 20.0, 0.4);
        REQUIRE(!pts.empty());
        for (const auto& p : pts) CHECK(p.mu <= 0.4);
        CHECK(pts.size() == spectrum_list({0.5, Boundary::Free}, 20.0, static_cast<int>(pts.size()) + 1).size() - 1);
    }
}

TEST_CASE("lowest free eigenvalue and muast search", "[spectrum]") {
    CHECK_THAT(lowest_free_mu(-20.0, 1.0), WithinRel(-419.70556126207079, 1e-11));
    const auto s1 = muast_search(-1.0, 1.0);
    REQUIRE(s1.found);
    CHECK(s1.mu1 <= -1.0);
    CHECK_THAT(lowest_free_mu(-1.0, s1.R), WithinRel(s1.mu1, 1e-12));
    const auto s10 = muast_search(-1.0, 10.0);
    REQUIRE(s10.found);
    CHECK(s10.mu1 <= -10.0);
    CHECK_FALSE(muast_search(-1.0, 1e9, 0.5, 4.0).found);
    CHECK_THROWS_AS(muast_search(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("argument errors", "[spectrum]") {
    CHECK_THROWS_AS(free_branch_mu({Parity::Even, 0}, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(spectrum_list({0.0, Boundary::Free}, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(DomainInterval(-1.0), std::invalid_argument);
    CHECK_THROWS(branch_at_tension(Parity::Odd, 1, -pi * pi - 1.0));
}

TEST_CASE("parameterization round trip", "[spectrum]") {
    for (Parity p : {Parity::Even, Parity::Odd})
        for (int l = 0; l < 3; ++l)
            for (double t : {-window_start(p, l) * window_start(p, l) + 0.01, 0.0, 4.0, 40.0}) {
                const auto b = branch_at_tension(p, l, t);
                CHECK_THAT(b.tension(), WithinAbs(t, 1e-10 * std::max(1.0, std::abs(t))));
                CHECK(b.alpha >= window_start(p, l));
                CHECK(b.alpha < window_end(p, l));
                CHECK_THAT(b.mu(), WithinAbs(determinant_branch_mu({p, l}, t, 1.0), 1e-9 * std::max(1.0, b.mu())));
            }
}
