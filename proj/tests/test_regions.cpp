#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "t4/regions.hpp"

using namespace t4;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const ReactionParams p_star{0.4, -0.16, 5.0, -1.0, 30.0};
const ReactionParams p_tilde{0.1, -0.01, 20.0, -1.0, 1.0};
}  // namespace

TEST_CASE("family names round trip", "[regions]") {
    for (auto f : {RegionFamily::EPlus, RegionFamily::EMinus, RegionFamily::OPlus, RegionFamily::OMinus,
                   RegionFamily::ETilde, RegionFamily::OTilde, RegionFamily::IPerPlus, RegionFamily::IPerMinus})
        CHECK(parse_family(to_string(f)) == f);
    CHECK_FALSE(parse_family("EPlusX"));
    CHECK(label({RegionFamily::OMinus, 1}) == "OMinus(1)");
}

TEST_CASE("membership at sample points", "[regions]") {
    CHECK(region_contains({RegionFamily::EMinus, 0}, p_star, 20.0, -0.3));
    CHECK_FALSE(region_contains({RegionFamily::EMinus, 0}, p_star, 20.0, 0.3));
    CHECK(region_contains({RegionFamily::OPlus, 2}, p_star, 20.0, 0.5));
    CHECK(region_contains({RegionFamily::EPlus, 1}, p_star, 20.0, 0.5));
    CHECK_FALSE(region_contains({RegionFamily::OPlus, 1}, p_star, 20.0, 0.5));
    CHECK(region_contains({RegionFamily::OPlus, 1}, p_star, 10.0, 0.5));
}

TEST_CASE("family preconditions name the failing condition", "[regions]") {
    CHECK_THROWS_AS(region_contains({RegionFamily::OTilde, 0}, p_star, 1.0, -1.0), PreconditionError);
    CHECK_THROWS_WITH(region_contains({RegionFamily::OTilde, 0}, p_star, 1.0, -1.0), Catch::Matchers::ContainsSubstring("(16)"));
    const ReactionParams unstable{1.0, 0.0, 0.0, 1.0, 2.0};
    CHECK_THROWS_WITH(region_contains({RegionFamily::EMinus, 0}, unstable, 1.0, -1.0),
                      Catch::Matchers::ContainsSubstring("(13)"));
    CHECK_NOTHROW(region_contains({RegionFamily::OTilde, 0}, p_tilde, 1.0, -1.0));
}

TEST_CASE("boundary solves reproduce their targets", "[regions]") {
    const auto q = quantities(p_star);
    for (auto f : {RegionFamily::EPlus, RegionFamily::OPlus, RegionFamily::EMinus, RegionFamily::OMinus})
        for (int l = 0; l < 3; ++l)
            for (Side s : {Side::Top, Side::Bottom}) {
                if (kind_of(f) == RegionKind::Minus && s == Side::Bottom) {
                    CHECK_THROWS_AS(side_target(f, q, s), NoSolution);
                    continue;
                }
                const double target = side_target(f, q, s);
                for (double R : {0.2, 1.0, 4.0, 18.0}) {
                    const double tau = boundary_tau(f, l, R, target);
                    INFO(to_string(f) << l << " " << to_string(s) << " R=" << R);
                    // Rounding in tau limits the attainable residual.
                    const double d = 1e-6 * std::max(1.0, std::abs(tau));
                    const double slope = (family_branch_mu(f, l, R, tau + d) - family_branch_mu(f, l, R, tau - d)) / (2 * d);
                    const double tol = 1e-9 * std::abs(target) + 1e-14 * std::abs(tau) * std::abs(slope);
                    CHECK_THAT(family_branch_mu(f, l, R, tau), WithinAbs(target, tol));
                }
            }
}

TEST_CASE("periodic boundaries in closed form", "[regions]") {
    const auto q = quantities(p_star);
    for (int l = 1; l <= 4; ++l)
        for (double R : {3.0, 10.0}) {
            const double tau = boundary_tau(RegionFamily::IPerPlus, l, R, *q.b);
            CHECK_THAT(periodic_mu(l, tau, R), WithinRel(*q.b, 1e-12));
        }
}

TEST_CASE("boundary curves", "[regions]") {
    const auto c = boundary_curve({RegionFamily::OPlus, 0}, p_star, Side::Bottom, 120);
    REQUIRE(c.curve.size() >= 100);
    for (const auto& pt : c.curve) CHECK(pt.tau > 0.0);
    const auto m = boundary_curve({RegionFamily::OMinus, 0}, p_star, Side::Top, 60);
    for (const auto& pt : m.curve) CHECK(pt.tau < 0.0);
    const auto t = boundary_curve({RegionFamily::OTilde, 0}, p_tilde, Side::Top, 60);
    for (const auto& pt : t.curve) CHECK(pt.tau < 0.0);
    CHECK_THROWS_AS(boundary_curve({RegionFamily::OPlus, 0}, p_star, Side::Top, 1), std::invalid_argument);
}

TEST_CASE("raster agrees with the classifier", "[regions]") {
    const std::vector<RegionSpec> fams{{RegionFamily::OPlus, 0}, {RegionFamily::OMinus, 0}, {RegionFamily::EPlus, 0},
                                       {RegionFamily::EMinus, 0}, {RegionFamily::OPlus, 1}, {RegionFamily::OMinus, 1}};
    const auto g = rasterize(p_star, {0.0, 25.0, 20}, {-2.0, 2.0, 16}, fams);
    CHECK(g.disagreements == 0);
    int gap = 0;
    for (int j = 0; j < g.tau.n; ++j)
        for (int i = 0; i < g.R.n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * g.R.n + i;
            if (g.tau.center(j) < 0.0 && g.cells[c] == 0 && g.negative_mode[c]) ++gap;
        }
    CHECK(gap > 0);
    const auto svg = render_svg(g, {boundary_curve(fams[0], p_star, Side::Top, 40)});
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("tilde regions stay in the lower half plane", "[regions]") {
    const std::vector<RegionSpec> fams{{RegionFamily::OTilde, 0}, {RegionFamily::ETilde, 0}, {RegionFamily::OTilde, 1}};
    const auto g = rasterize(p_tilde, {0.0, 25.0, 20}, {-2.0, 2.0, 16}, fams);
    int members = 0;
    for (int j = 0; j < g.tau.n; ++j)
        for (int i = 0; i < g.R.n; ++i)
            if (g.at(i, j)) {
                ++members;
                CHECK(g.tau.center(j) < 0.0);
            }
    CHECK(members > 0);
}

TEST_CASE("nesting of successive regions", "[regions][property]") {
    const std::vector<double> radii{0.3, 1.0, 3.0, 10.0, 24.0};
    for (auto f : {RegionFamily::EMinus, RegionFamily::OMinus, RegionFamily::EPlus, RegionFamily::OPlus}) {
        const auto rep = check_nesting(p_star, f, 2, radii);
        INFO(to_string(f) << " worst margin " << rep.worst_margin << " at R=" << rep.worst_R);
        CHECK(rep.nested);
        CHECK(rep.worst_margin > 0.0);
    }
}

TEST_CASE("region union equals the classifier", "[regions][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> R(0.05, 25.0), tau(-2.0, 2.0);
    std::vector<CurvePoint> pts;
    for (int i = 0; i < 120; ++i) pts.push_back({R(rng), tau(rng)});
    const auto rep = ts_equivalence(p_star, pts);
    CHECK(rep.samples == pts.size());
    CHECK(rep.disagreements.empty());
}
