#pragma once

// Instability regions in the (R, tau)-plane for fixed reaction parameters.
//
//   E+(l), O+(l):   R^-4 mu_l(tau R^2) in (a, b)
//   E-(l), O-(l):   R^-4 mu_l(tau R^2) < A and tau < 0
//   E~(l), O~(l):   R^-4 mu_l(tau R^2) in (a, b) and tau < 0, when k f_u + g_v < 0
//   I+per(l):       a R^4 < (l pi)^4 + tau R^2 (l pi)^2 < b R^4
//   I-per(l):       (l pi)^4 + tau R^2 (l pi)^2 < A R^4 and tau < 0
//
// Every branch is increasing in tau, so for fixed R each defining equation
// R^-4 mu_l(tau R^2) = c has exactly one root in tau.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "t4/dispersion.hpp"
#include "t4/error.hpp"
#include "t4/parallel.hpp"
#include "t4/roots.hpp"
#include "t4/spectrum.hpp"

namespace t4 {

enum class RegionFamily { EPlus, EMinus, OPlus, OMinus, ETilde, OTilde, IPerPlus, IPerMinus };

struct RegionSpec {
    RegionFamily family = RegionFamily::EPlus;
    int l = 0;

    friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

enum class Side { Top, Bottom };

inline std::string_view to_string(RegionFamily f) {
    switch (f) {
        case RegionFamily::EPlus: return "EPlus";
        case RegionFamily::EMinus: return "EMinus";
        case RegionFamily::OPlus: return "OPlus";
        case RegionFamily::OMinus: return "OMinus";
        case RegionFamily::ETilde: return "ETilde";
        case RegionFamily::OTilde: return "OTilde";
        case RegionFamily::IPerPlus: return "IPerPlus";
        case RegionFamily::IPerMinus: return "IPerMinus";
    }
    return "?";
}

inline std::string_view to_string(Side s) { return s == Side::Top ? "top" : "bottom"; }

inline std::optional<RegionFamily> parse_family(std::string_view name) {
    for (auto f : {RegionFamily::EPlus, RegionFamily::EMinus, RegionFamily::OPlus, RegionFamily::OMinus,
                   RegionFamily::ETilde, RegionFamily::OTilde, RegionFamily::IPerPlus,
                   RegionFamily::IPerMinus})
        if (name == to_string(f)) return f;
    return std::nullopt;
}

inline std::string label(const RegionSpec& s) { return std::string(to_string(s.family)) + "(" + std::to_string(s.l) + ")"; }

enum class RegionKind { Plus, Minus, Tilde };

inline RegionKind kind_of(RegionFamily f) {
    switch (f) {
        case RegionFamily::EMinus:
        case RegionFamily::OMinus:
        case RegionFamily::IPerMinus: return RegionKind::Minus;
        case RegionFamily::ETilde:
        case RegionFamily::OTilde: return RegionKind::Tilde;
        default: return RegionKind::Plus;
    }
}

inline Parity parity_of(RegionFamily f) {
    switch (f) {
        case RegionFamily::EPlus:
        case RegionFamily::EMinus:
        case RegionFamily::ETilde: return Parity::Even;
        case RegionFamily::OPlus:
        case RegionFamily::OMinus:
        case RegionFamily::OTilde: return Parity::Odd;
        default: return Parity::Periodic;
    }
}

/// Throws PreconditionError naming the first condition the family needs and
/// p lacks.
inline void require_family_conditions(RegionFamily f, const DispersionQuantities& q) {
    auto need = [&](bool ok, const char* what) {
        if (!ok)
            throw PreconditionError(std::string(to_string(f)) + " requires condition " + what);
    };
    need(q.cond13, "(13) f_u + g_v < 0");
    const RegionKind k = kind_of(f);
    if (k == RegionKind::Minus) return;
    need(q.cond15, "(15) (k f_u + g_v)^2 - 4k(f_u g_v - f_v g_u) > 0");
    if (k == RegionKind::Tilde) {
        need(q.cond14, "(14) f_u g_v - f_v g_u > 0");
        need(!q.cond16, "not (16): k f_u + g_v <= 0");
    }
}

/// Branch value R^-4 mu_l(tau R^2) for the family's parity.
inline double family_branch_mu(RegionFamily f, int l, double R, double tau) {
    const Parity par = parity_of(f);
    if (par == Parity::Periodic) return periodic_mu(l, tau, R);
    return free_branch_mu({par, l}, tau, R);
}

/// Defining inequality of a family, given the branch value at (R, tau).
inline bool region_predicate(RegionFamily f, const DispersionQuantities& q, double mu, double tau) {
    switch (kind_of(f)) {
        case RegionKind::Minus: return tau < 0.0 && mu < q.A;
        case RegionKind::Tilde: return tau < 0.0 && mu > *q.a && mu < *q.b;
        case RegionKind::Plus: return mu > *q.a && mu < *q.b;
    }
    return false;
}

inline bool region_contains(const RegionSpec& spec, const ReactionParams& p, double R, double tau) {
    const auto q = quantities(p);
    require_family_conditions(spec.family, q);
    if (spec.l < 0) throw std::invalid_argument("region index must be nonnegative");
    return region_predicate(spec.family, q, family_branch_mu(spec.family, spec.l, R, tau), tau);
}

/// Value c in the defining equation R^-4 mu_l = c for a boundary side.
inline double side_target(RegionFamily f, const DispersionQuantities& q, Side side) {
    if (kind_of(f) == RegionKind::Minus) {
        if (side == Side::Bottom) throw NoSolution(std::string(to_string(f)) + " has no bottom boundary");
        return q.A;
    }
    return side == Side::Top ? *q.b : *q.a;
}

/// tau solving R^-4 mu_l(tau R^2) = target.
inline double boundary_tau(RegionFamily f, int l, double R, double target) {
    const double R2 = R * R;
    const double m = target * R2 * R2;  // unit-interval eigenvalue
    const Parity par = parity_of(f);
    if (par == Parity::Periodic) {
        if (l == 0) throw NoSolution("periodic branch 0 is identically zero");
        const double q2 = (l * pi) * (l * pi);
        return (m - q2 * q2) / q2 / R2;
    }
    if (m >= 0.0) {
        // Upper half-plane: solve alpha(beta)^2 beta^2 = m along the branch.
        if (m == 0.0) return -window_start(par, l) * window_start(par, l) / R2;
        auto g = [&](double b) {
            const double a = alpha_from_beta(par, l, b);
            return a * a * b * b - m;
        };
        double hi = std::sqrt(std::sqrt(m)) + 1.0;
        hi = std::max(hi, std::sqrt(m) / window_start(par, l + 1));
        while (g(hi) < 0.0) hi *= 2.0;
        const double beta = roots::solve_bracketed(g, 0.0, hi, detail::tight());
        const double alpha = alpha_from_beta(par, l, beta);
        return (beta - alpha) * (beta + alpha) / R2;
    }
    // Lower half-plane: bracket in tau over [-C, 0), widening C geometrically.
    auto f_tau = [&](double tau) { return unit_branch_mu(par, l, tau * R2) - m; };
    double C = std::max(100.0, 50.0 / R2);
    double f_lo = f_tau(-C);
    for (int k = 0; f_lo > 0.0; ++k) {
        if (k == 24) throw NoSolution("no boundary root in the tau search window");
        C *= 4.0;
        f_lo = f_tau(-C);
    }
    return roots::solve_bracketed(f_tau, -C, 0.0, f_lo, f_tau(0.0), roots::BracketTolerance{1e-14, 1e-300});
}

struct CurvePoint {
    double R;
    double tau;
};

struct RegionBoundary {
    RegionSpec spec;
    Side side = Side::Top;
    std::vector<CurvePoint> curve;
};

struct Range {
    double lo;
    double hi;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

/// Plus-family curve from the (alpha, beta) parameterization with target > 0.
inline std::vector<CurvePoint> parametric_curve(Parity par, int l, double target, int samples, Range r_range) {
    const double eps = 1e-6;
    const double a0 = window_start(par, l) + eps;
    const double a1 = window_end(par, l) - eps;
    auto point = [&](double alpha) {
        const double beta = beta_from_alpha(par, alpha);
        const double R = std::sqrt(std::sqrt(alpha * alpha * beta * beta / target));
        return CurvePoint{R, (beta - alpha) * (beta + alpha) / (R * R)};
    };
    std::vector<double> alphas = linspace(a0, a1, std::max(samples, 2));
    std::vector<CurvePoint> pts(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) pts[i] = point(alphas[i]);

    // Densify where consecutive in-range points are far apart.
    auto in_range = [&](const CurvePoint& c) { return c.R >= r_range.lo && c.R <= r_range.hi; };
    for (int pass = 0; pass < 8; ++pass) {
        double tmin = 1e300, tmax = -1e300;
        for (const auto& c : pts)
            if (in_range(c)) {
                tmin = std::min(tmin, c.tau);
                tmax = std::max(tmax, c.tau);
            }
        if (tmin > tmax) break;
        const double sR = r_range.hi - r_range.lo;
        const double sT = std::max(tmax - tmin, 1e-12);
        const double limit = 4.0 / samples;
        std::vector<double> na;
        std::vector<CurvePoint> np;
        bool grew = false;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            na.push_back(alphas[i]);
            np.push_back(pts[i]);
            const auto& p0 = pts[i];
            const auto& p1 = pts[i + 1];
            const double d = std::hypot((p1.R - p0.R) / sR, (p1.tau - p0.tau) / sT);
            if ((in_range(p0) || in_range(p1)) && d > limit && np.size() < static_cast<std::size_t>(16 * samples)) {
                const double am = 0.5 * (alphas[i] + alphas[i + 1]);
                na.push_back(am);
                np.push_back(point(am));
                grew = true;
            }
        }
        na.push_back(alphas.back());
        np.push_back(pts.back());
        alphas.swap(na);
        pts.swap(np);
        if (!grew) break;
    }
    std::vector<CurvePoint> out;
    for (const auto& c : pts)
        if (in_range(c)) out.push_back(c);
    return out;
}

}  // namespace detail

/// Boundary curve of a region over R in `r_range`. Plus families with a
/// positive target use the (alpha, beta) parameterization; all others solve
/// the defining equation for tau at `samples` values of R.
inline RegionBoundary boundary_curve(const RegionSpec& spec, const ReactionParams& p, Side side, int samples,
                                     Range r_range = {0.05, 25.0}) {
    if (samples < 2) throw std::invalid_argument("need at least 2 samples");
    if (!(r_range.lo > 0.0 && r_range.hi > r_range.lo)) throw std::invalid_argument("bad R range");
    const auto q = quantities(p);
    require_family_conditions(spec.family, q);
    const double target = side_target(spec.family, q, side);
    RegionBoundary out{spec, side, {}};
    const Parity par = parity_of(spec.family);

    if (kind_of(spec.family) == RegionKind::Plus && par != Parity::Periodic && target > 0.0) {
        out.curve = detail::parametric_curve(par, spec.l, target, samples, r_range);
    } else {
        const auto Rs = detail::linspace(r_range.lo, r_range.hi, samples);
        std::vector<std::optional<double>> taus(Rs.size());
        parallel_for(Rs.size(), [&](std::size_t i) {
            try {
                taus[i] = boundary_tau(spec.family, spec.l, Rs[i], target);
            } catch (const NoSolution&) {
            }
        });
        for (std::size_t i = 0; i < Rs.size(); ++i) {
            if (!taus[i]) continue;
            // Tilde and minus regions live in tau < 0 only.
            if (kind_of(spec.family) != RegionKind::Plus && !(*taus[i] < 0.0)) continue;
            out.curve.push_back({Rs[i], *taus[i]});
        }
    }
    if (out.curve.empty()) throw NoSolution("boundary " + label(spec) + " has no points in the R range");
    return out;
}

// ---------------------------------------------------------------------------
// Rasters

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    double center(int i) const { return lo + (i + 0.5) * (hi - lo) / n; }
};

struct GridRaster {
    Axis R;
    Axis tau;
    std::vector<RegionSpec> families;
    std::vector<std::uint32_t> cells;  // bit f set when the cell center is in families[f]; row j = tau index
    std::vector<std::uint8_t> turing;  // free-boundary classifier at the cell center
    std::vector<std::uint8_t> negative_mode;  // the free spectrum has a negative eigenvalue
    int disagreements = 0;              // member of some family but not of the Turing space

    std::uint32_t at(int i, int j) const { return cells[static_cast<std::size_t>(j) * R.n + i]; }
};

/// Eigenvalues of the free or periodic operator up to the ceiling that can
/// decide membership.
inline std::vector<double> deciding_spectrum(const ReactionParams& p, Boundary bc, double R, double tau) {
    const auto pts = spectrum_up_to({tau, bc}, R, deciding_mu_ceiling(p));
    std::vector<double> mus;
    mus.reserve(pts.size());
    for (const auto& s : pts) mus.push_back(s.mu);
    return mus;
}

inline GridRaster rasterize(const ReactionParams& p, Axis r_axis, Axis tau_axis, const std::vector<RegionSpec>& families) {
    if (r_axis.n < 2 || tau_axis.n < 2) throw std::invalid_argument("raster resolution must be at least 2");
    if (!(r_axis.hi > r_axis.lo) || !(tau_axis.hi > tau_axis.lo)) throw std::invalid_argument("empty raster range");
    if (!(r_axis.lo >= 0.0)) throw std::invalid_argument("R range must be nonnegative");
    if (families.size() > 32) throw std::invalid_argument("at most 32 families per raster");
    const auto q = quantities(p);
    for (const auto& f : families) require_family_conditions(f.family, q);

    GridRaster g;
    g.R = r_axis;
    g.tau = tau_axis;
    g.families = families;
    const std::size_t total = static_cast<std::size_t>(r_axis.n) * tau_axis.n;
    g.cells.assign(total, 0);
    g.turing.assign(total, 0);
    g.negative_mode.assign(total, 0);
    std::vector<std::uint8_t> bad(total, 0);

    parallel_for(total, [&](std::size_t c) {
        const int i = static_cast<int>(c % r_axis.n);
        const int j = static_cast<int>(c / r_axis.n);
        const double R = r_axis.center(i);
        const double tau = tau_axis.center(j);
        std::uint32_t bits = 0;
        bool free_hit = false, per_hit = false;
        for (std::size_t f = 0; f < families.size(); ++f) {
            const auto& s = families[f];
            if (region_predicate(s.family, q, family_branch_mu(s.family, s.l, R, tau), tau)) {
                bits |= 1u << f;
                (parity_of(s.family) == Parity::Periodic ? per_hit : free_hit) = true;
            }
        }
        g.cells[c] = bits;
        const auto free_mus = deciding_spectrum(p, Boundary::Free, R, tau);
        g.turing[c] = in_turing_space(p, tau, free_mus).member;
        g.negative_mode[c] = !free_mus.empty() && free_mus.front() < 0.0;
        bool ok = !free_hit || g.turing[c];
        if (per_hit) ok = ok && in_turing_space(p, tau, deciding_spectrum(p, Boundary::Periodic, R, tau)).member;
        bad[c] = !ok;
    });
    for (auto b : bad) g.disagreements += b;
    return g;
}

// ---------------------------------------------------------------------------
// Structural checks

struct NestingReport {
    bool nested = true;
    double worst_margin = 1e300;
    double worst_R = 0.0;
    int worst_l = 0;
    Side worst_side = Side::Top;
    std::size_t checks = 0;
};

inline std::vector<double> default_nesting_radii() {
    std::vector<double> r;
    for (int i = 0; i < 24; ++i) r.push_back(0.25 * std::pow(100.0, i / 23.0));
    return r;
}

/// Checks tau_side(R; l) > tau_side(R; l+1) for l < l_max on every sampled R,
/// both sides for plus families and the top side for minus families.
inline NestingReport check_nesting(const ReactionParams& p, RegionFamily family, int l_max,
                                   std::vector<double> radii = default_nesting_radii()) {
    const auto q = quantities(p);
    require_family_conditions(family, q);
    std::vector<Side> sides{Side::Top};
    if (kind_of(family) != RegionKind::Minus) sides.push_back(Side::Bottom);

    struct Job {
        double R;
        Side side;
        int l;
        double margin = 0.0;
    };
    std::vector<Job> jobs;
    for (double R : radii)
        for (Side s : sides)
            for (int l = 0; l < l_max; ++l) jobs.push_back({R, s, l});
    parallel_for(jobs.size(), [&](std::size_t k) {
        auto& j = jobs[k];
        const double t = side_target(family, q, j.side);
        j.margin = boundary_tau(family, j.l, j.R, t) - boundary_tau(family, j.l + 1, j.R, t);
    });
    NestingReport rep;
    for (const auto& j : jobs) {
        ++rep.checks;
        if (!(j.margin > 0.0)) rep.nested = false;
        if (j.margin < rep.worst_margin) {
            rep.worst_margin = j.margin;
            rep.worst_R = j.R;
            rep.worst_l = j.l;
            rep.worst_side = j.side;
        }
    }
    return rep;
}

/// Union of E(l) and O(l) over all l at one point, evaluated through the
/// region predicates on each branch until the branch passes every threshold.
inline bool in_free_region_union(const ReactionParams& p, double R, double tau) {
    const auto q = quantities(p);
    const double stop = std::max(q.A, q.b ? *q.b : q.A);
    const double T = tau * R * R;
    for (Parity par : {Parity::Even, Parity::Odd}) {
        const RegionFamily plus = par == Parity::Even ? RegionFamily::EPlus : RegionFamily::OPlus;
        const RegionFamily minus = par == Parity::Even ? RegionFamily::EMinus : RegionFamily::OMinus;
        const auto neg = negative_branch_count(par, T) > 0 ? negative_roots(par, T) : std::vector<double>{};
        for (int l = 0;; ++l) {
            const double mu = rescale_mu(detail::branch_value(par, l, T, neg), T, R).mu;
            if (q.cond15 && region_predicate(plus, q, mu, tau)) return true;
            if (region_predicate(minus, q, mu, tau)) return true;
            if (mu >= stop) break;
        }
    }
    return false;
}

struct EquivalenceSample {
    double R;
    double tau;
    bool regions;
    bool classifier;
};

struct EquivalenceReport {
    std::size_t samples = 0;
    std::vector<EquivalenceSample> disagreements;
};

inline EquivalenceReport ts_equivalence(const ReactionParams& p, const std::vector<CurvePoint>& samples) {
    const auto q = quantities(p);
    if (!(q.cond13 && q.cond14 && q.cond15 && q.cond16))
        throw PreconditionError("equivalence check requires conditions (13)-(16)");
    std::vector<EquivalenceSample> res(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        const auto [R, tau] = samples[i];
        const bool reg = in_free_region_union(p, R, tau);
        const bool cls = in_turing_space(p, tau, deciding_spectrum(p, Boundary::Free, R, tau)).member;
        res[i] = {R, tau, reg, cls};
    });
    EquivalenceReport rep;
    rep.samples = samples.size();
    for (const auto& s : res)
        if (s.regions != s.classifier) rep.disagreements.push_back(s);
    return rep;
}

// ---------------------------------------------------------------------------
// SVG

/// Minimal SVG: axis box, member cells shaded per family, boundary polylines.
inline std::string render_svg(const GridRaster& g, const std::vector<RegionBoundary>& curves) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    const double W = 640, H = 480, m = 50;
    auto sx = [&](double R) { return m + (R - g.R.lo) / (g.R.hi - g.R.lo) * (W - 2 * m); };
    auto sy = [&](double t) { return H - m - (t - g.tau.lo) / (g.tau.hi - g.tau.lo) * (H - 2 * m); };
    const double cw = (W - 2 * m) / g.R.n, ch = (H - 2 * m) / g.tau.n;
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    for (std::size_t f = 0; f < g.families.size(); ++f) {
        os << "<g fill=\"" << palette[f % 8] << "\" fill-opacity=\"0.35\">\n";
        for (int j = 0; j < g.tau.n; ++j)
            for (int i = 0; i < g.R.n; ++i)
                if (g.at(i, j) >> f & 1u)
                    os << "<rect x=\"" << m + i * cw << "\" y=\"" << H - m - (j + 1) * ch << "\" width=\"" << cw
                       << "\" height=\"" << ch << "\"/>\n";
        os << "</g>\n";
    }
    for (const auto& c : curves) {
        std::size_t f = 0;
        while (f < g.families.size() && !(g.families[f] == c.spec)) ++f;
        os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << palette[f % 8] << "\" points=\"";
        for (const auto& pt : c.curve) {
            if (pt.R < g.R.lo || pt.R > g.R.hi || pt.tau < g.tau.lo || pt.tau > g.tau.hi) continue;
            os << sx(pt.R) << ',' << sy(pt.tau) << ' ';
        }
        os << "\"/>\n";
    }
    os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (g.tau.lo < 0.0 && g.tau.hi > 0.0)
        os << "<line x1=\"" << m << "\" y1=\"" << sy(0.0) << "\" x2=\"" << W - m << "\" y2=\"" << sy(0.0)
           << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">R</text>\n";
    os << "<text x=\"15\" y=\"" << H / 2 << "\" text-anchor=\"middle\">tau</text>\n";
    os << "<text x=\"" << m << "\" y=\"" << H - m + 15 << "\" font-size=\"10\">" << g.R.lo << "</text>\n";
    os << "<text x=\"" << W - m << "\" y=\"" << H - m + 15 << "\" font-size=\"10\" text-anchor=\"end\">" << g.R.hi
       << "</text>\n";
    os << "<text x=\"" << m - 5 << "\" y=\"" << H - m << "\" font-size=\"10\" text-anchor=\"end\">" << g.tau.lo
       << "</text>\n";
    os << "<text x=\"" << m - 5 << "\" y=\"" << m + 10 << "\" font-size=\"10\" text-anchor=\"end\">" << g.tau.hi
       << "</text>\n";
    for (std::size_t f = 0; f < g.families.size(); ++f)
        os << "<text x=\"" << W - m + 5 << "\" y=\"" << m + 14 * (f + 1) << "\" font-size=\"10\" fill=\""
           << palette[f % 8] << "\">" << label(g.families[f]) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace t4
