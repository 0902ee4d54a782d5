#pragma once

// Characteristic determinant of u'''' - tau u'' = mu u on (-1, 1) with the
// free conditions u'' = 0 and u''' - tau u' = 0 at x = +-1.
//
// With s1, s2 the roots of s^2 - tau s - mu = 0 (s = r^2), the functions
// C(s, x) = cosh(sqrt(s) x) and S(s, x) = sinh(sqrt(s) x) / sqrt(s) are entire
// in s, real for real s, and cover all three root regimes (trig/hyperbolic,
// trig/trig, complex) with one formula. Using C'' = sC, S'' = sS:
//
//   even basis {C(s1), C(s2)}:  det = mu * (s1 C1 S2 - s2 C2 S1)
//   odd basis  {S(s1), S(s2)}:  det = s2^2 S2 C1 - s1^2 S1 C2
//
// Both brackets vanish identically when s1 = s2; dividing by (s1 - s2) gives
// symmetric, hence real and entire, functions of (tau, mu). The factor mu in
// the even determinant is the rigid (constant) mode and is split off.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "t4/error.hpp"
#include "t4/roots.hpp"
#include "t4/spectrum/types.hpp"

namespace t4 {

namespace detail {

using cplx = std::complex<double>;

/// cosh(z) and sinh(z)/z for z = sqrt(s), both multiplied by exp(-Re z).
struct ScaledFundamental {
    cplx c;
    cplx s;
};

inline ScaledFundamental scaled_fundamental(cplx s) {
    const cplx z = std::sqrt(s);
    const double x = z.real();
    cplx ch, sh;
    if (x < 20.0) {
        const double damp = std::exp(-x);
        ch = std::cosh(z) * damp;
        sh = std::sinh(z) * damp;
    } else {
        const cplx rot = std::polar(1.0, z.imag());
        const cplx tail = std::exp(cplx(-2.0 * x, -z.imag()));
        ch = 0.5 * (rot + tail);
        sh = 0.5 * (rot - tail);
    }
    const cplx sz = std::abs(z) < 1e-6 ? (1.0 + s / 6.0) * std::exp(-x) : sh / z;
    return {ch, sz};
}

struct TensionRoots {
    cplx s1;
    cplx s2;
};

inline TensionRoots tension_roots(double tau, double mu) {
    const double disc = tau * tau + 4.0 * mu;
    if (disc < 0.0) {
        const double w = 0.5 * std::sqrt(-disc);
        return {cplx(0.5 * tau, w), cplx(0.5 * tau, -w)};
    }
    const double sq = std::sqrt(disc);
    // Avoid cancellation in the smaller root; s1 * s2 = -mu.
    if (tau >= 0.0) {
        const double s1 = 0.5 * (tau + sq);
        const double s2 = s1 != 0.0 ? -mu / s1 : 0.0;
        return {s1, s2};
    }
    const double s2 = 0.5 * (tau - sq);
    return {-mu / s2, s2};
}

struct ParityFactors {
    double even;
    double odd;
};

inline ParityFactors distinct_root_factors(double tau, double mu) {
    const auto [s1, s2] = tension_roots(tau, mu);
    const auto f1 = scaled_fundamental(s1);
    const auto f2 = scaled_fundamental(s2);
    const cplx gap = s1 - s2;
    const cplx even = (s1 * f1.c * f2.s - s2 * f2.c * f1.s) / gap;
    const cplx odd = (s2 * s2 * f2.s * f1.c - s1 * s1 * f1.s * f2.c) / gap;
    return {even.real(), odd.real()};
}

}  // namespace detail

using detail::ParityFactors;

/// Even (rigid mode removed) and odd factors of the free-rod determinant on
/// (-1, 1), each scaled by a positive factor so that it stays finite. Their
/// zeros in mu are exactly the non-constant even and the odd eigenvalues.
inline ParityFactors free_parity_factors(double tau, double mu) {
    const double disc = tau * tau + 4.0 * mu;
    const double sigma = std::max({std::abs(tau), std::sqrt(std::abs(mu)), 1.0});
    const double theta = 1e-5 * sigma;
    if (std::abs(disc) >= theta * theta) return detail::distinct_root_factors(tau, mu);

    // Near the double-root parabola the divided difference cancels; the
    // factors are smooth there, so interpolate across the gap.
    const double mu_lo = 0.25 * (-tau * tau - theta * theta);
    const double mu_hi = 0.25 * (-tau * tau + theta * theta);
    const auto lo = detail::distinct_root_factors(tau, mu_lo);
    const auto hi = detail::distinct_root_factors(tau, mu_hi);
    const double w = (mu - mu_lo) / (mu_hi - mu_lo);
    return {lo.even + w * (hi.even - lo.even), lo.odd + w * (hi.odd - lo.odd)};
}

inline double parity_factor(Parity parity, double tau, double mu) {
    const auto f = free_parity_factors(tau, mu);
    return parity == Parity::Even ? f.even : f.odd;
}

/// Scaled characteristic determinant on (-1, 1); its zeros are exactly the
/// free eigenvalues at tension tau (mu = 0 is always one of them).
inline double characteristic_det(double tau, double mu) {
    const auto f = free_parity_factors(tau, mu);
    return mu * f.even * f.odd;
}

// ---------------------------------------------------------------------------
// Branch windows. An upper-half-plane branch is parameterized by alpha in
// [start, end): odd [l pi, (2l+1) pi/2), even [(2l+1) pi/2, (l+1) pi).
// At alpha = start the branch crosses mu = 0 at tau = -start^2.

inline double window_start(Parity parity, int l) {
    return parity == Parity::Odd ? l * pi : (2 * l + 1) * pi / 2;
}

inline double window_end(Parity parity, int l) {
    return parity == Parity::Odd ? (2 * l + 1) * pi / 2 : (l + 1) * pi;
}

/// Number of branches of the given parity lying strictly below mu = 0 at
/// unit-interval tension tau_unit.
inline int negative_branch_count(Parity parity, double tau_unit) {
    if (tau_unit >= 0.0) return 0;
    const double w = std::sqrt(-tau_unit);
    int n = 0;
    while (window_start(parity, n) < w) ++n;
    return n;
}

namespace detail {

inline double mu_of_t(double t) { return t < 0 ? -(t * t) * (t * t) : (t * t) * (t * t); }

/// Scans a parity factor along mu(t) = sign(t) t^4, t running from 0 in
/// direction `dir`, collecting up to `wanted` roots. Grid cells where |f| has a
/// same-sign local minimum are searched for a hidden close pair.
inline std::vector<double> scan_roots(Parity parity, double tau, int dir, std::size_t wanted,
                                      double step, double t_limit, bool include_origin) {
    auto f = [&](double t) { return parity_factor(parity, tau, mu_of_t(t)); };
    const double abs_floor = 1e-18 * std::max(1.0, tau * tau);
    roots::BracketTolerance tol{1e-13, abs_floor};
    auto solve_in_mu = [&](double ta, double tb, double fa, double fb) {
        double ma = mu_of_t(ta), mb = mu_of_t(tb);
        if (ma > mb) {
            std::swap(ma, mb);
            std::swap(fa, fb);
        }
        return roots::solve_bracketed([&](double m) { return parity_factor(parity, tau, m); },
                                      ma, mb, fa, fb, tol);
    };

    std::vector<double> found;
    double t0 = 0.0;
    double f0 = f(t0);
    if (f0 == 0.0) {
        if (include_origin) found.push_back(0.0);
        t0 = dir * step * 1e-3;
        f0 = f(t0);
    }
    double t_before = t0, f_before = f0;  // point before t0, for local minima
    bool have_before = false;

    for (double t1 = t0 + dir * step; std::abs(t1) <= t_limit && found.size() < wanted;
         t1 += dir * step) {
        const double f1 = f(t1);
        if (f1 == 0.0) {
            found.push_back(mu_of_t(t1));
            t0 = t1 + dir * step * 1e-3;
            f0 = f(t0);
            have_before = false;
            continue;
        }
        if ((f0 > 0) != (f1 > 0)) {
            found.push_back(solve_in_mu(t0, t1, f0, f1));
        } else if (have_before && (f_before > 0) == (f0 > 0) && std::abs(f0) <= std::abs(f_before) &&
                   std::abs(f0) <= std::abs(f1)) {
            const double sgn = f0 > 0 ? 1.0 : -1.0;
            const double a = std::min(t_before, t1), b = std::max(t_before, t1);
            auto [tm, gm] = roots::minimize([&](double t) { return sgn * f(t); }, a, b);
            if (gm <= 0.0) {
                const double fm = sgn * gm;
                std::vector<double> pair{solve_in_mu(a, tm, f(a), fm), solve_in_mu(tm, b, fm, f(b))};
                // The lower cell may already have produced one of these roots.
                for (double r : pair) {
                    const bool dup = std::any_of(found.begin(), found.end(), [&](double q) {
                        return std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(r));
                    });
                    if (!dup) found.push_back(r);
                }
            }
        }
        t_before = t0;
        f_before = f0;
        have_before = true;
        t0 = t1;
        f0 = f1;
    }
    std::sort(found.begin(), found.end());
    return found;
}

}  // namespace detail

namespace detail {

inline bool near_zero_root(double mu, double tau_unit) {
    return std::abs(mu) <= 1e-9 * std::max(1.0, tau_unit * tau_unit);
}

/// Raw downward scan over mu < 0. The result holds the negative branches and,
/// when a branch sits at mu = 0 up to rounding, possibly that root as well.
inline std::vector<double> negative_scan(Parity parity, double tau_unit) {
    const int expected = negative_branch_count(parity, tau_unit);
    if (expected == 0) return {};
    // The lowest free eigenvalue stays above about -tau^2 - 3|tau|; the wider
    // ceiling max(10, 10 tau^4) is the fallback.
    const double cap = std::max(10.0, 10.0 * std::pow(tau_unit, 4));
    const double usual = std::min(cap, 2.0 * tau_unit * tau_unit + 4.0 * std::abs(tau_unit) + 2.0);
    const struct {
        double limit;
        double step;
    } attempts[] = {{usual, 0.02}, {cap, 0.005}, {cap, 0.00125}};
    for (const auto& at : attempts) {
        auto r = scan_roots(parity, tau_unit, -1, static_cast<std::size_t>(-1), at.step,
                            std::pow(at.limit, 0.25), false);
        std::erase_if(r, [](double m) { return !(m < 0.0); });
        const auto n = static_cast<int>(r.size());
        if (n == expected) return r;
        if (n == expected + 1 && near_zero_root(r.back(), tau_unit)) return r;
    }
    throw BranchNotFound("could not isolate all negative eigenvalues at tau=" +
                         std::to_string(tau_unit));
}

}  // namespace detail

/// Roots of the parity factor on mu < 0, one per branch lying below zero,
/// ascending. The expected count comes from the branch windows.
inline std::vector<double> negative_roots(Parity parity, double tau_unit) {
    auto r = detail::negative_scan(parity, tau_unit);
    if (static_cast<int>(r.size()) > negative_branch_count(parity, tau_unit)) r.pop_back();
    return r;
}

/// The lowest `count` roots of the parity factor with mu >= 0, ascending.
inline std::vector<double> nonnegative_roots(Parity parity, double tau_unit, std::size_t count) {
    if (count == 0) return {};
    // Branch l has alpha < (l+1) pi and beta^2 = tau + alpha^2, which bounds mu.
    const int top = negative_branch_count(parity, tau_unit) + static_cast<int>(count);
    const double q = (top + 1.0) * pi;
    const double ceiling = q * q * (q * q + std::max(tau_unit, 0.0)) + 10.0;
    const double t_limit = std::pow(ceiling, 0.25);
    // A branch sitting exactly on mu = 0 may leave the factor a rounding
    // error away from zero there, so the scan would step over it.
    const double s = window_start(parity, negative_branch_count(parity, tau_unit));
    if (tau_unit <= 0.0 && std::abs(-tau_unit - s * s) <= 1e-12 * std::max(1.0, s * s)) {
        auto r = detail::scan_roots(parity, tau_unit, +1, count, 0.02, t_limit, true);
        if (r.empty() || !detail::near_zero_root(r.front(), tau_unit)) {
            r.insert(r.begin(), 0.0);
            r.resize(std::min(r.size(), count));
        }
        if (r.size() < count)
            throw BranchNotFound("branch not found below the search ceiling at tau=" + std::to_string(tau_unit));
        return r;
    }
    auto r = detail::scan_roots(parity, tau_unit, +1, count, 0.02, t_limit, true);
    if (r.size() < count)
        throw BranchNotFound("branch not found below the search ceiling at tau=" +
                             std::to_string(tau_unit));
    return r;
}

/// The (l+1)-th smallest root of the parity factor at tension tau_unit, found
/// by determinant root-finding alone.
inline double determinant_branch_root(Parity parity, int l, double tau_unit) {
    auto all = detail::negative_scan(parity, tau_unit);
    const auto idx = static_cast<std::size_t>(l);
    if (idx < all.size()) return all[idx];
    const auto up = nonnegative_roots(parity, tau_unit, idx - all.size() + 1);
    return up.back();
}

}  // namespace t4
