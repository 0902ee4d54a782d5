#pragma once

// Upper-half-plane free-rod branches on (-1, 1). With u = A sin(ax) + B sinh(bx)
// (odd) or u = A cos(ax) + B cosh(bx) (even), the free conditions reduce to
//
//   odd:   a^3 tan(a) =  b^3 tanh(b),   a in [l pi, (2l+1) pi/2)
//   even:  b^3 tan(a) = -a^3 tanh(b),   a in [(2l+1) pi/2, (l+1) pi)
//
// and the point on the branch is tau = b^2 - a^2, mu = a^2 b^2.

#include <cmath>
#include <stdexcept>

#include "t4/roots.hpp"
#include "t4/spectrum/characteristic.hpp"
#include "t4/spectrum/types.hpp"

namespace t4 {

namespace detail {

// Pole-free forms of the two relations, as functions of alpha for fixed beta.
inline double odd_relation(double a, double b) {
    return a * a * a * std::sin(a) - b * b * b * std::tanh(b) * std::cos(a);
}

inline double even_relation(double a, double b) {
    return a * a * a * std::cos(a) * std::tanh(b) + b * b * b * std::sin(a);
}

inline roots::BracketTolerance tight() { return {4e-16, 1e-300}; }

}  // namespace detail

/// Alpha inside the branch window that pairs with the given beta >= 0.
inline double alpha_from_beta(Parity parity, int l, double beta) {
    const double lo = window_start(parity, l);
    const double hi = window_end(parity, l);
    auto rel = [&](double a) {
        return parity == Parity::Odd ? detail::odd_relation(a, beta) : detail::even_relation(a, beta);
    };
    if (beta == 0.0) return lo;
    return roots::solve_bracketed(rel, lo, hi, detail::tight());
}

/// Beta >= 0 paired with an alpha inside a window of the given parity.
inline double beta_from_alpha(Parity parity, double alpha) {
    // odd: b^3 tanh b = a^3 tan a;  even: b^3 / tanh b = -a^3 / tan a.
    // Both left sides increase from 0 to infinity on b > 0.
    const double t = std::tan(alpha);
    const double target = parity == Parity::Odd ? alpha * alpha * alpha * t : -alpha * alpha * alpha / t;
    if (!(target > 0.0)) return 0.0;
    auto lhs = [&](double b) {
        if (parity == Parity::Odd) return b * b * b * std::tanh(b);
        const double ratio = b < 1e-8 ? 1.0 : b / std::tanh(b);
        return b * b * ratio;
    };
    double hi = std::cbrt(target) + 1.0;
    while (lhs(hi) < target) hi *= 2.0;
    return roots::solve_bracketed([&](double b) { return lhs(b) - target; }, 0.0, hi,
                                  detail::tight());
}

/// The branch point at unit-interval tension tau_unit, which must satisfy
/// tau_unit >= -window_start^2 so that mu >= 0.
inline BranchParameterization branch_at_tension(Parity parity, int l, double tau_unit) {
    if (parity != Parity::Odd && parity != Parity::Even)
        throw std::invalid_argument("branch parameterization needs even or odd parity");
    const double a0 = window_start(parity, l);
    const double a1 = window_end(parity, l);
    if (tau_unit < -a0 * a0) throw std::domain_error("branch is below mu = 0 at this tension");

    // tau = beta^2 - alpha(beta)^2 increases along the branch, and alpha stays in
    // [a0, a1), which brackets beta.
    const double b_lo = std::sqrt(std::max(0.0, tau_unit + a0 * a0));
    const double b_hi = std::sqrt(tau_unit + a1 * a1);
    auto excess = [&](double b) {
        const double a = alpha_from_beta(parity, l, b);
        return (b - a) * (b + a) - tau_unit;
    };
    const double e_lo = excess(b_lo);
    const double e_hi = excess(b_hi);
    double beta = b_lo;
    if (e_lo >= 0.0) beta = b_lo;  // rounding at the window start
    else if (e_hi <= 0.0) beta = b_hi;
    else beta = roots::solve_bracketed(excess, b_lo, b_hi, e_lo, e_hi, detail::tight());
    return {alpha_from_beta(parity, l, beta), beta, parity};
}

}  // namespace t4
