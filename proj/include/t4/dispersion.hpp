#pragma once

// Linear stability of a two-species reaction-diffusion steady state.
//
// A spatial mode with diffusion eigenvalue mu grows like exp(lambda t), where
//   lambda^2 + F(mu) lambda + H(mu) = 0,
//   F(mu) = mu (1 + k) - (f_u + g_v),
//   H(mu) = k mu^2 - (k f_u + g_v) mu + (f_u g_v - f_v g_u).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace t4 {

/// Jacobian entries at the steady state and the diffusivity ratio k.
struct ReactionParams {
    double f_u = 0.0;
    double f_v = 0.0;
    double g_u = 0.0;
    double g_v = 0.0;
    double k = 1.0;

    double trace() const { return f_u + g_v; }
    double det() const { return f_u * g_v - f_v * g_u; }
};

inline void validate(const ReactionParams& p) {
    if (!(p.k > 0.0)) throw std::invalid_argument("diffusivity ratio k must be positive");
    for (double x : {p.f_u, p.f_v, p.g_u, p.g_v, p.k})
        if (!std::isfinite(x)) throw std::invalid_argument("reaction parameters must be finite");
}

struct DispersionQuantities {
    double A = 0.0;
    std::optional<double> a;
    std::optional<double> b;
    double discriminant = 0.0;
    bool cond13 = false;  // f_u + g_v < 0
    bool cond14 = false;  // f_u g_v - f_v g_u > 0
    bool cond15 = false;  // (k f_u + g_v)^2 - 4k (f_u g_v - f_v g_u) > 0
    bool cond16 = false;  // k f_u + g_v > 0

    std::array<bool, 4> conditions() const { return {cond13, cond14, cond15, cond16}; }
};

inline DispersionQuantities quantities(const ReactionParams& p) {
    validate(p);
    DispersionQuantities q;
    const double s = p.k * p.f_u + p.g_v;
    const double d = p.det();
    q.A = p.trace() / (1.0 + p.k);
    q.discriminant = s * s - 4.0 * p.k * d;
    q.cond13 = p.trace() < 0.0;
    q.cond14 = d > 0.0;
    q.cond15 = q.discriminant > 0.0;
    q.cond16 = s > 0.0;
    if (q.discriminant > 0.0) {
        // Roots of k mu^2 - s mu + d; the larger-magnitude one first, then the
        // other from the product d / k.
        const double sq = std::sqrt(q.discriminant);
        const double big = (s >= 0.0 ? s + sq : s - sq) / (2.0 * p.k);
        const double small = big != 0.0 ? d / (p.k * big) : 0.0;
        q.a = std::min(big, small);
        q.b = std::max(big, small);
    }
    return q;
}

struct GrowthRate {
    double mu = 0.0;
    double lambda_max_real = 0.0;
    double F = 0.0;
    double H = 0.0;
};

inline double F_of(const ReactionParams& p, double mu) { return mu * (1.0 + p.k) - p.trace(); }

inline double H_of(const ReactionParams& p, double mu) {
    return p.k * mu * mu - (p.k * p.f_u + p.g_v) * mu + p.det();
}

/// Largest real part among the roots of lambda^2 + F lambda + H = 0.
inline double max_real_root(double F, double H) {
    const double disc = F * F - 4.0 * H;
    if (disc < 0.0) return -0.5 * F;
    const double sq = std::sqrt(disc);
    // Stable pair: the larger-magnitude root, then H divided by it.
    const double big = F >= 0.0 ? -0.5 * (F + sq) : -0.5 * (F - sq);
    if (big == 0.0) return 0.0;
    return std::max(big, H / big);
}

inline GrowthRate growth_rate(const ReactionParams& p, double mu) {
    GrowthRate g;
    g.mu = mu;
    g.F = F_of(p, mu);
    g.H = H_of(p, mu);
    g.lambda_max_real = max_real_root(g.F, g.H);
    return g;
}

/// Membership decision for the Turing space at a fixed domain and tension.
struct TuringDecision {
    bool member = false;
    std::optional<char> case_tag;   // 'H' (mu in (a, b)) or 'F' (mu < A)
    std::optional<double> witness_mu;
    std::array<bool, 4> conditions{};
    double A = 0.0;
    std::optional<double> a;
    std::optional<double> b;
};

/// True for the zero eigenvalue, which never witnesses instability.
inline bool is_zero_mode(double mu) { return mu == 0.0; }

/// Membership test. `spectrum` is the (truncated) diffusion spectrum of the
/// domain. Inequalities are strict and the zero mode is excluded. When both
/// cases hold at tau < 0 the F case is reported, with the lowest eigenvalue as
/// witness.
inline TuringDecision in_turing_space(const ReactionParams& p, double tau, std::span<const double> spectrum) {
    const auto q = quantities(p);
    TuringDecision d;
    d.conditions = q.conditions();
    d.A = q.A;
    d.a = q.a;
    d.b = q.b;
    if (!q.cond13 || !q.cond14) return d;

    if (tau < 0.0) {
        std::optional<double> lowest;
        for (double mu : spectrum)
            if (!is_zero_mode(mu) && (!lowest || mu < *lowest)) lowest = mu;
        if (lowest && *lowest < q.A) {
            d.member = true;
            d.case_tag = 'F';
            d.witness_mu = *lowest;
            return d;
        }
    }
    const bool h_leg = tau >= 0.0 ? (q.cond15 && q.cond16) : q.cond15;
    if (h_leg) {
        for (double mu : spectrum) {
            if (is_zero_mode(mu)) continue;
            if (mu > *q.a && mu < *q.b) {
                d.member = true;
                d.case_tag = 'H';
                d.witness_mu = mu;
                return d;
            }
        }
    }
    return d;
}

/// Largest growth rate over the nonzero listed eigenvalues; -inf when none.
inline double max_growth(const ReactionParams& p, std::span<const double> spectrum) {
    double best = -std::numeric_limits<double>::infinity();
    for (double mu : spectrum)
        if (!is_zero_mode(mu)) best = std::max(best, growth_rate(p, mu).lambda_max_real);
    return best;
}

/// Upper end of the eigenvalue range that can decide membership, with margin.
inline double deciding_mu_ceiling(const ReactionParams& p) {
    const auto q = quantities(p);
    double top = std::max(q.A, 0.0);
    if (q.b) top = std::max(top, *q.b);
    return top + 1.0 + 0.1 * std::abs(top);
}

}  // namespace t4
