#pragma once

// Eigenvalues of u'''' - tau u'' = mu u on (-R, R).
//
// Everything is computed on (-1, 1) and mapped back with
//   mu(R, tau) = R^-4 mu_unit(tau R^2).
// Free branches at or above mu = 0 come from the (alpha, beta) relations,
// branches below zero from the parity factors of the determinant.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "t4/error.hpp"
#include "t4/spectrum/characteristic.hpp"
#include "t4/spectrum/parameterization.hpp"
#include "t4/spectrum/types.hpp"

namespace t4 {

/// Periodic eigenvalue of index l on (-R, R), multiplicity 2 for l >= 1.
inline double periodic_mu(int l, double tau, double R) {
    const double q = l * pi;
    const double T = tau * R * R;
    const double R2 = R * R;
    return (q * q * q * q + T * q * q) / (R2 * R2);
}

struct ScaledPair {
    double mu;
    double tau;
};

/// Unit-interval pair (mu_unit, tau_unit) to the pair on (-R, R).
inline ScaledPair rescale_mu(double mu_unit, double tau_unit, double R) {
    const double R2 = R * R;
    return {mu_unit / (R2 * R2), tau_unit / R2};
}

/// Inverse of rescale_mu.
inline ScaledPair unit_pair(double mu, double tau, double R) {
    const double R2 = R * R;
    return {mu * R2 * R2, tau * R2};
}

namespace detail {

inline void require_free_parity(Parity p) {
    if (p != Parity::Even && p != Parity::Odd)
        throw std::invalid_argument("free branches are even or odd");
}

inline void require_radius(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("R must be positive");
}

/// Branch value on the unit interval given the precomputed negative roots.
inline double branch_value(Parity parity, int l, double tau_unit, const std::vector<double>& neg) {
    const double a0 = window_start(parity, l);
    if (tau_unit >= -a0 * a0) return branch_at_tension(parity, l, tau_unit).mu();
    const auto idx = static_cast<std::size_t>(l);
    if (idx < neg.size()) return neg[idx];
    // Only reachable when the branch sits on mu = 0 to rounding.
    return 0.0;
}

}  // namespace detail

/// mu_l^parity(tau_unit) on (-1, 1).
inline double unit_branch_mu(Parity parity, int l, double tau_unit) {
    detail::require_free_parity(parity);
    if (l < 0) throw std::invalid_argument("branch index must be nonnegative");
    const double a0 = window_start(parity, l);
    if (tau_unit >= -a0 * a0) return branch_at_tension(parity, l, tau_unit).mu();
    return detail::branch_value(parity, l, tau_unit, negative_roots(parity, tau_unit));
}

/// The first `count` branches of one parity on (-1, 1), ascending.
inline std::vector<double> unit_branch_values(Parity parity, double tau_unit, int count) {
    detail::require_free_parity(parity);
    const auto neg = negative_branch_count(parity, tau_unit) > 0 ? negative_roots(parity, tau_unit)
                                                                  : std::vector<double>{};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int l = 0; l < count; ++l) out.push_back(detail::branch_value(parity, l, tau_unit, neg));
    return out;
}

/// mu_l^parity at tension tau on (-R, R).
inline double free_branch_mu(EigenBranchId branch, double tau, double R) {
    detail::require_radius(R);
    const double mu_unit = unit_branch_mu(branch.parity, branch.index, tau * R * R);
    return rescale_mu(mu_unit, tau * R * R, R).mu;
}

/// The same branch value from determinant root-finding alone.
inline double determinant_branch_mu(EigenBranchId branch, double tau, double R) {
    detail::require_radius(R);
    detail::require_free_parity(branch.parity);
    const double T = tau * R * R;
    return rescale_mu(determinant_branch_root(branch.parity, branch.index, T), T, R).mu;
}

/// Lowest free eigenvalue on (-R, R).
inline double lowest_free_mu(double tau, double R) {
    detail::require_radius(R);
    const double T = tau * R * R;
    if (T >= 0.0) return 0.0;
    double m = negative_roots(Parity::Odd, T).front();
    if (negative_branch_count(Parity::Even, T) > 0)
        m = std::min(m, negative_roots(Parity::Even, T).front());
    return std::min(m, 0.0) / (R * R * R * R);
}

namespace detail {

inline bool point_less(const SpectrumPoint& a, const SpectrumPoint& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.branch.parity != b.branch.parity) return a.branch.parity < b.branch.parity;
    return a.branch.index < b.branch.index;
}

inline std::vector<SpectrumPoint> periodic_points(double tau, double R, int max_index) {
    std::vector<SpectrumPoint> pts;
    for (int l = 0; l <= max_index; ++l) {
        const SpectrumPoint p{{Parity::Periodic, l}, tau, R, periodic_mu(l, tau, R), Method::Exact};
        pts.push_back(p);
        if (l > 0) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end(), point_less);
    return pts;
}

/// Unit-interval roots of one parity found by scanning the determinant.
inline std::vector<double> determinant_values(Parity parity, double tau_unit, int count) {
    auto r = negative_scan(parity, tau_unit);
    if (static_cast<int>(r.size()) < count) {
        auto up = nonnegative_roots(parity, tau_unit, static_cast<std::size_t>(count) - r.size());
        r.insert(r.end(), up.begin(), up.end());
    }
    r.resize(static_cast<std::size_t>(count));
    return r;
}

}  // namespace detail

/// The lowest `count` eigenvalues on (-R, R), nondecreasing, with branch
/// labels. `method` selects Parameterized (relations above mu = 0, determinant
/// below) or Determinant (determinant everywhere) for free conditions;
/// periodic values are always exact.
inline std::vector<SpectrumPoint> spectrum_list(const TensionedOperator& op, double R, int count,
                                                Method method = Method::Parameterized) {
    detail::require_radius(R);
    if (count < 1) throw std::invalid_argument("count must be at least 1");
    const double tau = op.tau;
    const double T = tau * R * R;
    std::vector<SpectrumPoint> pts;

    if (op.bc == Boundary::Periodic) {
        // q^2 (q^2 + T) with q = l pi increases once q^2 > -T / 2.
        const int lead = T < 0 ? static_cast<int>(std::ceil(std::sqrt(-T) / pi)) : 0;
        pts = detail::periodic_points(tau, R, lead + count);
    } else {
        if (method != Method::Parameterized && method != Method::Determinant)
            throw std::invalid_argument("free spectrum method must be param or det");
        pts.push_back({{Parity::Constant, 0}, tau, R, 0.0, Method::Exact});
        for (Parity parity : {Parity::Even, Parity::Odd}) {
            const int n_neg = negative_branch_count(parity, T);
            const auto vals = method == Method::Determinant
                                  ? detail::determinant_values(parity, T, count)
                                  : unit_branch_values(parity, T, count);
            for (int l = 0; l < count; ++l) {
                const Method m = method == Method::Determinant || l < n_neg ? Method::Determinant
                                                                           : Method::Parameterized;
                pts.push_back({{parity, l}, tau, R, rescale_mu(vals[l], T, R).mu, m});
            }
        }
        std::sort(pts.begin(), pts.end(), detail::point_less);
    }
    pts.resize(static_cast<std::size_t>(count));
    return pts;
}

/// Every eigenvalue on (-R, R) not exceeding mu_max, nondecreasing.
inline std::vector<SpectrumPoint> spectrum_up_to(const TensionedOperator& op, double R, double mu_max) {
    detail::require_radius(R);
    const double tau = op.tau;
    const double T = tau * R * R;
    std::vector<SpectrumPoint> pts;
    if (op.bc == Boundary::Periodic) {
        for (int l = 0;; ++l) {
            const double m = periodic_mu(l, tau, R);
            const double q2 = (l * pi) * (l * pi);
            if (m <= mu_max) {
                const SpectrumPoint p{{Parity::Periodic, l}, tau, R, m, Method::Exact};
                pts.push_back(p);
                if (l > 0) pts.push_back(p);
            } else if (2.0 * q2 + T > 0.0) {
                break;
            }
        }
    } else {
        if (mu_max >= 0.0) pts.push_back({{Parity::Constant, 0}, tau, R, 0.0, Method::Exact});
        for (Parity parity : {Parity::Even, Parity::Odd}) {
            const int n_neg = negative_branch_count(parity, T);
            const auto neg = n_neg > 0 ? negative_roots(parity, T) : std::vector<double>{};
            for (int l = 0;; ++l) {
                const double m = rescale_mu(detail::branch_value(parity, l, T, neg), T, R).mu;
                if (m > mu_max) break;
                pts.push_back({{parity, l}, tau, R, m,
                               l < n_neg ? Method::Determinant : Method::Parameterized});
            }
        }
    }
    std::sort(pts.begin(), pts.end(), detail::point_less);
    return pts;
}

/// Outcome of the search for a half-length with mu_1 <= -c tau^2.
struct MuastSearch {
    bool found = false;
    double R = 0.0;
    double mu1 = 0.0;
    double target = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<std::pair<double, double>> sweep;  // (R, mu_1)
};

/// Sweeps R geometrically outward from 1 (clamped into [r_min, r_max]) in both
/// directions, then narrows the first crossing by bisection in log R.
inline MuastSearch muast_search(double tau, double c, double r_min = 1.0 / 1024.0,
                                double r_max = 64.0) {
    if (!(tau < 0.0)) throw std::invalid_argument("tau must be negative");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (!(r_min > 0.0 && r_max >= r_min)) throw std::invalid_argument("need 0 < r_min <= r_max");
    MuastSearch out;
    out.target = -c * tau * tau;
    out.r_min = r_min;
    out.r_max = r_max;
    auto probe = [&](double R) {
        const double m = lowest_free_mu(tau, R);
        out.sweep.emplace_back(R, m);
        return m;
    };
    const double ratio = std::sqrt(2.0);
    const double start = std::clamp(1.0, r_min, r_max);
    double prev_down = start, prev_up = start;
    double hit = 0.0, miss = 0.0;
    if (probe(start) <= out.target) {
        out.found = true;
        out.R = start;
        out.mu1 = out.sweep.back().second;
        return out;
    }
    bool down_open = true, up_open = true;
    while (down_open || up_open) {
        if (down_open) {
            const double R = prev_down / ratio;
            if (R < r_min) {
                down_open = false;
            } else if (probe(R) <= out.target) {
                hit = R;
                miss = prev_down;
                break;
            } else {
                prev_down = R;
            }
        }
        if (up_open) {
            const double R = prev_up * ratio;
            if (R > r_max) {
                up_open = false;
            } else if (probe(R) <= out.target) {
                hit = R;
                miss = prev_up;
                break;
            } else {
                prev_up = R;
            }
        }
    }
    if (hit == 0.0) return out;
    for (int i = 0; i < 30 && std::abs(std::log(hit / miss)) > 1e-6; ++i) {
        const double mid = std::sqrt(hit * miss);
        if (probe(mid) <= out.target) hit = mid;
        else miss = mid;
    }
    out.found = true;
    out.R = hit;
    out.mu1 = lowest_free_mu(tau, hit);
    return out;
}

}  // namespace t4
