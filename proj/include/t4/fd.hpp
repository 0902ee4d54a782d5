#pragma once

// Finite-difference discretization of u'''' - tau u'' on (-R, R).
//
// Free conditions are natural: the stiffness matrix comes from the quadratic
// form
//   E(u) = sum_i (u[i-1] - 2u[i] + u[i+1])^2 / h^3 + tau sum_e (u[e+1] - u[e])^2 / h
// over interior nodes i and edges e, with the trapezoid mass matrix W. The
// generalized problem K v = mu W v is pentadiagonal.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "t4/error.hpp"
#include "t4/spectrum/types.hpp"

namespace t4 {

/// Symmetric pentadiagonal stiffness matrix with trapezoid weights.
struct DiffusionOperator {
    int n = 0;
    double R = 1.0;
    double tau = 0.0;
    double h = 0.0;
    std::vector<double> weights;  // lumped mass
    // Upper band, LAPACK column-major layout with ldab = 3: entry (i, j),
    // j - 2 <= i <= j, lives at band[2 + i - j + 3 j].
    std::vector<double> band;

    static constexpr int kd = 2;
    static constexpr int ldab = kd + 1;

    double entry(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (j - i > kd) return 0.0;
        return band[static_cast<std::size_t>(kd + i - j + ldab * j)];
    }

    /// out = K u, evaluated through the difference stencils so that a
    /// constant field maps to exactly zero.
    void apply(const double* u, double* out) const {
        const double c2 = 1.0 / (h * h * h);
        const double c1 = tau / h;
        std::fill(out, out + n, 0.0);
        for (int i = 1; i + 1 < n; ++i) {
            const double d = c2 * ((u[i - 1] - u[i]) + (u[i + 1] - u[i]));
            out[i - 1] += d;
            out[i] -= 2.0 * d;
            out[i + 1] += d;
        }
        for (int e = 0; e + 1 < n; ++e) {
            const double d = c1 * (u[e + 1] - u[e]);
            out[e] -= d;
            out[e + 1] += d;
        }
    }

    std::vector<double> apply(const std::vector<double>& u) const {
        std::vector<double> out(u.size());
        apply(u.data(), out.data());
        return out;
    }

    /// u^T K u as a sum of squares per term.
    double energy(const std::vector<double>& u) const {
        double bend = 0.0, stretch = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double d = (u[i - 1] - u[i]) + (u[i + 1] - u[i]);
            bend += d * d;
        }
        for (int e = 0; e + 1 < n; ++e) {
            const double d = u[e + 1] - u[e];
            stretch += d * d;
        }
        return bend / (h * h * h) + tau * stretch / h;
    }

    double mass_norm2(const std::vector<double>& u) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += weights[i] * u[i] * u[i];
        return s;
    }

    double rayleigh(const std::vector<double>& u) const { return energy(u) / mass_norm2(u); }

    /// Trapezoid integral of a nodal field.
    double integrate(const std::vector<double>& u) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += weights[i] * u[i];
        return s;
    }

    double node(int i) const { return -R + i * h; }
};

namespace detail {

inline DiffusionOperator assemble_free(double R, double tau, int n) {
    if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
    if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    DiffusionOperator op;
    op.n = n;
    op.R = R;
    op.tau = tau;
    op.h = 2.0 * R / (n - 1);
    op.weights.assign(static_cast<std::size_t>(n), op.h);
    op.weights.front() = op.weights.back() = 0.5 * op.h;
    op.band.assign(static_cast<std::size_t>(DiffusionOperator::ldab * n), 0.0);

    auto add = [&](int i, int j, double v) {
        if (i > j) return;  // upper triangle only
        op.band[static_cast<std::size_t>(DiffusionOperator::kd + i - j + DiffusionOperator::ldab * j)] += v;
    };
    const double c2 = 1.0 / (op.h * op.h * op.h);
    const double c1 = tau / op.h;
    const double s2[3] = {1.0, -2.0, 1.0};
    for (int i = 1; i + 1 < n; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) add(i - 1 + a, i - 1 + b, c2 * s2[a] * s2[b]);
    const double s1[2] = {-1.0, 1.0};
    for (int e = 0; e + 1 < n; ++e)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) add(e + a, e + b, c1 * s1[a] * s1[b]);
    return op;
}

}  // namespace detail

/// Free-condition operator on (-R, R) for time stepping.
inline DiffusionOperator build_diffusion_matrix(double R, double tau, int n_grid) {
    if (n_grid < 128) throw std::invalid_argument("n_grid must be at least 128");
    return detail::assemble_free(R, tau, n_grid);
}

struct FdEigenpair {
    double mu;
    std::vector<double> vec;  // W-orthonormal nodal values
};

namespace detail {

using Block = std::vector<std::vector<double>>;

inline double w_dot(const DiffusionOperator& op, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (int i = 0; i < op.n; ++i) s += op.weights[i] * a[i] * b[i];
    return s;
}

/// Rayleigh-Ritz for K v = mu W v on span(Y). Directions whose W-Gram
/// eigenvalue is below `drop` times the largest are discarded.
inline std::vector<FdEigenpair> rayleigh_ritz(const DiffusionOperator& op, const Block& Y, double drop) {
    const int m = static_cast<int>(Y.size());
    if (m == 0) return {};
    const int n = op.n;
    std::vector<double> G(static_cast<std::size_t>(m) * m), S(static_cast<std::size_t>(m) * m);
    Block KY(Y.size(), std::vector<double>(static_cast<std::size_t>(n)));
    for (int a = 0; a < m; ++a) op.apply(Y[a].data(), KY[a].data());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            G[a + m * b] = w_dot(op, Y[a], Y[b]);
            double k = 0.0;
            for (int i = 0; i < n; ++i) k += Y[a][i] * KY[b][i];
            S[a + m * b] = k;
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < a; ++b) S[a + m * b] = S[b + m * a] = 0.5 * (S[a + m * b] + S[b + m * a]);

    // Orthonormal basis of span(Y) in the W inner product: G = U diag(g) U^T.
    std::vector<double> g(static_cast<std::size_t>(m));
    if (LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', m, G.data(), m, g.data()) != 0)
        throw SolverFailure("Gram eigen-decomposition failed");
    const double gmax = *std::max_element(g.begin(), g.end());
    std::vector<int> keep;
    for (int j = 0; j < m; ++j)
        if (g[j] > drop * gmax) keep.push_back(j);
    const int r = static_cast<int>(keep.size());
    if (r == 0) return {};
    std::vector<double> B(static_cast<std::size_t>(m) * r);  // coefficients, B^T G B = I
    for (int c = 0; c < r; ++c)
        for (int a = 0; a < m; ++a) B[a + m * c] = G[a + m * keep[c]] / std::sqrt(g[keep[c]]);
    std::vector<double> T(static_cast<std::size_t>(r) * r, 0.0);  // B^T S B
    for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d) {
            double t = 0.0;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) t += B[a + m * c] * S[a + m * b] * B[b + m * d];
            T[c + r * d] = t;
        }
    std::vector<double> theta(static_cast<std::size_t>(r));
    if (LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', r, T.data(), r, theta.data()) != 0)
        throw SolverFailure("projected eigen-decomposition failed");

    std::vector<FdEigenpair> out;
    for (int e = 0; e < r; ++e) {
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        for (int c = 0; c < r; ++c) {
            const double coef = T[c + r * e];
            for (int a = 0; a < m; ++a) {
                const double w = coef * B[a + m * c];
                for (int i = 0; i < n; ++i) v[i] += w * Y[a][i];
            }
        }
        const double norm = std::sqrt(op.mass_norm2(v));
        for (double& x : v) x /= norm;
        out.push_back({op.rayleigh(v), std::move(v)});
    }
    return out;
}

/// Y <- (K - sigma W)^-1 W Y with sigma below the spectrum.
inline void shifted_inverse_step(const DiffusionOperator& op, double sigma, Block& Y) {
    const int n = op.n;
    std::vector<double> ab = op.band;
    for (int j = 0; j < n; ++j) ab[static_cast<std::size_t>(DiffusionOperator::kd + DiffusionOperator::ldab * j)] -= sigma * op.weights[j];
    if (LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n, DiffusionOperator::kd, ab.data(), DiffusionOperator::ldab) != 0)
        throw SolverFailure("shifted operator is not positive definite");
    for (auto& y : Y) {
        for (int i = 0; i < n; ++i) y[i] *= op.weights[i];
        if (LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n, DiffusionOperator::kd, 1, ab.data(),
                           DiffusionOperator::ldab, y.data(), n) != 0)
            throw SolverFailure("banded solve failed");
        const double norm = std::sqrt(op.mass_norm2(y));
        for (double& x : y) x /= norm;
    }
}

}  // namespace detail

/// Lowest `count` generalized eigenpairs of the free operator. A banded
/// eigensolve gives the start; two shifted inverse steps and a Rayleigh-Ritz
/// pass, split by reflection symmetry, remove roundoff contamination from the
/// stiff modes so that every returned vector is exactly even or odd.
inline std::vector<FdEigenpair> fd_free_eigenpairs(const DiffusionOperator& op, int count) {
    const int n = op.n;
    if (count < 1 || count > n) throw std::invalid_argument("bad eigenpair count");
    std::vector<double> isw(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) isw[i] = 1.0 / std::sqrt(op.weights[i]);
    // W^-1/2 K W^-1/2 keeps the band.
    std::vector<double> ab = op.band;
    for (int j = 0; j < n; ++j)
        for (int i = std::max(0, j - DiffusionOperator::kd); i <= j; ++i)
            ab[static_cast<std::size_t>(DiffusionOperator::kd + i - j + DiffusionOperator::ldab * j)] *=
                isw[i] * isw[j];

    std::vector<double> q(static_cast<std::size_t>(n) * n), w(static_cast<std::size_t>(n)),
        z(static_cast<std::size_t>(n) * count);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    lapack_int m = 0;
    const lapack_int info = LAPACKE_dsbevx(
        LAPACK_COL_MAJOR, 'V', 'I', 'U', n, DiffusionOperator::kd, ab.data(), DiffusionOperator::ldab,
        q.data(), n, 0.0, 0.0, 1, count, 2.0 * LAPACKE_dlamch('S'), &m, w.data(), z.data(), n,
        ifail.data());
    if (info != 0 || m != count) throw SolverFailure("dsbevx failed, info=" + std::to_string(info));

    detail::Block Y(static_cast<std::size_t>(count), std::vector<double>(static_cast<std::size_t>(n)));
    for (int k = 0; k < count; ++k)
        for (int i = 0; i < n; ++i) Y[k][i] = z[static_cast<std::size_t>(k) * n + i] * isw[i];

    const double sigma = w[0] - std::max(1.0, std::abs(w[0]));
    for (int it = 0; it < 2; ++it) detail::shifted_inverse_step(op, sigma, Y);

    detail::Block even, odd;
    for (const auto& y : Y) {
        std::vector<double> e(static_cast<std::size_t>(n)), o(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            e[i] = 0.5 * (y[i] + y[n - 1 - i]);
            o[i] = 0.5 * (y[i] - y[n - 1 - i]);
        }
        even.push_back(std::move(e));
        odd.push_back(std::move(o));
    }
    auto out = detail::rayleigh_ritz(op, even, 1e-8);
    auto out_odd = detail::rayleigh_ritz(op, odd, 1e-8);
    out.insert(out.end(), std::make_move_iterator(out_odd.begin()), std::make_move_iterator(out_odd.end()));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; });
    if (static_cast<int>(out.size()) < count) throw SolverFailure("lost eigenvectors during refinement");
    out.resize(static_cast<std::size_t>(count));
    return out;
}

/// Eigenvalues of the periodic circulant discretization on (-R, R) with n
/// equispaced nodes. Its symbol is exact, so no matrix is formed.
inline std::vector<double> fd_periodic_values(double R, double tau, int n, int count) {
    const double h = 2.0 * R / n;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const double s = 2.0 - 2.0 * std::cos(2.0 * pi * m / n);
        vals[m] = s * s / (h * h * h * h) + tau * s / (h * h);
    }
    std::sort(vals.begin(), vals.end());
    vals.resize(static_cast<std::size_t>(count));
    return vals;
}

/// Lowest `count` eigenvalues of the discretized operator on (-R, R).
inline std::vector<double> fd_eigensolve(const TensionedOperator& op, double R, int n_grid, int count) {
    if (n_grid < 64) throw std::invalid_argument("n_grid must be at least 64");
    if (count < 1) throw std::invalid_argument("count must be at least 1");
    if (count > n_grid / 4)
        throw GridTooCoarse("count " + std::to_string(count) + " exceeds resolvable modes n_grid/4 = " +
                            std::to_string(n_grid / 4));
    if (op.bc == Boundary::Periodic) return fd_periodic_values(R, op.tau, n_grid, count);
    const auto pairs = fd_free_eigenpairs(detail::assemble_free(R, op.tau, n_grid), count);
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.mu);
    return out;
}

/// Symmetry class of a nodal eigenvector on a symmetric grid.
inline Parity classify_parity(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double even = 0.0, odd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = v[i], b = v[n - 1 - i];
        even += (a + b) * (a + b);
        odd += (a - b) * (a - b);
    }
    return odd > even ? Parity::Odd : Parity::Even;
}

struct LabelledPair {
    EigenBranchId branch;
    FdEigenpair pair;
};

/// Free eigenpairs with labels: parity from the eigenvector's symmetry, the
/// rigid mode as the even vector closest to a constant, indices by counting
/// within each parity.
inline std::vector<LabelledPair> fd_labelled_pairs(const DiffusionOperator& dop, int count) {
    auto pairs = fd_free_eigenpairs(dop, count);
    const std::vector<double> ones(static_cast<std::size_t>(dop.n), 1.0);
    const double ones2 = dop.mass_norm2(ones);
    std::size_t rigid = pairs.size();
    double best = 0.5;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double c = detail::w_dot(dop, pairs[k].vec, ones);
        if (c * c / ones2 > best) {
            best = c * c / ones2;
            rigid = k;
        }
    }
    std::vector<LabelledPair> out;
    int n_even = 0, n_odd = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const Parity par = k == rigid ? Parity::Constant : classify_parity(pairs[k].vec);
        int idx = 0;
        if (par == Parity::Even) idx = n_even++;
        if (par == Parity::Odd) idx = n_odd++;
        out.push_back({{par, idx}, std::move(pairs[k])});
    }
    return out;
}

/// FD spectrum as labelled points.
inline std::vector<SpectrumPoint> fd_spectrum_points(const TensionedOperator& op, double R, int n_grid,
                                                     int count) {
    std::vector<SpectrumPoint> pts;
    const auto vals = fd_eigensolve(op, R, n_grid, count);  // also checks arguments
    if (op.bc == Boundary::Periodic) {
        // Values come as 0 then pairs.
        for (std::size_t i = 0; i < vals.size(); ++i)
            pts.push_back({{Parity::Periodic, static_cast<int>((i + 1) / 2)}, op.tau, R, vals[i],
                           Method::FiniteDifference});
        return pts;
    }
    for (const auto& lp : fd_labelled_pairs(detail::assemble_free(R, op.tau, n_grid), count))
        pts.push_back({lp.branch, op.tau, R, lp.pair.mu, Method::FiniteDifference});
    return pts;
}

}  // namespace t4
