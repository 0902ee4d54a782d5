#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "t4/error.hpp"

namespace t4::roots {

/// Stop when the bracket is narrower than rel * |x| + abs_floor.
struct BracketTolerance {
    double rel = 1e-13;
    double abs_floor = 0.0;
    bool operator()(double a, double b) const {
        return std::abs(b - a) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
    }
};

/// Root of f in [lo, hi]; f(lo) and f(hi) must not share a strict sign.
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double flo, double fhi,
                       BracketTolerance tol = {}) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw NoSolution("bracket does not straddle a root");
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (a + b);
}

template <class F>
double solve_bracketed(F&& f, double lo, double hi, BracketTolerance tol = {}) {
    return solve_bracketed(f, lo, hi, f(lo), f(hi), tol);
}

/// Minimizer of g on [lo, hi] (Brent), returned as (x, g(x)).
template <class G>
std::pair<double, double> minimize(G&& g, double lo, double hi) {
    std::uintmax_t iters = 100;
    return boost::math::tools::brent_find_minima(g, lo, hi, 40, iters);
}

}  // namespace t4::roots
