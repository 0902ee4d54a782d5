#pragma once

// Reaction kinetics. Any type with
//   ReactionValue eval(double u, double v) const
// can drive the simulator; Gierer-Meinhardt is the built-in model:
//   f(u, v) = k1 - k2 u + k3 u^2 / v,   g(u, v) = k4 u^2 - k5 v.

#include <cmath>
#include <concepts>
#include <stdexcept>

#include "t4/dispersion.hpp"
#include "t4/error.hpp"

namespace t4 {

struct ReactionValue {
    double f = 0.0;
    double g = 0.0;
    bool floored = false;  // the inhibitor was raised to the floor before evaluating
};

template <class K>
concept Kinetics = requires(const K& k, double u, double v) {
    { k.eval(u, v) } -> std::same_as<ReactionValue>;
};

struct GMConstants {
    double k1 = 0.0;
    double k2 = 0.4;
    double k3 = 1.0;
    double k4 = 1.0;
    double k5 = 1.0;
};

inline void validate(const GMConstants& c) {
    if (!(c.k1 >= 0.0)) throw std::invalid_argument("k1 must be nonnegative");
    if (!(c.k2 > 0.0 && c.k3 > 0.0 && c.k4 > 0.0 && c.k5 > 0.0))
        throw std::invalid_argument("k2..k5 must be positive");
}

struct SteadyState {
    double u0;
    double v0;
};

inline constexpr double default_v_floor = 1e-8;

inline ReactionValue gm_eval(const GMConstants& c, double u, double v, double v_floor = default_v_floor) {
    ReactionValue r;
    if (v <= v_floor) {
        v = v_floor;
        r.floored = true;
    }
    r.f = c.k1 - c.k2 * u + c.k3 * u * u / v;
    r.g = c.k4 * u * u - c.k5 * v;
    return r;
}

/// Positive homogeneous steady state. g = 0 gives v = k4 u^2 / k5, and then
/// f = k1 + k3 k5 / k4 - k2 u is linear in u.
inline SteadyState gm_steady_state(const GMConstants& c) {
    validate(c);
    const double u0 = (c.k1 + c.k3 * c.k5 / c.k4) / c.k2;
    const double v0 = c.k4 * u0 * u0 / c.k5;
    if (!(u0 > 0.0 && v0 > 0.0) || !std::isfinite(u0) || !std::isfinite(v0))
        throw NoSteadyState("no positive steady state for these constants");
    return {u0, v0};
}

struct JacobianEntries {
    double f_u, f_v, g_u, g_v;

    ReactionParams with_ratio(double k) const { return {f_u, f_v, g_u, g_v, k}; }
};

inline JacobianEntries gm_jacobian(const GMConstants& c, const SteadyState& s) {
    return {-c.k2 + 2.0 * c.k3 * s.u0 / s.v0, -c.k3 * s.u0 * s.u0 / (s.v0 * s.v0), 2.0 * c.k4 * s.u0, -c.k5};
}

struct GiererMeinhardt {
    GMConstants c;
    double v_floor = default_v_floor;

    ReactionValue eval(double u, double v) const { return gm_eval(c, u, v, v_floor); }
};

/// Linearized kinetics about a steady state, in deviation variables.
struct LinearKinetics {
    JacobianEntries J;

    ReactionValue eval(double u, double v) const { return {J.f_u * u + J.f_v * v, J.g_u * u + J.g_v * v, false}; }
};

/// f = g = 0, for diffusion-only runs.
struct NoReaction {
    ReactionValue eval(double, double) const { return {}; }
};

}  // namespace t4
