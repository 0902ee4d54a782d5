#pragma once

// Time integration of
//   u_t = -(u'''' - tau u'')   + f(u, v)
//   v_t = -k (v'''' - tau v'') + g(u, v)
// on (-R, R) with free conditions. First-order IMEX: diffusion by backward
// Euler, reaction explicit, written in increment form
//   (W + dt K) du = dt (W f - K u)
// so that a steady state is reproduced bit for bit.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "t4/dispersion.hpp"
#include "t4/error.hpp"
#include "t4/fd.hpp"
#include "t4/kinetics.hpp"
#include "t4/spectrum.hpp"

namespace t4 {

struct SimConfig {
    double R = 20.0;
    double tau = 0.5;
    double k = 30.0;
    GMConstants kinetics;
    int n_grid = 256;
    double dt = 1e-3;
    double t_max = 50.0;
    double perturbation_amplitude = 1e-2;
    std::uint64_t seed = 0;
    int snapshot_stride = 1000;
};

inline void validate(const SimConfig& c) {
    if (!(c.R > 0.0)) throw std::invalid_argument("R must be positive");
    if (!std::isfinite(c.tau)) throw std::invalid_argument("tau must be finite");
    if (!(c.k > 0.0)) throw std::invalid_argument("k must be positive");
    if (c.n_grid < 128) throw std::invalid_argument("n_grid must be at least 128");
    if (!(c.dt > 0.0 && c.dt <= 1e-2)) throw std::invalid_argument("dt must lie in (0, 1e-2]");
    if (!(c.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    if (!(c.perturbation_amplitude >= 0.0)) throw std::invalid_argument("perturbation amplitude must be >= 0");
    if (c.snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be at least 1");
    validate(c.kinetics);
}

enum class Classification { Running, Patterned, Decayed, BlownUp };

inline std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Running: return "Running";
        case Classification::Patterned: return "Patterned";
        case Classification::Decayed: return "Decayed";
        case Classification::BlownUp: return "BlownUp";
    }
    return "?";
}

struct SimState {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    double mass_u = 0.0;
    double mass_v = 0.0;
    Classification classification = Classification::Running;
};

/// Banded factorizations of W + dt K and W + dt k K. The constructor halves
/// dt until both are positive definite.
class ImexStepper {
public:
    ImexStepper(DiffusionOperator op, double k, double dt) : op_(std::move(op)), k_(k), dt_(dt) {
        for (halvings_ = 0; halvings_ <= 40; ++halvings_) {
            if (factor(fu_, 1.0) && factor(fv_, k_)) {
                ru_.resize(static_cast<std::size_t>(op_.n));
                rv_.resize(ru_.size());
                ku_.resize(ru_.size());
                kv_.resize(ru_.size());
                return;
            }
            dt_ *= 0.5;
        }
        throw SolverFailure("implicit diffusion matrix is not positive definite for any dt tried");
    }

    double dt() const { return dt_; }
    int halvings() const { return halvings_; }
    const DiffusionOperator& op() const { return op_; }

    /// One step in place. Returns the number of nodes where the kinetics
    /// floored the inhibitor.
    template <Kinetics K>
    int step(std::vector<double>& u, std::vector<double>& v, const K& kin) {
        const int n = op_.n;
        op_.apply(u.data(), ku_.data());
        op_.apply(v.data(), kv_.data());
        int floored = 0;
        for (int i = 0; i < n; ++i) {
            const ReactionValue r = kin.eval(u[i], v[i]);
            floored += r.floored;
            const double w = op_.weights[i];
            ru_[i] = dt_ * (w * r.f - ku_[i]);
            rv_[i] = dt_ * (w * r.g - k_ * kv_[i]);
        }
        solve(fu_, ru_);
        solve(fv_, rv_);
        for (int i = 0; i < n; ++i) {
            u[i] += ru_[i];
            v[i] += rv_[i];
        }
        return floored;
    }

private:
    bool factor(std::vector<double>& ab, double diff) {
        ab = op_.band;
        for (double& x : ab) x *= dt_ * diff;
        for (int j = 0; j < op_.n; ++j)
            ab[static_cast<std::size_t>(DiffusionOperator::kd + DiffusionOperator::ldab * j)] += op_.weights[j];
        return LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', op_.n, DiffusionOperator::kd, ab.data(),
                              DiffusionOperator::ldab) == 0;
    }

    void solve(const std::vector<double>& ab, std::vector<double>& rhs) const {
        if (LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', op_.n, DiffusionOperator::kd, 1, ab.data(),
                           DiffusionOperator::ldab, rhs.data(), op_.n) != 0)
            throw SolverFailure("banded triangular solve failed");
    }

    DiffusionOperator op_;
    double k_;
    double dt_;
    int halvings_ = 0;
    std::vector<double> fu_, fv_;
    std::vector<double> ru_, rv_, ku_, kv_;
};

inline constexpr double blowup_threshold = 1e6;

inline bool fields_blown_up(const std::vector<double>& u, const std::vector<double>& v) {
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(std::abs(u[i]) <= blowup_threshold) || !(std::abs(v[i]) <= blowup_threshold)) return true;
    return false;
}

/// One IMEX step of the Gierer-Meinhardt system. Builds the factorization on
/// every call; `run` keeps one stepper for the whole integration.
inline SimState step_imex(const SimState& state, const SimConfig& cfg) {
    validate(cfg);
    if (state.classification != Classification::Running) throw std::invalid_argument("state is not running");
    ImexStepper stepper(build_diffusion_matrix(cfg.R, cfg.tau, cfg.n_grid), cfg.k, cfg.dt);
    SimState next = state;
    stepper.step(next.u, next.v, GiererMeinhardt{cfg.kinetics});
    next.t += stepper.dt();
    next.mass_u = stepper.op().integrate(next.u);
    next.mass_v = stepper.op().integrate(next.v);
    if (fields_blown_up(next.u, next.v)) next.classification = Classification::BlownUp;
    return next;
}

struct DetectorEvent {
    double t;
    std::string what;
    double value;
};

struct RunReport {
    Classification classification = Classification::Running;
    double final_time = 0.0;
    double dt = 0.0;
    int dt_halvings = 0;
    std::uint64_t steps = 0;
    double mass_u0 = 0.0, mass_v0 = 0.0;
    double mass_u = 0.0, mass_v = 0.0;
    double mass_drift_rate = 0.0;   // max relative mass change per unit time
    double amplitude = 0.0;         // max |u - u0| / u0 at the end
    double last_relative_change = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t floor_activations = 0;
    std::vector<DetectorEvent> log;
    SteadyState steady{};
    std::uint64_t seed = 0;
};

/// Receives (t, u, v) at the start, every snapshot_stride steps, and at the end.
using SnapshotSink = std::function<void(double, const std::vector<double>&, const std::vector<double>&)>;

inline SimState initial_state(const SimConfig& cfg, const SteadyState& s) {
    SimState st;
    st.u.assign(static_cast<std::size_t>(cfg.n_grid), s.u0);
    st.v.assign(static_cast<std::size_t>(cfg.n_grid), s.v0);
    if (cfg.perturbation_amplitude > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        for (auto& x : st.u) x = s.u0 * (1.0 + cfg.perturbation_amplitude * noise(rng));
        for (auto& x : st.v) x = s.v0 * (1.0 + cfg.perturbation_amplitude * noise(rng));
    }
    return st;
}

/// Integrates from the perturbed steady state to t_max, stopping early only
/// on blow-up. Decayed and Patterned are judged at the end:
///   Decayed:   amplitude <= 0.1 eps
///   Patterned: amplitude > 10 eps and relative change of u between the last
///              two snapshots < 1e-6
/// where amplitude = max |u - u0| / u0 and eps is the perturbation amplitude.
inline RunReport run(const SimConfig& cfg, const SnapshotSink& sink = nullptr) {
    validate(cfg);
    RunReport rep;
    rep.seed = cfg.seed;
    const SteadyState s = gm_steady_state(cfg.kinetics);
    rep.steady = s;
    ImexStepper stepper(build_diffusion_matrix(cfg.R, cfg.tau, cfg.n_grid), cfg.k, cfg.dt);
    rep.dt = stepper.dt();
    rep.dt_halvings = stepper.halvings();
    if (rep.dt_halvings > 0) rep.log.push_back({0.0, "dt_halved", rep.dt});

    SimState st = initial_state(cfg, s);
    const auto& op = stepper.op();
    rep.mass_u0 = op.integrate(st.u);
    rep.mass_v0 = op.integrate(st.v);
    if (sink) sink(0.0, st.u, st.v);

    const GiererMeinhardt kin{cfg.kinetics};
    const auto total_steps = static_cast<std::uint64_t>(std::ceil(cfg.t_max / rep.dt - 1e-9));
    const int stride = std::max(1, static_cast<int>(std::lround(cfg.snapshot_stride * (cfg.dt / rep.dt))));
    std::vector<double> last_snapshot = st.u;
    double floored_since = -1.0;  // start time of the current floor streak
    double max_drift = 0.0;

    auto amplitude = [&] {
        double a = 0.0;
        for (double x : st.u) a = std::max(a, std::abs(x - s.u0));
        return a / s.u0;
    };

    std::uint64_t n = 0;
    for (; n < total_steps; ++n) {
        const int floored = stepper.step(st.u, st.v, kin);
        st.t = (n + 1) * rep.dt;
        rep.floor_activations += static_cast<std::uint64_t>(floored);
        if (floored > 0) {
            if (floored_since < 0.0) {
                floored_since = st.t;
                rep.log.push_back({st.t, "v_floor", static_cast<double>(floored)});
            }
            if (st.t - floored_since >= 1.0) {
                st.classification = Classification::BlownUp;
                rep.log.push_back({st.t, "blowup_floor_persistent", st.t - floored_since});
                ++n;
                break;
            }
        } else {
            floored_since = -1.0;
        }
        if (fields_blown_up(st.u, st.v)) {
            st.classification = Classification::BlownUp;
            rep.log.push_back({st.t, "blowup_magnitude", 0.0});
            ++n;
            break;
        }
        if ((n + 1) % static_cast<std::uint64_t>(stride) == 0) {
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < st.u.size(); ++i) {
                diff = std::max(diff, std::abs(st.u[i] - last_snapshot[i]));
                scale = std::max(scale, std::abs(st.u[i]));
            }
            rep.last_relative_change = diff / scale;
            last_snapshot = st.u;
            const double mu_now = op.integrate(st.u);
            max_drift = std::max(max_drift, std::abs(mu_now - rep.mass_u0) / std::max(std::abs(rep.mass_u0), 1e-300) / st.t);
            if (sink) sink(st.t, st.u, st.v);
        }
    }
    rep.steps = n;
    rep.final_time = st.t;
    rep.mass_u = op.integrate(st.u);
    rep.mass_v = op.integrate(st.v);
    rep.mass_drift_rate = max_drift;
    if (st.classification != Classification::BlownUp) {
        rep.amplitude = amplitude();
        const double eps = cfg.perturbation_amplitude;
        if (rep.amplitude <= 0.1 * eps) st.classification = Classification::Decayed;
        else if (rep.amplitude > 10.0 * eps && rep.last_relative_change < 1e-6)
            st.classification = Classification::Patterned;
        rep.log.push_back({st.t, "final_amplitude", rep.amplitude});
        if (sink && n % static_cast<std::uint64_t>(stride) != 0) sink(st.t, st.u, st.v);
    }
    rep.classification = st.classification;
    return rep;
}

// ---------------------------------------------------------------------------
// Linear growth probe

struct ModeProbe {
    EigenBranchId branch;
    double mu = 0.0;           // branch eigenvalue on (-R, R)
    double mu_discrete = 0.0;  // matching FD eigenvalue
    double measured_rate = 0.0;
    double predicted_rate = 0.0;
};

namespace detail {

/// Dominant eigenvalue of the 2x2 mode matrix and the left eigenvector that
/// extracts its coefficient.
struct ModeBasis {
    std::complex<double> lambda;
    std::complex<double> left[2];
};

inline ModeBasis dominant_mode(double m00, double m01, double m10, double m11) {
    using cplx = std::complex<double>;
    const double tr = m00 + m11, det = m00 * m11 - m01 * m10;
    const cplx sq = std::sqrt(cplx(tr * tr - 4.0 * det));
    const cplx l1 = 0.5 * (tr + sq), l2 = 0.5 * (tr - sq);
    const cplx lam = l1.real() >= l2.real() ? l1 : l2;
    // Left eigenvector y with y (M - lam) = 0.
    if (m10 != 0.0) return {lam, {1.0, -(m00 - lam) / m10}};
    if (m01 != 0.0) return {lam, {-(m11 - lam) / m01, 1.0}};
    const bool first = m00 >= m11;
    return {lam, {first ? 1.0 : 0.0, first ? 0.0 : 1.0}};
}

}  // namespace detail

/// Integrates the linearized system from the discrete eigenvector of `branch`
/// and fits the log-amplitude slope of the dominant mode coefficient over
/// t in [0, window].
inline ModeProbe probe_linear_rate(const SimConfig& cfg, EigenBranchId branch, double window = 5.0) {
    validate(cfg);
    const SteadyState s = gm_steady_state(cfg.kinetics);
    const JacobianEntries J = gm_jacobian(cfg.kinetics, s);
    const ReactionParams p = J.with_ratio(cfg.k);

    ModeProbe probe;
    probe.branch = branch;
    probe.mu = branch.parity == Parity::Constant ? 0.0 : free_branch_mu(branch, cfg.tau, cfg.R);
    probe.predicted_rate = growth_rate(p, probe.mu).lambda_max_real;

    DiffusionOperator op = build_diffusion_matrix(cfg.R, cfg.tau, cfg.n_grid);
    const auto below = spectrum_up_to({cfg.tau, Boundary::Free}, cfg.R, probe.mu);
    const int count = std::min(static_cast<int>(below.size()) + 4, cfg.n_grid / 4);
    const auto pairs = fd_labelled_pairs(op, count);
    const std::vector<double>* phi = nullptr;
    for (const auto& lp : pairs)
        if (lp.branch == branch) {
            phi = &lp.pair.vec;
            probe.mu_discrete = lp.pair.mu;
        }
    if (!phi) throw BranchNotFound("branch not resolved by the grid");

    const auto basis = detail::dominant_mode(J.f_u - probe.mu_discrete, J.f_v, J.g_u, J.g_v - cfg.k * probe.mu_discrete);
    std::vector<double> u = *phi, v = *phi;
    ImexStepper stepper(std::move(op), cfg.k, cfg.dt);
    const LinearKinetics kin{J};
    const auto& dop = stepper.op();

    auto coefficient = [&] {
        const double cu = detail::w_dot(dop, *phi, u);
        const double cv = detail::w_dot(dop, *phi, v);
        return std::abs(basis.left[0] * cu + basis.left[1] * cv);
    };
    std::vector<double> ts, logs;
    const double sample_every = 0.05;
    const auto steps = static_cast<std::uint64_t>(std::llround(window / stepper.dt()));
    const auto every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(sample_every / stepper.dt())));
    ts.push_back(0.0);
    logs.push_back(std::log(coefficient()));
    for (std::uint64_t n = 1; n <= steps; ++n) {
        stepper.step(u, v, kin);
        if (n % every == 0) {
            ts.push_back(n * stepper.dt());
            logs.push_back(std::log(coefficient()));
        }
    }
    double mt = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        ml += logs[i];
    }
    mt /= ts.size();
    ml /= ts.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mt) * (logs[i] - ml);
        sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    probe.measured_rate = sxy / sxx;
    return probe;
}

}  // namespace t4
