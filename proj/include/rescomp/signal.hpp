#pragma once

#include <cmath>
#include <cstdint>

#include "rescomp/rng.hpp"
#include "rescomp/time_grid.hpp"

namespace rescomp {

/// Parameters of the random driving signal: white Gaussian noise of
/// intensity D smoothed by a double-exponential window exp(-a|t|).
/// Stationary statistics: <u> = 0, <u(t)u(t+tau)> = D (tau + 1/a) exp(-a tau).
struct SignalConfig {
    double noise_intensity = 1.0;       // D
    double inverse_smoothing_time = 1.0;  // a
    std::uint64_t seed = 0;
    TimeGrid grid{0.0, 0.05, 100001};
    bool zero_noise = false;            // debug mode: xi == 0, hence u == 0

    void validate() const {
        grid.validate();
        if (!(noise_intensity > 0.0)) throw ConfigError("SignalConfig: D must be > 0");
        if (!(inverse_smoothing_time > 0.0)) throw ConfigError("SignalConfig: a must be > 0");
    }
};

/// Generate the driving signal u(t).
///
/// The double-exponential smoothing is realized as two cascaded one-sided
/// recursive exponential filters (a causal pass followed by an anticausal
/// pass) over white Gaussian increments of variance D*dt, which gives
/// u_k = sum_j rho^|k-j| W_j with rho = exp(-a dt).  The grid is padded on
/// both sides so the returned segment carries stationary statistics
/// everywhere.  Identical seeds give bit-identical output.
inline Trajectory generate_input(const SignalConfig& cfg) {
    cfg.validate();
    const double a = cfg.inverse_smoothing_time;
    const double dt = cfg.grid.dt;
    const std::int64_t n = cfg.grid.n_steps;

    Trajectory u(cfg.grid, 1);
    u.seed = cfg.seed;
    u.has_seed = true;
    if (cfg.zero_noise) return u;

    const auto pad = static_cast<std::int64_t>(std::ceil(40.0 / (a * dt)));
    const std::int64_t m = n + 2 * pad;
    const double rho = std::exp(-a * dt);
    const double sigma = std::sqrt(cfg.noise_intensity * dt);

    CounterRng rng(cfg.seed);
    std::vector<double> work(static_cast<std::size_t>(m));
    for (std::int64_t k = 0; k < m; ++k)
        work[static_cast<std::size_t>(k)] = sigma * rng.gaussian(static_cast<std::uint64_t>(k));

    // causal pass
    for (std::int64_t k = 1; k < m; ++k)
        work[static_cast<std::size_t>(k)] += rho * work[static_cast<std::size_t>(k - 1)];
    // anticausal pass; the cascade kernel is rho^|n| / (1 - rho^2)
    for (std::int64_t k = m - 2; k >= 0; --k)
        work[static_cast<std::size_t>(k)] += rho * work[static_cast<std::size_t>(k + 1)];

    const double scale = 1.0 - rho * rho;
    for (std::int64_t k = 0; k < n; ++k)
        u.values(k, 0) = scale * work[static_cast<std::size_t>(k + pad)];
    return u;
}

namespace detail {

inline std::int64_t delay_samples(const Trajectory& u, double tau) {
    if (!(tau >= 0.0)) throw ArgumentError("delay: tau must be >= 0");
    if (tau > u.grid.duration() + 1e-12)
        throw ArgumentError("delay: tau exceeds the trajectory duration");
    // snap to the nearest sample; regression targets never interpolate
    return static_cast<std::int64_t>(std::llround(tau / u.grid.dt));
}

inline void require_single_channel(const Trajectory& u, const char* what) {
    if (u.channels() != 1) throw ArgumentError(std::string(what) + ": expected a single channel");
}

}  // namespace detail

/// z(t) = u(t - tau).  Samples with no history are zero and flagged.
inline Trajectory delayed_target(const Trajectory& u, double tau) {
    detail::require_single_channel(u, "delayed_target");
    const std::int64_t lag = detail::delay_samples(u, tau);
    Trajectory z(u.grid, 1);
    z.seed = u.seed;
    z.has_seed = u.has_seed;
    for (std::int64_t k = 0; k < u.grid.n_steps; ++k) {
        if (k < lag || u.flagged(k - lag)) {
            z.flag_burn_in(k);
        } else {
            z.values(k, 0) = u.values(k - lag, 0);
        }
    }
    return z;
}

/// z(t) = u(t - tau1) * u(t - tau2).
inline Trajectory product_target(const Trajectory& u, double tau1, double tau2) {
    detail::require_single_channel(u, "product_target");
    const std::int64_t lag1 = detail::delay_samples(u, tau1);
    const std::int64_t lag2 = detail::delay_samples(u, tau2);
    Trajectory z(u.grid, 1);
    z.seed = u.seed;
    z.has_seed = u.has_seed;
    for (std::int64_t k = 0; k < u.grid.n_steps; ++k) {
        if (k < lag1 || k < lag2 || u.flagged(k - lag1) || u.flagged(k - lag2)) {
            z.flag_burn_in(k);
        } else {
            z.values(k, 0) = u.values(k - lag1, 0) * u.values(k - lag2, 0);
        }
    }
    return z;
}

/// Fixed quadratic filtering benchmark target:
///   z(t) = int_0^10 K1(s) u(t-s) ds
///        + int_0^10 int_0^10 K2(s1,s2) u(t-s1) u(t-s2) ds1 ds2
/// with K1(s) = exp(-0.5 s) cos(2 s) and
///      K2(s1,s2) = -exp(-0.3 (s1+s2)) cos(2 (s1-s2)).
/// Integrals use the trapezoid rule on the sample grid.  K2 separates as
/// -(A^2 + B^2) with A, B the cos/sin single convolutions, which is how the
/// double integral is evaluated (identical to the full double trapezoid sum
/// because the weights factorize).  Samples with less than 10 time units of
/// history are flagged as burn-in.
struct FilterTaskKernels {
    static constexpr double horizon = 10.0;
    static constexpr double k1_decay = 0.5;
    static constexpr double k2_decay = 0.3;
    static constexpr double frequency = 2.0;

    static double k1(double s) { return std::exp(-k1_decay * s) * std::cos(frequency * s); }
    static double k2(double s1, double s2) {
        return -std::exp(-k2_decay * (s1 + s2)) * std::cos(frequency * (s1 - s2));
    }
};

inline Trajectory filter_target(const Trajectory& u) {
    detail::require_single_channel(u, "filter_target");
    const double dt = u.grid.dt;
    const auto taps = static_cast<std::int64_t>(std::llround(FilterTaskKernels::horizon / dt));
    if (taps >= u.grid.n_steps)
        throw ArgumentError("filter_target: trajectory shorter than the filter horizon");

    std::vector<double> wk1(static_cast<std::size_t>(taps) + 1);
    std::vector<double> wcos(wk1.size()), wsin(wk1.size());
    for (std::int64_t j = 0; j <= taps; ++j) {
        const double s = static_cast<double>(j) * dt;
        const double w = (j == 0 || j == taps) ? 0.5 * dt : dt;  // trapezoid weight
        wk1[static_cast<std::size_t>(j)] = w * FilterTaskKernels::k1(s);
        const double e = w * std::exp(-FilterTaskKernels::k2_decay * s);
        wcos[static_cast<std::size_t>(j)] = e * std::cos(FilterTaskKernels::frequency * s);
        wsin[static_cast<std::size_t>(j)] = e * std::sin(FilterTaskKernels::frequency * s);
    }

    Trajectory z(u.grid, 1);
    z.seed = u.seed;
    z.has_seed = u.has_seed;
    for (std::int64_t k = 0; k < u.grid.n_steps; ++k) {
        if (k < taps) {
            z.flag_burn_in(k);
            continue;
        }
        double lin = 0.0, qc = 0.0, qs = 0.0;
        for (std::int64_t j = 0; j <= taps; ++j) {
            const double v = u.values(k - j, 0);
            lin += wk1[static_cast<std::size_t>(j)] * v;
            qc += wcos[static_cast<std::size_t>(j)] * v;
            qs += wsin[static_cast<std::size_t>(j)] * v;
        }
        z.values(k, 0) = lin - (qc * qc + qs * qs);
    }
    return z;
}

}  // namespace rescomp
