#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rescomp/errors.hpp"

namespace rescomp {

/// Uniform sampling grid.  Sample k sits at exactly t0 + k*dt.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.05;
    std::int64_t n_steps = 0;

    [[nodiscard]] double time(std::int64_t k) const { return t0 + static_cast<double>(k) * dt; }
    [[nodiscard]] double t_end() const { return time(n_steps - 1); }
    [[nodiscard]] double duration() const { return static_cast<double>(n_steps - 1) * dt; }

    /// Grid covering [t0, t_end] inclusive; t_end is rounded to the nearest sample.
    [[nodiscard]] static TimeGrid over(double t0, double t_end, double dt) {
        if (!(dt > 0.0) || !(t_end > t0))
            throw ConfigError("TimeGrid::over: need dt > 0 and t_end > t0");
        const auto n = static_cast<std::int64_t>(std::llround((t_end - t0) / dt)) + 1;
        return TimeGrid{t0, dt, n};
    }

    /// Nearest sample index for time t (may fall outside [0, n_steps)).
    [[nodiscard]] std::int64_t index_of(double t) const {
        return static_cast<std::int64_t>(std::llround((t - t0) / dt));
    }

    [[nodiscard]] bool matches(const TimeGrid& other, double tol = 1e-12) const {
        return n_steps == other.n_steps && std::abs(t0 - other.t0) <= tol &&
               std::abs(dt - other.dt) <= tol;
    }

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("TimeGrid: dt must be positive");
        if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
    }
};

/// Multichannel time series on a shared grid.  One column per channel.
/// Burn-in samples (insufficient history for a derived target) are kept in
/// place and flagged, so windows can be intersected with the mask downstream.
struct Trajectory {
    TimeGrid grid;
    Eigen::MatrixXd values;               // n_steps x channels
    std::vector<std::uint8_t> burn_in;    // empty means "no samples flagged"
    std::uint64_t seed = 0;
    bool has_seed = false;

    Trajectory() = default;
    Trajectory(TimeGrid g, Eigen::Index channels) : grid(g) {
        grid.validate();
        values.setZero(grid.n_steps, channels);
    }

    [[nodiscard]] Eigen::Index channels() const { return values.cols(); }
    [[nodiscard]] std::int64_t n_steps() const { return grid.n_steps; }

    [[nodiscard]] bool flagged(std::int64_t k) const {
        return !burn_in.empty() && burn_in[static_cast<std::size_t>(k)] != 0;
    }

    void flag_burn_in(std::int64_t k) {
        if (burn_in.empty()) burn_in.assign(static_cast<std::size_t>(grid.n_steps), 0);
        burn_in[static_cast<std::size_t>(k)] = 1;
    }

    void check_finite(const char* what) const {
        if (!values.allFinite()) throw ArgumentError(std::string(what) + ": non-finite samples");
    }

    /// Horizontal concatenation of channels; grids must match, burn-in masks
    /// are OR-ed together.
    [[nodiscard]] static Trajectory concat(const std::vector<const Trajectory*>& parts) {
        if (parts.empty()) throw ArgumentError("Trajectory::concat: no parts");
        Eigen::Index total = 0;
        for (const auto* p : parts) {
            if (!p->grid.matches(parts.front()->grid))
                throw ArgumentError("Trajectory::concat: mismatched grids");
            total += p->channels();
        }
        Trajectory out(parts.front()->grid, total);
        Eigen::Index at = 0;
        for (const auto* p : parts) {
            out.values.middleCols(at, p->channels()) = p->values;
            at += p->channels();
            if (!p->burn_in.empty()) {
                if (out.burn_in.empty())
                    out.burn_in.assign(static_cast<std::size_t>(out.grid.n_steps), 0);
                for (std::size_t k = 0; k < p->burn_in.size(); ++k)
                    out.burn_in[k] = static_cast<std::uint8_t>(out.burn_in[k] | p->burn_in[k]);
            }
        }
        if (parts.front()->has_seed) {
            out.seed = parts.front()->seed;
            out.has_seed = true;
        }
        return out;
    }
};

/// Half-open analysis window [t_begin, t_end) in grid time.
struct Window {
    double t_begin = 0.0;
    double t_end = 0.0;

    [[nodiscard]] double length() const { return t_end - t_begin; }
};

/// Indices of samples inside a window, skipping flagged burn-in samples of
/// all listed trajectories.
inline std::vector<std::int64_t> window_indices(const TimeGrid& grid, const Window& w,
                                                const std::vector<const Trajectory*>& masked = {}) {
    std::vector<std::int64_t> idx;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        const double t = grid.time(k);
        if (t < w.t_begin - 1e-12 || t >= w.t_end - 1e-12) continue;
        bool skip = false;
        for (const auto* traj : masked)
            if (traj->flagged(k)) { skip = true; break; }
        if (!skip) idx.push_back(k);
    }
    return idx;
}

}  // namespace rescomp
