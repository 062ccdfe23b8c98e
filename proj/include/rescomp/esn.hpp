#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <vector>

#include "rescomp/rng.hpp"
#include "rescomp/time_grid.hpp"

namespace rescomp {

/// Continuous-time echo state network,
///   x' = -leak x + tanh(W x + r_b + r_i u(t)),
/// with a sparse +-1 coupling matrix of constant row fanout rescaled to a
/// prescribed spectral radius.
struct EsnConfig {
    int size = 780;
    int fanout = 10;
    double spectral_radius = 0.95;
    double bias_scale = 0.2;
    double input_scale = 0.1;
    double dt = 0.05;
    std::uint64_t seed = 0;
    double leak = 1.0;

    void validate() const {
        if (size < 1) throw ConfigError("EsnConfig: size must be >= 1");
        if (fanout < 1 || fanout > size) throw ConfigError("EsnConfig: need 1 <= fanout <= size");
        if (!(spectral_radius > 0.0 && spectral_radius < 1.0))
            throw ConfigError("EsnConfig: spectral radius must be in (0, 1)");
        if (!(dt > 0.0)) throw ConfigError("EsnConfig: dt must be > 0");
        if (!(bias_scale >= 0.0) || !(input_scale >= 0.0))
            throw ConfigError("EsnConfig: scales must be >= 0");
        if (!(leak > 0.0)) throw ConfigError("EsnConfig: leak must be > 0");
    }
};

struct EsnReservoir {
    EsnConfig config;
    std::vector<int> columns;        // size * fanout, row-major
    std::vector<double> weights;     // matching values
    Eigen::VectorXd bias;            // r_b
    Eigen::VectorXd input_weights;   // r_i

    [[nodiscard]] Eigen::MatrixXd dense_coupling() const {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(config.size, config.size);
        for (int r = 0; r < config.size; ++r)
            for (int j = 0; j < config.fanout; ++j)
                w(r, columns[static_cast<std::size_t>(r * config.fanout + j)]) +=
                    weights[static_cast<std::size_t>(r * config.fanout + j)];
        return w;
    }
};

inline EsnReservoir build_esn(const EsnConfig& cfg) {
    cfg.validate();
    EsnReservoir res;
    res.config = cfg;
    res.columns.resize(static_cast<std::size_t>(cfg.size) * cfg.fanout);
    res.weights.resize(res.columns.size());

    const CounterRng rng(cfg.seed);
    const CounterRng col_rng = rng.substream(1);
    const CounterRng sign_rng = rng.substream(2);
    const CounterRng bias_rng = rng.substream(3);
    const CounterRng input_rng = rng.substream(4);

    // per-row column choice without replacement (partial Fisher-Yates)
    std::vector<int> pool(static_cast<std::size_t>(cfg.size));
    for (int r = 0; r < cfg.size; ++r) {
        std::iota(pool.begin(), pool.end(), 0);
        for (int j = 0; j < cfg.fanout; ++j) {
            const auto ctr = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(cfg.fanout) + static_cast<std::uint64_t>(j);
            const auto pick = j + static_cast<int>(col_rng.bits(ctr) % static_cast<std::uint64_t>(cfg.size - j));
            std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
            res.columns[static_cast<std::size_t>(r * cfg.fanout + j)] = pool[static_cast<std::size_t>(j)];
            res.weights[static_cast<std::size_t>(r * cfg.fanout + j)] =
                (sign_rng.bits(ctr) & 1ULL) ? 1.0 : -1.0;
        }
    }

    Eigen::EigenSolver<Eigen::MatrixXd> eig(res.dense_coupling(), false);
    if (eig.info() != Eigen::Success) throw NumericalError("build_esn: eigensolver failed");
    const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(rho > 0.0)) throw NumericalError("build_esn: coupling has zero spectral radius");
    const double scale = cfg.spectral_radius / rho;
    for (double& w : res.weights) w *= scale;

    res.bias.resize(cfg.size);
    res.input_weights.resize(cfg.size);
    for (int i = 0; i < cfg.size; ++i) {
        res.bias(i) = cfg.bias_scale * bias_rng.uniform_symmetric(static_cast<std::uint64_t>(i));
        res.input_weights(i) = cfg.input_scale * input_rng.uniform_symmetric(static_cast<std::uint64_t>(i));
    }
    return res;
}

/// Forward-Euler simulation on the drive grid (must match the configured dt).
inline Trajectory simulate_esn(const EsnReservoir& res, const Trajectory& u,
                               const Eigen::VectorXd& x0 = {}) {
    if (u.channels() != 1) throw ArgumentError("simulate_esn: expected a single-channel input");
    if (std::abs(u.grid.dt - res.config.dt) > 1e-12)
        throw ArgumentError("simulate_esn: drive grid dt != configured dt");
    const int n = res.config.size;
    Eigen::VectorXd x = x0.size() ? x0 : Eigen::VectorXd::Zero(n);
    if (x.size() != n) throw ArgumentError("simulate_esn: x0 length mismatch");

    const double dt = res.config.dt;
    const double leak = res.config.leak;
    Trajectory out(u.grid, n);
    out.seed = u.seed;
    out.has_seed = u.has_seed;
    out.values.row(0) = x.transpose();

    Eigen::VectorXd act(n);
    for (std::int64_t k = 0; k + 1 < u.grid.n_steps; ++k) {
        act = res.bias + res.input_weights * u.values(k, 0);
        for (int r = 0; r < n; ++r) {
            double acc = 0.0;
            const std::size_t base = static_cast<std::size_t>(r) * static_cast<std::size_t>(res.config.fanout);
            for (int j = 0; j < res.config.fanout; ++j)
                acc += res.weights[base + static_cast<std::size_t>(j)] *
                       x(res.columns[base + static_cast<std::size_t>(j)]);
            act(r) += acc;
        }
        x += dt * (-leak * x + act.array().tanh().matrix());
        out.values.row(k + 1) = x.transpose();
    }
    return out;
}

}  // namespace rescomp
