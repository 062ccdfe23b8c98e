#pragma once

#include <Eigen/Dense>

#include "rescomp/lrc.hpp"
#include "rescomp/memristor.hpp"

namespace rescomp {

struct LrcStageConfig {
    double gamma = 0.4;
    double delta_omega = 0.4;
    int n = 10;
};

/// Two-layer reservoir: a surface layer driven by the input and a deep layer
/// driven by the surface trajectories through a fixed coupling matrix,
/// s_deep = C x_surface.  Output channels are surface first, then deep.
struct DeepReservoir {
    enum class Kind { MemristorToLrc, LrcToMemristor };
    Kind kind = Kind::LrcToMemristor;

    // MemristorToLrc: an opposed pair feeding one LRC bank per pair channel
    MemristorNetwork surface_pair;
    LrcBank deep_bank;

    // LrcToMemristor: an LRC bank feeding isolated memristors pairwise
    LrcBank surface_bank;
    MemristorNetwork deep_devices;

    Eigen::MatrixXd coupling;  // deep sources x surface channels

    [[nodiscard]] int surface_channels() const {
        return kind == Kind::MemristorToLrc ? surface_pair.n_devices() : 2 * surface_bank.size();
    }
    [[nodiscard]] int deep_channels() const {
        return kind == Kind::MemristorToLrc ? 2 * 2 * deep_bank.size() : deep_devices.n_devices();
    }
    [[nodiscard]] int total_channels() const { return surface_channels() + deep_channels(); }
};

/// Opposed memristor pair driving one LRC bank per pair trajectory.  With a
/// bank of N subcircuits the coupling is (4N) x 2: the first 2N deep sources
/// listen to eta_+, the next 2N to eta_-.
inline DeepReservoir build_mem_to_lrc(const MemristorNetwork& pair, const LrcStageConfig& lrc) {
    pair.validate();
    if (pair.n_devices() != 2)
        throw ArgumentError("build_mem_to_lrc: surface network must have exactly 2 devices");
    DeepReservoir d;
    d.kind = DeepReservoir::Kind::MemristorToLrc;
    d.surface_pair = pair;
    d.deep_bank = design_bank(lrc.gamma, lrc.delta_omega, lrc.n);
    const int m = 2 * lrc.n;
    d.coupling = Eigen::MatrixXd::Zero(2 * m, 2);
    d.coupling.col(0).head(m).setOnes();
    d.coupling.col(1).tail(m).setOnes();
    return d;
}

/// LRC bank driving isolated memristor pairs: for every unordered pair
/// (i, j) of the M = 2N surface trajectories, four devices are driven by
/// +(x_i + x_j), -(x_i + x_j), +(x_i - x_j), -(x_i - x_j).
inline DeepReservoir build_lrc_to_mem(const LrcStageConfig& lrc, const MemristorParams& params) {
    DeepReservoir d;
    d.kind = DeepReservoir::Kind::LrcToMemristor;
    d.surface_bank = design_bank(lrc.gamma, lrc.delta_omega, lrc.n);
    const int m = 2 * lrc.n;
    const int devices = 2 * m * (m - 1);
    d.deep_devices = make_isolated(devices, params, Eigen::VectorXd::Ones(devices));
    d.coupling = Eigen::MatrixXd::Zero(devices, m);
    int row = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            d.coupling(row, i) = 1.0;
            d.coupling(row, j) = 1.0;  // +(x_i + x_j)
            ++row;
            d.coupling(row, i) = -1.0;
            d.coupling(row, j) = -1.0;  // -(x_i + x_j)
            ++row;
            d.coupling(row, i) = 1.0;
            d.coupling(row, j) = -1.0;  // +(x_i - x_j)
            ++row;
            d.coupling(row, i) = -1.0;
            d.coupling(row, j) = 1.0;  // -(x_i - x_j)
            ++row;
        }
    }
    return d;
}

/// Simulate surface on u, form the deep sources per sample, simulate the
/// deep layer, and concatenate all channels (surface first).
inline Trajectory simulate_deep(const DeepReservoir& d, const Trajectory& u,
                                const MemristorSimOptions& mem_opts = {}) {
    if (u.channels() != 1) throw ArgumentError("simulate_deep: expected a single-channel input");

    if (d.kind == DeepReservoir::Kind::MemristorToLrc) {
        const Trajectory surface = simulate_network(d.surface_pair, u, mem_opts);
        // each pair channel drives its own copy of the bank
        Trajectory drive_p(u.grid, 1), drive_m(u.grid, 1);
        drive_p.values = surface.values.col(0);
        drive_m.values = surface.values.col(1);
        const Trajectory deep_p = simulate_exact(d.deep_bank, drive_p);
        const Trajectory deep_m = simulate_exact(d.deep_bank, drive_m);
        Trajectory out = Trajectory::concat({&surface, &deep_p, &deep_m});
        out.seed = u.seed;
        out.has_seed = u.has_seed;
        return out;
    }

    const Trajectory surface = simulate_exact(d.surface_bank, u);
    Trajectory deep_drive(u.grid, d.deep_devices.n_devices());
    deep_drive.values.noalias() = surface.values * d.coupling.transpose();
    const Trajectory deep = simulate_network_drive(d.deep_devices, deep_drive, mem_opts);
    Trajectory out = Trajectory::concat({&surface, &deep});
    out.seed = u.seed;
    out.has_seed = u.has_seed;
    return out;
}

}  // namespace rescomp
