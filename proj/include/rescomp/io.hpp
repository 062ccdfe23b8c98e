#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rescomp/lrc.hpp"
#include "rescomp/time_grid.hpp"

namespace rescomp {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

}  // namespace detail

/// CSV form: "t,ch0,...,chK,burn_in" header, one row per sample.  A "# seed"
/// comment precedes the header when the trajectory records one.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    if (traj.has_seed) out << "# seed=" << traj.seed << '\n';
    out << 't';
    for (Eigen::Index c = 0; c < traj.channels(); ++c) out << ",ch" << c;
    out << ",burn_in\n";
    for (std::int64_t k = 0; k < traj.grid.n_steps; ++k) {
        out << detail::fmt_double(traj.grid.time(k));
        for (Eigen::Index c = 0; c < traj.channels(); ++c)
            out << ',' << detail::fmt_double(traj.values(k, c));
        out << ',' << (traj.flagged(k) ? 1 : 0) << '\n';
    }
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = detail::open_out(path, std::ios::out);
    write_trajectory_csv(out, traj);
}

/// Compact binary form: 8-byte magic, counts, grid, seed, then values
/// column-major as little-endian 64-bit floats, then the burn-in mask.
inline void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = detail::open_out(path, std::ios::out | std::ios::binary);
    const char magic[8] = {'R', 'C', 'T', 'R', 'A', 'J', '0', '1'};
    out.write(magic, 8);
    const std::uint64_t n = static_cast<std::uint64_t>(traj.grid.n_steps);
    const std::uint64_t c = static_cast<std::uint64_t>(traj.channels());
    const std::uint64_t seed = traj.seed;
    const std::uint8_t has_seed = traj.has_seed ? 1 : 0;
    const std::uint8_t has_mask = traj.burn_in.empty() ? 0 : 1;
    const std::uint8_t pad[6] = {};
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&c), 8);
    out.write(reinterpret_cast<const char*>(&traj.grid.t0), 8);
    out.write(reinterpret_cast<const char*>(&traj.grid.dt), 8);
    out.write(reinterpret_cast<const char*>(&seed), 8);
    out.write(reinterpret_cast<const char*>(&has_seed), 1);
    out.write(reinterpret_cast<const char*>(&has_mask), 1);
    out.write(reinterpret_cast<const char*>(pad), 6);
    out.write(reinterpret_cast<const char*>(traj.values.data()),
              static_cast<std::streamsize>(sizeof(double) * n * c));
    if (has_mask)
        out.write(reinterpret_cast<const char*>(traj.burn_in.data()),
                  static_cast<std::streamsize>(traj.burn_in.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

inline Trajectory read_trajectory_binary(const std::filesystem::path& path) {
    auto in = detail::open_in(path, std::ios::in | std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "RCTRAJ01", 8) != 0)
        throw IoError("bad trajectory file magic: " + path.string());
    std::uint64_t n = 0, c = 0, seed = 0;
    double t0 = 0.0, dt = 0.0;
    std::uint8_t has_seed = 0, has_mask = 0, pad[6];
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&c), 8);
    in.read(reinterpret_cast<char*>(&t0), 8);
    in.read(reinterpret_cast<char*>(&dt), 8);
    in.read(reinterpret_cast<char*>(&seed), 8);
    in.read(reinterpret_cast<char*>(&has_seed), 1);
    in.read(reinterpret_cast<char*>(&has_mask), 1);
    in.read(reinterpret_cast<char*>(pad), 6);
    if (!in) throw IoError("truncated trajectory header: " + path.string());

    Trajectory traj(TimeGrid{t0, dt, static_cast<std::int64_t>(n)}, static_cast<Eigen::Index>(c));
    traj.seed = seed;
    traj.has_seed = has_seed != 0;
    in.read(reinterpret_cast<char*>(traj.values.data()),
            static_cast<std::streamsize>(sizeof(double) * n * c));
    if (has_mask) {
        traj.burn_in.resize(n);
        in.read(reinterpret_cast<char*>(traj.burn_in.data()), static_cast<std::streamsize>(n));
    }
    if (!in) throw IoError("truncated trajectory data: " + path.string());
    return traj;
}

/// Bank description: one row per subcircuit with components and eigenvalue.
inline void write_bank_csv(const std::filesystem::path& path, const LrcBank& bank) {
    auto out = detail::open_out(path, std::ios::out);
    out << "n,l,r,c,re_lambda,im_lambda\n";
    for (int i = 0; i < bank.size(); ++i) {
        out << (i + 1) << ',' << detail::fmt_double(bank.inductance(i)) << ','
            << detail::fmt_double(bank.resistance(i)) << ','
            << detail::fmt_double(bank.capacitance(i)) << ','
            << detail::fmt_double(-bank.gamma(i)) << ',' << detail::fmt_double(bank.omega(i))
            << '\n';
    }
}

inline void write_kernel_csv(const std::filesystem::path& path, const Eigen::VectorXd& tau,
                             const Eigen::VectorXd& kernel) {
    if (tau.size() != kernel.size()) throw ArgumentError("write_kernel_csv: length mismatch");
    auto out = detail::open_out(path, std::ios::out);
    out << "tau,K\n";
    for (Eigen::Index i = 0; i < tau.size(); ++i)
        out << detail::fmt_double(tau(i)) << ',' << detail::fmt_double(kernel(i)) << '\n';
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto out = detail::open_out(path, std::ios::out);
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    auto in = detail::open_in(path, std::ios::in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace rescomp
