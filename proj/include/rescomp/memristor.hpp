#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "rescomp/graph.hpp"
#include "rescomp/time_grid.hpp"

namespace rescomp {

/// Device parameters of the linear-current memristor model with decay:
///   R(eta) = R_off (1 - chi eta),  chi = (R_off - R_on) / R_off,
///   eta'   = -alpha eta + I(t) / beta,   eta clipped to [0, 1].
struct MemristorParams {
    double alpha = 3.0;  // state decay rate, 1/s
    double beta = 3.0;   // activation current scale
    double chi = 0.8;    // relative resistance swing, in [0, 1)
    double r_off = 1.0;
    double r_on = 0.2;

    MemristorParams() = default;
    MemristorParams(double alpha_, double beta_, double chi_)
        : alpha(alpha_), beta(beta_), chi(chi_), r_off(1.0), r_on(1.0 - chi_) {}

    void validate() const {
        if (!(alpha > 0.0)) throw ArgumentError("MemristorParams: alpha must be > 0");
        if (!(beta > 0.0)) throw ArgumentError("MemristorParams: beta must be > 0");
        if (!(chi >= 0.0 && chi < 1.0)) throw ArgumentError("MemristorParams: chi must be in [0,1)");
        if (!(r_off >= r_on)) throw ArgumentError("MemristorParams: need R_off >= R_on");
        if (std::abs(chi - (r_off - r_on) / r_off) > 1e-12)
            throw ArgumentError("MemristorParams: chi inconsistent with R_off, R_on");
    }
};

/// A collection of memristor edges: either k isolated devices (each closed
/// through its own generator, Omega = I) or the edges of a circuit graph.
/// drive_weights maps the scalar input to per-edge source voltages.
struct MemristorNetwork {
    std::optional<CircuitGraph> graph;  // nullopt: isolated devices
    CycleProjector omega;
    MemristorParams params;
    Eigen::VectorXd drive_weights;

    [[nodiscard]] int n_devices() const { return static_cast<int>(omega.size()); }

    void validate() const {
        params.validate();
        if (omega.size() < 1) throw ArgumentError("MemristorNetwork: empty projector");
        if (drive_weights.size() != omega.size())
            throw ArgumentError("MemristorNetwork: drive weight length != edge count");
        if (graph && graph->n_edges() != omega.size())
            throw ArgumentError("MemristorNetwork: projector size != graph edge count");
    }
};

inline MemristorNetwork make_isolated(int devices, const MemristorParams& params,
                                      const Eigen::VectorXd& weights) {
    if (devices < 1) throw ArgumentError("make_isolated: need at least one device");
    if (weights.size() != devices) throw ArgumentError("make_isolated: weight length mismatch");
    MemristorNetwork net;
    net.omega = CycleProjector::identity(devices);
    net.params = params;
    net.drive_weights = weights;
    net.validate();
    return net;
}

/// Two isolated devices driven with opposite polarity (+u, -u).  Their sum
/// cancels odd orders of the drive, isolating the quadratic response.
inline MemristorNetwork make_opposed_pair(const MemristorParams& params) {
    Eigen::VectorXd w(2);
    w << 1.0, -1.0;
    return make_isolated(2, params, w);
}

struct LatticeWeightSpec {
    int n_positive = 0;  // evenly spaced on [0.1, 1], assigned first in edge order
    int n_negative = 0;  // evenly spaced on [-1, -0.1]
};

/// Triangular-lattice network with generator amplitudes spread evenly over
/// [-1, -0.1] u [0.1, 1].
inline MemristorNetwork make_lattice_network(int rows, int cols, const MemristorParams& params,
                                             const LatticeWeightSpec& spec) {
    MemristorNetwork net;
    net.graph = triangular_lattice(rows, cols);
    const int e = net.graph->n_edges();
    if (spec.n_positive + spec.n_negative != e)
        throw ArgumentError("make_lattice_network: weight counts must sum to the edge count");
    net.omega = cycle_projector(*net.graph);
    net.params = params;
    net.drive_weights.resize(e);
    if (spec.n_positive > 0)
        net.drive_weights.head(spec.n_positive) =
            Eigen::VectorXd::LinSpaced(spec.n_positive, 0.1, 1.0);
    if (spec.n_negative > 0)
        net.drive_weights.tail(spec.n_negative) =
            Eigen::VectorXd::LinSpaced(spec.n_negative, -1.0, -0.1);
    net.validate();
    return net;
}

struct MemristorSimOptions {
    double dt_internal = 0.02;
    Eigen::VectorXd eta0;  // empty: all devices start at 0
    enum class Solver { Auto, DenseLU, Nodal } solver = Solver::Auto;
};

namespace detail {

// Per-step linear map y = (I - chi Omega H)^-1 Omega s.
//
// For isolated edges this is elementwise.  For graph edges it reduces to a
// nodal system: with edge conductances D = diag(1/(1 - chi eta)), solve
// (A D A^T) p = A D s on non-ground nodes, then
//   y = D (s - chi H A^T p) - A^T p.
// The sparse Cholesky pattern is fixed, so only numeric refactorization
// happens per step.  A dense-LU route over the stored projector is kept for
// cross-checking.
class NetworkSolver {
public:
    NetworkSolver(const MemristorNetwork& net, MemristorSimOptions::Solver mode)
        : net_(net), chi_(net.params.chi) {
        const int e = net.n_devices();
        dense_ = (mode == MemristorSimOptions::Solver::DenseLU);
        if (!net_.graph || dense_) {
            loop_edges_.resize(static_cast<std::size_t>(e));
            for (int i = 0; i < e; ++i) loop_edges_[static_cast<std::size_t>(i)] = i;
            if (!net_.graph) elementwise_ = true;
            return;
        }

        const CircuitGraph& g = *net_.graph;
        const auto label = g.components();
        std::vector<int> edges_per_comp(static_cast<std::size_t>(g.n_components()), 0);
        for (const auto& [a, b] : g.edges)
            edges_per_comp[static_cast<std::size_t>(label[static_cast<std::size_t>(a)])]++;

        // single-edge components close through their generator: elementwise
        for (int i = 0; i < e; ++i) {
            const int comp = label[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(i)].first)];
            if (edges_per_comp[static_cast<std::size_t>(comp)] == 1)
                loop_edges_.push_back(i);
            else
                graph_edges_.push_back(i);
        }
        if (graph_edges_.empty()) {
            elementwise_ = true;
            return;
        }

        // ground the first node of every multi-edge component
        std::vector<int> grounded(static_cast<std::size_t>(g.n_components()), -1);
        node_row_.assign(static_cast<std::size_t>(g.n_nodes), -1);
        int rows = 0;
        for (int v = 0; v < g.n_nodes; ++v) {
            const int comp = label[static_cast<std::size_t>(v)];
            if (edges_per_comp[static_cast<std::size_t>(comp)] <= 1) continue;
            if (grounded[static_cast<std::size_t>(comp)] < 0) {
                grounded[static_cast<std::size_t>(comp)] = v;
                continue;
            }
            node_row_[static_cast<std::size_t>(v)] = rows++;
        }
        n_rows_ = rows;

        std::vector<Eigen::Triplet<double>> trips;
        for (int i : graph_edges_) {
            const auto [a, b] = g.edges[static_cast<std::size_t>(i)];
            const int ra = node_row_[static_cast<std::size_t>(a)];
            const int rb = node_row_[static_cast<std::size_t>(b)];
            if (ra >= 0) trips.emplace_back(ra, ra, 1.0);
            if (rb >= 0) trips.emplace_back(rb, rb, 1.0);
            if (ra >= 0 && rb >= 0) {
                trips.emplace_back(ra, rb, -1.0);
                trips.emplace_back(rb, ra, -1.0);
            }
        }
        laplacian_.resize(n_rows_, n_rows_);
        laplacian_.setFromTriplets(trips.begin(), trips.end());
        laplacian_.makeCompressed();
        llt_.analyzePattern(laplacian_);

        // direct offsets into the CSC value array for fast reassembly
        for (int i : graph_edges_) {
            const auto [a, b] = g.edges[static_cast<std::size_t>(i)];
            EdgeSlots s;
            s.aa = slot(node_row_[static_cast<std::size_t>(a)], node_row_[static_cast<std::size_t>(a)]);
            s.bb = slot(node_row_[static_cast<std::size_t>(b)], node_row_[static_cast<std::size_t>(b)]);
            s.ab = slot(node_row_[static_cast<std::size_t>(a)], node_row_[static_cast<std::size_t>(b)]);
            s.ba = slot(node_row_[static_cast<std::size_t>(b)], node_row_[static_cast<std::size_t>(a)]);
            slots_.push_back(s);
        }
        rhs_.resize(n_rows_);
        potential_.resize(n_rows_);
    }

    void apply(const Eigen::VectorXd& eta, const Eigen::VectorXd& s, Eigen::VectorXd& y,
               std::int64_t step_index) {
        if (dense_) {
            apply_dense(eta, s, y, step_index);
            return;
        }
        for (int i : loop_edges_) y(i) = s(i) / (1.0 - chi_ * eta(i));
        if (elementwise_) return;

        const CircuitGraph& g = *net_.graph;
        std::fill(laplacian_.valuePtr(), laplacian_.valuePtr() + laplacian_.nonZeros(), 0.0);
        rhs_.setZero();
        for (std::size_t n = 0; n < graph_edges_.size(); ++n) {
            const int i = graph_edges_[n];
            const double d = 1.0 / (1.0 - chi_ * eta(i));
            const EdgeSlots& sl = slots_[n];
            if (sl.aa >= 0) laplacian_.valuePtr()[sl.aa] += d;
            if (sl.bb >= 0) laplacian_.valuePtr()[sl.bb] += d;
            if (sl.ab >= 0) laplacian_.valuePtr()[sl.ab] -= d;
            if (sl.ba >= 0) laplacian_.valuePtr()[sl.ba] -= d;
            const auto [a, b] = g.edges[static_cast<std::size_t>(i)];
            const double ds = d * s(i);
            if (node_row_[static_cast<std::size_t>(a)] >= 0) rhs_(node_row_[static_cast<std::size_t>(a)]) += ds;
            if (node_row_[static_cast<std::size_t>(b)] >= 0) rhs_(node_row_[static_cast<std::size_t>(b)]) -= ds;
        }
        llt_.factorize(laplacian_);
        if (llt_.info() != Eigen::Success)
            throw NumericalError(step_message("nodal factorization failed", step_index));
        potential_ = llt_.solve(rhs_);

        for (int i : graph_edges_) {
            const auto [a, b] = g.edges[static_cast<std::size_t>(i)];
            const int ra = node_row_[static_cast<std::size_t>(a)];
            const int rb = node_row_[static_cast<std::size_t>(b)];
            const double drop = (ra >= 0 ? potential_(ra) : 0.0) - (rb >= 0 ? potential_(rb) : 0.0);
            const double w = (s(i) - chi_ * eta(i) * drop) / (1.0 - chi_ * eta(i));
            y(i) = w - drop;
        }
        if (!y.allFinite()) throw NumericalError(step_message("non-finite solve", step_index));
    }

private:
    struct EdgeSlots {
        Eigen::Index aa = -1, bb = -1, ab = -1, ba = -1;
    };

    void apply_dense(const Eigen::VectorXd& eta, const Eigen::VectorXd& s, Eigen::VectorXd& y,
                     std::int64_t step_index) {
        const Eigen::MatrixXd& omega = net_.omega.matrix;
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(omega.rows(), omega.cols()) -
                            chi_ * (omega * eta.asDiagonal());
        y = m.partialPivLu().solve(omega * s);
        if (!y.allFinite()) throw NumericalError(step_message("dense solve failed", step_index));
    }

    [[nodiscard]] static std::string step_message(const char* what, std::int64_t step) {
        std::ostringstream msg;
        msg << "simulate_network: " << what << " at step " << step;
        return msg.str();
    }

    Eigen::Index slot(int row, int col) const {
        if (row < 0 || col < 0) return -1;
        for (Eigen::Index p = laplacian_.outerIndexPtr()[col]; p < laplacian_.outerIndexPtr()[col + 1]; ++p)
            if (laplacian_.innerIndexPtr()[p] == row) return p;
        throw NumericalError("NetworkSolver: missing pattern entry");
    }

    const MemristorNetwork& net_;
    double chi_;
    bool dense_ = false;
    bool elementwise_ = false;
    std::vector<int> loop_edges_, graph_edges_;
    std::vector<int> node_row_;
    int n_rows_ = 0;
    Eigen::SparseMatrix<double> laplacian_;
    std::vector<EdgeSlots> slots_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
    Eigen::VectorXd rhs_, potential_;
};

// Linear interpolation of a trajectory column at an off-grid time expressed
// in units of the source grid spacing.
inline double lerp_sample(const Eigen::MatrixXd& v, Eigen::Index col, double x,
                          std::int64_t n) {
    auto k = static_cast<std::int64_t>(x);
    if (k >= n - 1) return v(n - 1, col);
    const double frac = x - static_cast<double>(k);
    return (1.0 - frac) * v(k, col) + frac * v(k + 1, col);
}

}  // namespace detail

/// Forward-Euler integration of the network equation of motion
///   eta' = -alpha eta + (1/beta) (I - chi Omega H)^-1 Omega s(t),
/// with H = diag(eta) and hard clipping of eta to [0, 1] after every step.
/// `drive` has one channel per edge (source voltages); it is linearly
/// interpolated onto the internal grid and the state is resampled back onto
/// the drive grid for output.
inline Trajectory simulate_network_drive(const MemristorNetwork& net, const Trajectory& drive,
                                         const MemristorSimOptions& opts = {}) {
    net.validate();
    const int e = net.n_devices();
    if (drive.channels() != e)
        throw ArgumentError("simulate_network_drive: drive channels != edge count");
    if (!(opts.dt_internal > 0.0))
        throw ArgumentError("simulate_network_drive: dt_internal must be > 0");
    drive.check_finite("simulate_network_drive");

    Eigen::VectorXd eta = opts.eta0.size() ? opts.eta0 : Eigen::VectorXd::Zero(e);
    if (eta.size() != e) throw ArgumentError("simulate_network_drive: eta0 length mismatch");
    if ((eta.array() < 0.0).any() || (eta.array() > 1.0).any())
        throw ArgumentError("simulate_network_drive: eta0 outside [0, 1]");

    auto mode = opts.solver;
    if (mode == MemristorSimOptions::Solver::Auto)
        mode = net.graph ? MemristorSimOptions::Solver::Nodal : MemristorSimOptions::Solver::DenseLU;
    // isolated networks never need a matrix solve
    detail::NetworkSolver solver(net, net.graph ? mode : MemristorSimOptions::Solver::Nodal);

    const double dts = drive.grid.dt;
    const double dti = opts.dt_internal;
    const std::int64_t n_out = drive.grid.n_steps;
    const auto n_int = static_cast<std::int64_t>(
                           std::ceil(static_cast<double>(n_out - 1) * dts / dti - 1e-9)) + 1;

    Trajectory out(drive.grid, e);
    out.seed = drive.seed;
    out.has_seed = drive.has_seed;
    out.values.row(0) = eta.transpose();

    const bool isolated_fast = !net.graph;
    const double alpha = net.params.alpha;
    const double inv_beta = 1.0 / net.params.beta;
    const double chi = net.params.chi;

    Eigen::VectorXd s(e), y(e), eta_prev(e);
    std::int64_t next_out = 1;
    for (std::int64_t j = 0; j < n_int && next_out < n_out; ++j) {
        const double x = static_cast<double>(j) * dti / dts;
        for (int c = 0; c < e; ++c) s(c) = detail::lerp_sample(drive.values, c, x, n_out);

        eta_prev = eta;
        if (isolated_fast) {
            y = s.array() / (1.0 - chi * eta.array());
        } else {
            solver.apply(eta, s, y, j);
        }
        eta = eta + dti * (-alpha * eta + inv_beta * y);
        eta = eta.cwiseMax(0.0).cwiseMin(1.0);

        const double t_new = static_cast<double>(j + 1) * dti;
        while (next_out < n_out && static_cast<double>(next_out) * dts <= t_new + 1e-12) {
            const double frac = std::clamp(
                (static_cast<double>(next_out) * dts - static_cast<double>(j) * dti) / dti, 0.0, 1.0);
            out.values.row(next_out) = ((1.0 - frac) * eta_prev + frac * eta).transpose();
            ++next_out;
        }
    }
    return out;
}

/// Network driven by the scalar input through per-edge weights, s = v u(t).
inline Trajectory simulate_network(const MemristorNetwork& net, const Trajectory& u,
                                   const MemristorSimOptions& opts = {}) {
    if (u.channels() != 1) throw ArgumentError("simulate_network: expected a single-channel input");
    Trajectory drive(u.grid, net.n_devices());
    drive.seed = u.seed;
    drive.has_seed = u.has_seed;
    drive.values = u.values.col(0) * net.drive_weights.transpose();
    return simulate_network_drive(net, drive, opts);
}

/// Truncated Volterra-series response of one isolated device:
///   order 1:  (1/beta) int_0^t exp(-alpha s) v u(t-s) ds
///   order 2:  adds (chi/beta^2) int int_{s1<s2} exp(-alpha s2)
///             v u(t-s1) v u(t-s2) ds1 ds2.
/// The nested double integral collapses to a cascade of two first-order
/// exponential convolutions; both are evaluated in closed form with the
/// integrand linear between samples, so the only truncation is the series
/// order itself.  Valid as an oracle while eta stays inside (0, 1).
inline Trajectory volterra_oracle(const MemristorParams& params, const Trajectory& u, int order,
                                  double drive_weight = 1.0) {
    params.validate();
    if (u.channels() != 1) throw ArgumentError("volterra_oracle: expected a single-channel input");
    if (order != 1 && order != 2) throw ArgumentError("volterra_oracle: order must be 1 or 2");

    const double dt = u.grid.dt;
    const double alpha = params.alpha;
    const std::int64_t n = u.grid.n_steps;

    const auto exp_filter = [&](const Eigen::VectorXd& x) {
        // running value of int_0^t exp(-alpha s) x(t - s) ds
        const double step = std::exp(-alpha * dt);
        const double em1 = step - 1.0;
        const double lambda = -alpha;
        const double c1 = em1 / (lambda * lambda * dt) - 1.0 / lambda;
        const double c0 = em1 / lambda - c1;
        Eigen::VectorXd out(n);
        double f = 0.0;
        out(0) = 0.0;
        for (std::int64_t k = 0; k + 1 < n; ++k) {
            f = step * f + c0 * x(k) + c1 * x(k + 1);
            out(k + 1) = f;
        }
        return out;
    };

    const Eigen::VectorXd s = drive_weight * u.values.col(0);
    const Eigen::VectorXd eta1 = exp_filter(s) / params.beta;
    Trajectory out(u.grid, 1);
    out.seed = u.seed;
    out.has_seed = u.has_seed;
    out.values.col(0) = eta1;
    if (order == 2) {
        const Eigen::VectorXd inner = s.cwiseProduct(eta1);
        out.values.col(0) += (params.chi / params.beta) * exp_filter(inner);
    }
    return out;
}

}  // namespace rescomp
