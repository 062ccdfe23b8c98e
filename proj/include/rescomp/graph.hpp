#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rescomp/errors.hpp"

namespace rescomp {

/// Directed circuit graph.  Each edge carries one device with its own
/// voltage generator in series; orientation is given by (tail, head).
struct CircuitGraph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;

    [[nodiscard]] int n_edges() const { return static_cast<int>(edges.size()); }

    void validate() const {
        if (n_nodes < 1) throw ArgumentError("CircuitGraph: need at least one node");
        if (edges.empty()) throw ArgumentError("CircuitGraph: need at least one edge");
        for (const auto& [a, b] : edges) {
            if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes)
                throw ArgumentError("CircuitGraph: edge endpoint out of range");
            if (a == b) throw ArgumentError("CircuitGraph: self-loops are not allowed");
        }
    }

    /// Connected-component label per node (edges treated as undirected).
    [[nodiscard]] std::vector<int> components() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_nodes));
        for (const auto& [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        std::vector<int> label(static_cast<std::size_t>(n_nodes), -1);
        int next = 0;
        std::vector<int> stack;
        for (int s = 0; s < n_nodes; ++s) {
            if (label[static_cast<std::size_t>(s)] >= 0) continue;
            stack.push_back(s);
            label[static_cast<std::size_t>(s)] = next;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                for (int w : adj[static_cast<std::size_t>(v)]) {
                    if (label[static_cast<std::size_t>(w)] < 0) {
                        label[static_cast<std::size_t>(w)] = next;
                        stack.push_back(w);
                    }
                }
            }
            ++next;
        }
        return label;
    }

    [[nodiscard]] int n_components() const {
        const auto label = components();
        int m = 0;
        for (int l : label) m = std::max(m, l + 1);
        return m;
    }

    /// Node-edge incidence matrix: +1 at the tail, -1 at the head.
    [[nodiscard]] Eigen::MatrixXd incidence() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_nodes, n_edges());
        for (int e = 0; e < n_edges(); ++e) {
            a(edges[static_cast<std::size_t>(e)].first, e) += 1.0;
            a(edges[static_cast<std::size_t>(e)].second, e) -= 1.0;
        }
        return a;
    }
};

/// Triangular lattice on a rows x cols grid of nodes: horizontal, vertical,
/// and one diagonal edge per unit square.  Edge order is deterministic:
/// all horizontals row-major, then all verticals, then all diagonals; every
/// diagonal runs (r, c) -> (r+1, c+1).
inline CircuitGraph triangular_lattice(int rows, int cols) {
    if (rows < 2 || cols < 2) throw ArgumentError("triangular_lattice: rows and cols must be >= 2");
    CircuitGraph g;
    g.n_nodes = rows * cols;
    const auto node = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) g.edges.emplace_back(node(r, c), node(r, c + 1));
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c) g.edges.emplace_back(node(r, c), node(r + 1, c));
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) g.edges.emplace_back(node(r, c), node(r + 1, c + 1));
    return g;
}

/// Orthogonal projector onto the cycle space (current configurations that
/// satisfy Kirchhoff's current law).
struct CycleProjector {
    Eigen::MatrixXd matrix;  // E x E, symmetric, idempotent

    [[nodiscard]] Eigen::Index size() const { return matrix.rows(); }

    [[nodiscard]] static CycleProjector identity(Eigen::Index k) {
        return CycleProjector{Eigen::MatrixXd::Identity(k, k)};
    }
};

/// Compute the cycle projector Omega = I - A^T (A A^T)^+ A with A the
/// node-edge incidence matrix and ^+ the SVD pseudo-inverse (relative
/// singular-value cutoff 1e-12).
///
/// A component consisting of a single edge is a device closed through its
/// own generator: no Kirchhoff constraint applies, and its block is the
/// identity.  Such edges get a zero incidence column, which produces exactly
/// that identity block.
inline CycleProjector cycle_projector(const CircuitGraph& g) {
    g.validate();
    const auto label = g.components();
    std::vector<int> edges_in_component(static_cast<std::size_t>(g.n_components()), 0);
    for (const auto& [a, b] : g.edges)
        edges_in_component[static_cast<std::size_t>(label[static_cast<std::size_t>(a)])]++;

    Eigen::MatrixXd a = g.incidence();
    for (int e = 0; e < g.n_edges(); ++e) {
        const int comp = label[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].first)];
        if (edges_in_component[static_cast<std::size_t>(comp)] == 1) a.col(e).setZero();
    }

    const Eigen::MatrixXd laplacian = a * a.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(laplacian, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-12 * sv(0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);

    // Rank must match n_nodes - n_components for the constrained part;
    // anything else means the incidence is numerically degenerate.
    const auto rank = static_cast<int>((inv.array() > 0.0).count());
    int expected = g.n_nodes - g.n_components();
    for (std::size_t c = 0; c < edges_in_component.size(); ++c)
        if (edges_in_component[c] == 1) expected -= 1;  // their 2-node component dropped out
    if (rank != expected) {
        std::ostringstream msg;
        msg << "cycle_projector: Laplacian rank " << rank << " != expected " << expected
            << "; singular values:";
        for (Eigen::Index i = 0; i < sv.size(); ++i) msg << ' ' << sv(i);
        throw NumericalError(msg.str());
    }

    const Eigen::MatrixXd pinv =
        svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    CycleProjector omega;
    omega.matrix = Eigen::MatrixXd::Identity(g.n_edges(), g.n_edges()) -
                   a.transpose() * pinv * a;
    return omega;
}

/// Edge-list text form: header "nodes=<n>", then one "tail head" line per edge.
inline std::string to_edge_list(const CircuitGraph& g) {
    std::ostringstream out;
    out << "nodes=" << g.n_nodes << '\n';
    for (const auto& [a, b] : g.edges) out << a << ' ' << b << '\n';
    return out.str();
}

inline CircuitGraph from_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header) || header.rfind("nodes=", 0) != 0)
        throw IoError("edge list: missing 'nodes=<n>' header");
    CircuitGraph g;
    try {
        g.n_nodes = std::stoi(header.substr(6));
    } catch (const std::exception&) {
        throw IoError("edge list: bad node count in header");
    }
    int a = 0, b = 0;
    while (in >> a >> b) g.edges.emplace_back(a, b);
    g.validate();
    return g;
}

}  // namespace rescomp
