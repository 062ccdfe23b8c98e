#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "rescomp/graph.hpp"

using namespace rescomp;

namespace {

void check_projector_invariants(const CircuitGraph& g, const CycleProjector& omega,
                                double expected_trace) {
    const Eigen::MatrixXd& m = omega.matrix;
    REQUIRE((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((m * m - m).norm() < 1e-10);
    REQUIRE_THAT(m.trace(), Catch::Matchers::WithinAbs(expected_trace, 1e-8));

    // eigenvalues sit on {0, 1}
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double v = eig.eigenvalues()(i);
        REQUIRE((std::abs(v) < 1e-8 || std::abs(v - 1.0) < 1e-8));
    }

    // gradients (node potential differences) are annihilated
    const Eigen::MatrixXd a = g.incidence();
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(g.n_nodes, -1.0, 2.0);
    REQUIRE((m * (a.transpose() * p)).cwiseAbs().maxCoeff() < 1e-10);
}

}  // namespace

TEST_CASE("triangular lattice edge counts", "[graph]") {
    REQUIRE(triangular_lattice(5, 5).n_edges() == 56);
    REQUIRE(triangular_lattice(17, 17).n_edges() == 800);
    REQUIRE(triangular_lattice(2, 2).n_edges() == 5);
    REQUIRE(triangular_lattice(3, 4).n_edges() == 3 * 3 + 4 * 2 + 2 * 3);
    REQUIRE_THROWS_AS(triangular_lattice(1, 5), ArgumentError);
    REQUIRE_THROWS_AS(triangular_lattice(5, 1), ArgumentError);
}

TEST_CASE("lattice is connected with deterministic ordering", "[graph]") {
    const CircuitGraph g = triangular_lattice(4, 3);
    REQUIRE(g.n_components() == 1);
    // horizontals first: row 0 starts (0,1), (1,2)
    REQUIRE(g.edges[0] == std::make_pair(0, 1));
    REQUIRE(g.edges[1] == std::make_pair(1, 2));
    // then verticals: (0,3) with 3 columns
    REQUIRE(g.edges[static_cast<std::size_t>(4 * 2)] == std::make_pair(0, 3));
    // diagonals run lower index to upper-right neighbour
    REQUIRE(g.edges.back() == std::make_pair(7, 11));
}

TEST_CASE("single isolated device has the identity projector", "[graph]") {
    CircuitGraph g;
    g.n_nodes = 2;
    g.edges = {{0, 1}};
    const CycleProjector omega = cycle_projector(g);
    REQUIRE(omega.size() == 1);
    REQUIRE_THAT(omega.matrix(0, 0), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("triangle projector is the rank-one cycle average", "[graph]") {
    CircuitGraph g;
    g.n_nodes = 3;
    g.edges = {{0, 1}, {1, 2}, {2, 0}};  // consistently oriented 3-cycle
    const CycleProjector omega = cycle_projector(g);
    // oracle: Omega = c c^T / (c^T c) with cycle vector c = (1,1,1)
    const Eigen::MatrixXd expected = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
    REQUIRE((omega.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
    check_projector_invariants(g, omega, 1.0);
}

TEST_CASE("5x5 lattice projector has rank E - n + 1", "[graph]") {
    const CircuitGraph g = triangular_lattice(5, 5);
    const CycleProjector omega = cycle_projector(g);
    check_projector_invariants(g, omega, 56 - 25 + 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(omega.matrix);
    const auto rank = (eig.eigenvalues().array() > 0.5).count();
    REQUIRE(rank == 32);
}

TEST_CASE("projector invariants hold on mixed sizes", "[graph]") {
    for (auto [rows, cols] : {std::pair{2, 2}, std::pair{3, 5}, std::pair{6, 4}}) {
        const CircuitGraph g = triangular_lattice(rows, cols);
        const double expected = g.n_edges() - g.n_nodes + 1;
        check_projector_invariants(g, cycle_projector(g), expected);
    }
}

TEST_CASE("graph validation rejects malformed graphs", "[graph]") {
    CircuitGraph g;
    g.n_nodes = 3;
    g.edges = {{0, 0}};
    REQUIRE_THROWS_AS(g.validate(), ArgumentError);
    g.edges = {{0, 5}};
    REQUIRE_THROWS_AS(g.validate(), ArgumentError);
    g.edges.clear();
    REQUIRE_THROWS_AS(g.validate(), ArgumentError);
}

TEST_CASE("edge list serialization round trip", "[graph]") {
    const CircuitGraph g = triangular_lattice(3, 3);
    const std::string text = to_edge_list(g);
    REQUIRE(text.rfind("nodes=9", 0) == 0);
    const CircuitGraph back = from_edge_list(text);
    REQUIRE(back.n_nodes == g.n_nodes);
    REQUIRE(back.edges == g.edges);
    REQUIRE_THROWS_AS(from_edge_list("garbage"), IoError);
}
