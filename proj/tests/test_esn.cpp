#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <set>

#include "rescomp/esn.hpp"
#include "rescomp/signal.hpp"

using namespace rescomp;

namespace {

EsnConfig small_config(std::uint64_t seed) {
    EsnConfig cfg;
    cfg.size = 120;
    cfg.fanout = 10;
    cfg.spectral_radius = 0.95;
    cfg.bias_scale = 0.2;
    cfg.input_scale = 0.1;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("coupling matrix has exact fanout and spectral radius", "[esn]") {
    EsnConfig cfg = small_config(3);
    cfg.size = 780;
    const EsnReservoir res = build_esn(cfg);

    REQUIRE(res.columns.size() == 7800);
    for (int r = 0; r < cfg.size; ++r) {
        std::set<int> cols;
        for (int j = 0; j < cfg.fanout; ++j)
            cols.insert(res.columns[static_cast<std::size_t>(r * cfg.fanout + j)]);
        REQUIRE(cols.size() == 10);  // without replacement
    }

    const Eigen::MatrixXd w = res.dense_coupling();
    REQUIRE((w.array() != 0.0).count() == 7800);
    Eigen::EigenSolver<Eigen::MatrixXd> eig(w, false);
    REQUIRE_THAT(eig.eigenvalues().cwiseAbs().maxCoeff(),
                 Catch::Matchers::WithinAbs(0.95, 1e-6));
}

TEST_CASE("zero bias scale zeroes the bias vector", "[esn]") {
    EsnConfig cfg = small_config(9);
    cfg.bias_scale = 0.0;
    const EsnReservoir res = build_esn(cfg);
    REQUIRE(res.bias.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(res.input_weights.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("construction is deterministic in the seed", "[esn]") {
    const EsnReservoir a = build_esn(small_config(77));
    const EsnReservoir b = build_esn(small_config(77));
    REQUIRE(a.columns == b.columns);
    REQUIRE(a.weights == b.weights);
    REQUIRE(a.bias == b.bias);
    REQUIRE(a.input_weights == b.input_weights);

    const EsnReservoir c = build_esn(small_config(78));
    REQUIRE(a.columns != c.columns);
}

TEST_CASE("config validation", "[esn]") {
    EsnConfig cfg = small_config(1);
    cfg.spectral_radius = 1.0;
    REQUIRE_THROWS_AS(build_esn(cfg), ConfigError);
    cfg = small_config(1);
    cfg.fanout = 200;
    REQUIRE_THROWS_AS(build_esn(cfg), ConfigError);
}

TEST_CASE("origin is a fixed point without bias", "[esn]") {
    EsnConfig cfg = small_config(5);
    cfg.bias_scale = 0.0;
    const EsnReservoir res = build_esn(cfg);
    Trajectory u(TimeGrid::over(0.0, 20.0, 0.05), 1);
    const Trajectory x = simulate_esn(res, u);
    REQUIRE(x.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectories stay inside the tanh invariant box", "[esn]") {
    const EsnReservoir res = build_esn(small_config(6));
    SignalConfig sig;
    sig.seed = 4;
    sig.grid = TimeGrid::over(0.0, 200.0, 0.05);
    Trajectory u = generate_input(sig);
    u.values *= 3.0;
    const Trajectory x = simulate_esn(res, u);
    REQUIRE(x.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("paired runs converge to the same trajectory", "[esn]") {
    const EsnReservoir res = build_esn(small_config(8));
    SignalConfig sig;
    sig.seed = 21;
    sig.grid = TimeGrid::over(0.0, 200.0, 0.05);
    const Trajectory u = generate_input(sig);

    const CounterRng rng(99);
    Eigen::VectorXd x0(res.config.size);
    for (int i = 0; i < res.config.size; ++i)
        x0(i) = rng.uniform_symmetric(static_cast<std::uint64_t>(i));

    const Trajectory a = simulate_esn(res, u);
    const Trajectory b = simulate_esn(res, u, x0);
    const double d0 = (a.values.row(0) - b.values.row(0)).norm();
    REQUIRE(d0 > 1.0);

    const auto distance_at = [&](double t) {
        const std::int64_t k = u.grid.index_of(t);
        return (a.values.row(k) - b.values.row(k)).norm();
    };
    // contraction rate is set by 1 - spectral_radius plus tanh saturation;
    // at rho = 0.95 the gap shrinks by ~3 decades per 50 time units
    REQUIRE(distance_at(50.0) < 1e-2);
    REQUIRE(distance_at(150.0) < 1e-6);
    REQUIRE(distance_at(150.0) < distance_at(50.0));
}
