#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "rescomp/deep.hpp"
#include "rescomp/learn.hpp"
#include "rescomp/signal.hpp"

using namespace rescomp;

namespace {

Trajectory seeded_signal(std::uint64_t seed, double t_end) {
    SignalConfig cfg;
    cfg.seed = seed;
    cfg.grid = TimeGrid::over(0.0, t_end, 0.05);
    return generate_input(cfg);
}

const MemristorParams kDeepParams(3.0, 3.0, 0.8);

}  // namespace

TEST_CASE("channel counts follow the construction formulas", "[deep]") {
    SECTION("pair to LRC: 2 + 4N") {
        const DeepReservoir d =
            build_mem_to_lrc(make_opposed_pair(kDeepParams), LrcStageConfig{0.4, 0.4, 10});
        REQUIRE(d.surface_channels() == 2);
        REQUIRE(d.deep_channels() == 40);
        REQUIRE(d.total_channels() == 42);
        REQUIRE(d.coupling.rows() == 40);
        REQUIRE(d.coupling.cols() == 2);
        // every deep source listens to exactly one surface channel with gain 1
        for (Eigen::Index r = 0; r < 40; ++r) {
            REQUIRE(d.coupling.row(r).sum() == 1.0);
            REQUIRE(d.coupling.row(r).cwiseAbs().sum() == 1.0);
        }
        REQUIRE(d.coupling.col(0).head(20).sum() == 20.0);
        REQUIRE(d.coupling.col(1).tail(20).sum() == 20.0);
    }

    SECTION("LRC to memristors: 2M(M-1) + M") {
        const DeepReservoir d = build_lrc_to_mem(LrcStageConfig{0.4, 0.4, 10}, kDeepParams);
        REQUIRE(d.surface_channels() == 20);
        REQUIRE(d.deep_channels() == 2 * 20 * 19);
        REQUIRE(d.total_channels() == 780);

        const DeepReservoir tiny = build_lrc_to_mem(LrcStageConfig{0.4, 0.4, 1}, kDeepParams);
        REQUIRE(tiny.total_channels() == 6);
    }

    SECTION("pair surface must have two devices") {
        const MemristorNetwork single = make_isolated(1, kDeepParams, Eigen::VectorXd::Ones(1));
        REQUIRE_THROWS_AS(build_mem_to_lrc(single, LrcStageConfig{}), ArgumentError);
    }
}

TEST_CASE("pairwise source set is closed under index swap", "[deep]") {
    const DeepReservoir d = build_lrc_to_mem(LrcStageConfig{0.4, 0.4, 2}, kDeepParams);
    // collect coupling rows as signed sparse patterns
    std::set<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < d.coupling.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(d.coupling.cols()));
        for (Eigen::Index c = 0; c < d.coupling.cols(); ++c) row[static_cast<std::size_t>(c)] = d.coupling(r, c);
        rows.insert(row);
    }
    // swapping i and j maps each difference row to its negation, which must
    // already be present; sums map to themselves
    for (const auto& row : rows) {
        std::vector<double> negated(row.size());
        for (std::size_t c = 0; c < row.size(); ++c) negated[c] = -row[c];
        REQUIRE(rows.count(negated) == 1);
    }
}

TEST_CASE("zero input keeps both layers at rest", "[deep]") {
    Trajectory zero(TimeGrid::over(0.0, 30.0, 0.05), 1);
    for (auto kind : {0, 1}) {
        const DeepReservoir d =
            kind == 0 ? build_mem_to_lrc(make_opposed_pair(kDeepParams), LrcStageConfig{0.4, 0.4, 3})
                      : build_lrc_to_mem(LrcStageConfig{0.4, 0.4, 2}, kDeepParams);
        const Trajectory x = simulate_deep(d, zero);
        REQUIRE(x.values.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("deep simulation equals manual composition", "[deep]") {
    const MemristorParams linear_params(3.0, 3.0, 0.0);  // chi = 0: pure low-pass surface
    const MemristorNetwork pair = make_opposed_pair(linear_params);
    const LrcStageConfig lrc{0.4, 0.4, 4};
    const DeepReservoir d = build_mem_to_lrc(pair, lrc);

    const Trajectory u = seeded_signal(41, 100.0);
    const Trajectory combined = simulate_deep(d, u);

    const Trajectory surface = simulate_network(pair, u);
    Trajectory drive_p(u.grid, 1), drive_m(u.grid, 1);
    drive_p.values = surface.values.col(0);
    drive_m.values = surface.values.col(1);
    const LrcBank bank = design_bank(lrc.gamma, lrc.delta_omega, lrc.n);
    const Trajectory deep_p = simulate_exact(bank, drive_p);
    const Trajectory deep_m = simulate_exact(bank, drive_m);

    REQUIRE((combined.values.leftCols(2) - surface.values).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((combined.values.middleCols(2, 8) - deep_p.values).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((combined.values.rightCols(8) - deep_m.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("deep outputs are causal in the input", "[deep]") {
    const Trajectory u = seeded_signal(42, 60.0);
    const std::int64_t cut = u.grid.index_of(40.0);
    Trajectory truncated = u;
    for (std::int64_t k = cut; k < u.grid.n_steps; ++k) truncated.values(k, 0) = 0.0;

    for (auto kind : {0, 1}) {
        const DeepReservoir d =
            kind == 0 ? build_mem_to_lrc(make_opposed_pair(kDeepParams), LrcStageConfig{0.4, 0.4, 3})
                      : build_lrc_to_mem(LrcStageConfig{0.4, 0.4, 2}, kDeepParams);
        const Trajectory full = simulate_deep(d, u);
        const Trajectory cutrun = simulate_deep(d, truncated);
        REQUIRE((full.values.topRows(cut - 1) - cutrun.values.topRows(cut - 1))
                    .cwiseAbs()
                    .maxCoeff() == 0.0);
    }
}

TEST_CASE("hybrid reservoirs inherit fading memory", "[deep]") {
    const Trajectory u = seeded_signal(43, 150.0);
    const DeepReservoir d =
        build_mem_to_lrc(make_opposed_pair(kDeepParams), LrcStageConfig{0.4, 0.4, 3});

    MemristorSimOptions opts_a, opts_b;
    opts_b.eta0 = Eigen::VectorXd::Constant(2, 0.9);
    const Trajectory a = simulate_deep(d, u, opts_a);
    const Trajectory b = simulate_deep(d, u, opts_b);

    const double d0 = (a.values.row(0) - b.values.row(0)).norm();
    REQUIRE(d0 > 0.1);
    const std::int64_t late = u.grid.index_of(140.0);
    REQUIRE((a.values.row(late) - b.values.row(late)).norm() < 1e-6);
}

TEST_CASE("LRC-fed memristors extend the equal-time quadratic window", "[deep]") {
    const Trajectory u = seeded_signal(44, 2000.0);
    const Window w{100.0, 1900.0};

    const Trajectory x_pair = simulate_network(make_opposed_pair(kDeepParams), u);
    const DeepReservoir d = build_lrc_to_mem(LrcStageConfig{0.4, 0.4, 10}, kDeepParams);
    const Trajectory x_deep = simulate_deep(d, u);

    RidgeOptions opts;
    const RidgeSolver pair_solver(x_pair, w, opts);
    const RidgeSolver deep_solver(x_deep, w, opts);
    for (double tau : {1.0, 2.0, 3.0}) {
        const double m_pair = quadratic_memory_function(pair_solver, u, tau, tau);
        const double m_deep = quadratic_memory_function(deep_solver, u, tau, tau);
        REQUIRE(m_deep > m_pair);
    }
}
