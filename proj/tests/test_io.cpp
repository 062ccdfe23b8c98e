#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "rescomp/io.hpp"
#include "rescomp/signal.hpp"

using namespace rescomp;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "rescomp_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("binary trajectory round trip is exact", "[io]") {
    SignalConfig cfg;
    cfg.seed = 99;
    cfg.grid = TimeGrid::over(0.0, 50.0, 0.05);
    Trajectory u = generate_input(cfg);
    const Trajectory z = delayed_target(u, 2.0);  // carries a burn-in mask

    const auto path = temp_dir() / "traj.bin";
    write_trajectory_binary(path, z);
    const Trajectory back = read_trajectory_binary(path);

    REQUIRE(back.grid.matches(z.grid));
    REQUIRE(back.values == z.values);
    REQUIRE(back.burn_in == z.burn_in);
    REQUIRE(back.seed == z.seed);
    REQUIRE(back.has_seed == z.has_seed);
}

TEST_CASE("binary reader rejects foreign files", "[io]") {
    const auto path = temp_dir() / "junk.bin";
    write_text_file(path, "definitely not a trajectory");
    REQUIRE_THROWS_AS(read_trajectory_binary(path), IoError);
}

TEST_CASE("csv output carries grid, channels and mask", "[io]") {
    Trajectory traj(TimeGrid{0.0, 0.5, 4}, 2);
    traj.values << 0.0, 4.0, 1.0, 5.0, 2.0, 6.0, 3.0, 7.0;
    traj.flag_burn_in(0);
    traj.seed = 7;
    traj.has_seed = true;

    std::ostringstream out;
    write_trajectory_csv(out, traj);
    const std::string text = out.str();
    REQUIRE(text.find("# seed=7") != std::string::npos);
    REQUIRE(text.find("t,ch0,ch1,burn_in") != std::string::npos);
    REQUIRE(text.find("0,0,4,1") != std::string::npos);   // flagged first sample
    REQUIRE(text.find("1.5,3,7,0") != std::string::npos);  // last sample
}

TEST_CASE("bank and kernel tables are written", "[io]") {
    const LrcBank bank = design_bank(0.12, 0.084, 3);
    const auto bank_path = temp_dir() / "bank.csv";
    write_bank_csv(bank_path, bank);
    const std::string text = read_text_file(bank_path);
    REQUIRE(text.find("n,l,r,c,re_lambda,im_lambda") != std::string::npos);
    REQUIRE(text.find("\n1,1,0.24") != std::string::npos);

    Eigen::VectorXd tau(3), k(3);
    tau << 0.0, 1.0, 2.0;
    k << 0.5, 0.25, 0.125;
    const auto kernel_path = temp_dir() / "kernel.csv";
    write_kernel_csv(kernel_path, tau, k);
    REQUIRE(read_text_file(kernel_path).find("tau,K") != std::string::npos);
    REQUIRE_THROWS_AS(write_kernel_csv(kernel_path, tau, Eigen::VectorXd::Ones(2)), ArgumentError);
}
