#include "cli.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace spde;
using namespace spde::cli;

namespace {

const EnvLookup no_env = [](const char*) -> const char* { return nullptr; };

RunSpec parse(std::vector<std::string> args, const EnvLookup& env = no_env) {
    args.insert(args.begin(), "spde-lab");
    return parse_args(std::span<const std::string>(args), env);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("census defaults") {
    const auto s = parse({"census"});
    CHECK(s.command == Subcommand::census);
    CHECK(s.census.subdivisions == 256);
    CHECK(s.census.tau() == 0.03125);
    CHECK(s.census.samples == 100);
    CHECK(s.census.nonlinearities.size() == 4);
    CHECK(s.census.nonlinearities[2].kind() == NonlinearityKind::sine_plus);
    CHECK(s.census.nonlinearities[0].intensity() == 2.5);
    CHECK(s.census.integrators.size() == 4);
    CHECK(s.seed == default_seed);
    CHECK(s.out == "census.csv");
    CHECK_FALSE(s.help.has_value());

    const auto s2 = parse({"census", "--d", "2"});
    CHECK(s2.census.subdivisions == 16);
    CHECK(s2.census.initial.shape() == InitialShape::sine_product_2d);
}

TEST_CASE("convergence defaults") {
    const auto s = parse({"convergence", "--g", "linear", "--levels", "4..12"});
    CHECK(s.convergence.reference_level == 16);
    CHECK(s.convergence.levels == std::vector<int>{4, 5, 6, 7, 8, 9, 10, 11, 12});
    CHECK(s.convergence.horizon == 0.5);
    CHECK(s.convergence.samples == 150);
    REQUIRE(s.convergence_nonlinearities.size() == 1);
    CHECK(s.convergence_nonlinearities[0].kind() == NonlinearityKind::linear);
    CHECK(s.convergence_nonlinearities[0].intensity() == 1.0);

    const auto two = parse({"convergence"});
    CHECK(two.convergence_nonlinearities.size() == 2);

    const auto d2 = parse({"convergence", "--d", "2"});
    CHECK(d2.convergence.reference_level == 14);
    CHECK(d2.convergence.levels.back() == 10);
}

TEST_CASE("mesh-study defaults") {
    const auto s = parse({"mesh-study", "--N", "16,64"});
    CHECK(s.command == Subcommand::mesh_study);
    CHECK(s.mesh.subdivisions == std::vector<int>{16, 64});
    CHECK(s.mesh.base.integrators == std::vector<IntegratorKind>{IntegratorKind::lie_trotter});
    REQUIRE(s.mesh.nonlinearities.size() == 2);
    CHECK(s.mesh.nonlinearities[1].intensity() == 1.5);
    CHECK(parse({"mesh-study"}).mesh.subdivisions == std::vector<int>{16, 64, 256, 1024});
}

TEST_CASE("dyadic steps") {
    CHECK(parse_dyadic_step("2^-5", 2.0) == 6);
    CHECK(parse_dyadic_step("0.0625", 2.0) == 5);
    CHECK(parse_dyadic_step("2^-4", 0.5) == 3);
    CHECK(parse_dyadic_step("2", 2.0) == 0);
    CHECK_THROWS_AS(parse_dyadic_step("0.1", 2.0), UsageError);
    CHECK_THROWS_AS(parse_dyadic_step("0.06", 2.0), UsageError);
    CHECK_THROWS_AS(parse_dyadic_step("2^-40", 2.0), UsageError);
    CHECK_THROWS_AS(parse_dyadic_step("4", 2.0), UsageError);
    CHECK_THROWS_AS(parse_dyadic_step("-0.5", 2.0), UsageError);
    CHECK_THROWS_AS(parse_dyadic_step("abc", 2.0), UsageError);

    const auto s = parse({"census", "--tau", "2^-7"});
    CHECK(s.census.tau() == 0.0078125);
}

TEST_CASE("level lists") {
    CHECK(parse_levels("3..5") == std::vector<int>{3, 4, 5});
    CHECK(parse_levels("4,6,8") == std::vector<int>{4, 6, 8});
    CHECK_THROWS_AS(parse_levels("5..3"), UsageError);
    CHECK_THROWS_AS(parse_levels("x"), UsageError);
}

TEST_CASE("usage errors name the flag") {
    auto message = [](std::vector<std::string> args) {
        try {
            parse(std::move(args));
        } catch (const UsageError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message({"census", "--g", "cubic"}).find("--g") != std::string::npos);
    CHECK(message({"census", "--integrators", "RK4"}).find("--integrators") != std::string::npos);
    CHECK(message({"census", "--levels", "4..6"}).find("--levels") != std::string::npos);
    CHECK(message({"convergence", "--tau", "2^-4"}).find("--tau") != std::string::npos);
    CHECK(message({"convergence", "--levels", "4..16"}).find("--levels") != std::string::npos);
    CHECK(message({"census", "--d", "3"}).find("--d") != std::string::npos);
    CHECK(message({"census", "--samples", "ten"}).find("--samples") != std::string::npos);
    CHECK(message({"census", "--bogus", "1"}).find("--bogus") != std::string::npos);
    CHECK(message({}) != "no error");
    CHECK(message({"census", "--N", "1"}) != "no error");
}

TEST_CASE("seed precedence: flag, config, environment, default") {
    spde::testing::TempDir dir("cli");
    const auto cfg = dir / "run.cfg";
    std::ofstream(cfg) << "# census settings\nseed = 11\nsamples = 7\n";
    const EnvLookup env = [](const char* name) -> const char* {
        return std::string(name) == "SPDE_LAB_SEED" ? "99" : nullptr;
    };
    CHECK(parse({"census"}, env).seed == 99);
    CHECK(parse({"census", "--config", cfg.string()}, env).seed == 11);
    CHECK(parse({"census", "--config", cfg.string(), "--seed", "5"}, env).seed == 5);
    CHECK(parse({"census", "--seed", "5", "--config", cfg.string()}, env).seed == 5);
    CHECK(parse({"census"}).seed == default_seed);

    const auto s = parse({"census", "--config", cfg.string(), "--samples", "3"});
    CHECK(s.census.samples == 3);
    CHECK(s.census.seed == 11);
    CHECK(parse({"census", "--config", cfg.string()}).census.samples == 7);

    const EnvLookup junk = [](const char*) -> const char* { return "x1"; };
    CHECK_THROWS_AS(parse({"census"}, junk), UsageError);
}

TEST_CASE("config file errors") {
    spde::testing::TempDir dir("cli");
    const auto cfg = dir / "bad.cfg";
    std::ofstream(cfg) << "colour = blue\n";
    CHECK_THROWS_AS(parse({"census", "--config", cfg.string()}), UsageError);
    std::ofstream(cfg) << "no equals sign\n";
    CHECK_THROWS_AS(parse({"census", "--config", cfg.string()}), UsageError);
    CHECK_THROWS_AS(parse({"census", "--config", (dir / "absent.cfg").string()}), UsageError);
}

TEST_CASE("help") {
    const auto s = parse({"--help"});
    REQUIRE(s.help.has_value());
    CHECK(s.help->find("census") != std::string::npos);
    CHECK(s.help->find("SPDE_LAB_SEED") != std::string::npos);
    CHECK(parse({"census", "--help"}).help.has_value());
}

TEST_CASE("exit codes") {
    spde::testing::TempDir dir("cli");
    std::ostringstream out, err;

    auto s = parse({"census", "--samples", "3", "--N", "16", "--out", (dir / "c.csv").string()});
    CHECK(run(s, out, err) == 0);
    CHECK(std::filesystem::exists(dir / "c.csv"));
    CHECK(std::filesystem::exists(dir / "c.csv.summary.txt"));
    CHECK(out.str().find("3/3") != std::string::npos);

    const auto bad = (dir / "nowhere" / "c.csv").string();
    s = parse({"census", "--samples", "2", "--N", "16", "--out", bad});
    CHECK(run(s, out, err) == 1);
    CHECK(err.str().find(bad) != std::string::npos);

    CHECK(run(parse({"selftest"}), out, err) == 0);
}

TEST_CASE("same argv reproduces the CSV byte for byte") {
    spde::testing::TempDir dir("cli");
    std::ostringstream sink;
    for (auto [name, jobs] : {std::pair{"a.csv", "1"}, {"b.csv", "2"}}) {
        const auto s = parse({"convergence", "--N", "16", "--samples", "4", "--levels", "2..4", "--ref-level", "7",
                              "--jobs", jobs, "--out", (dir / name).string()});
        REQUIRE(run(s, sink, sink) == 0);
    }
    CHECK(spde::testing::slurp(dir / "a.csv") == spde::testing::slurp(dir / "b.csv"));
}

}
