#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfasim/harness.hpp"

using namespace sfasim;
namespace fs = std::filesystem;

namespace {

config::ExperimentConfig smoke() { return config::load_config(fs::path(SFASIM_CONFIG_DIR) / "smoke.json"); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("sfasim_harness_test_" + name);
    fs::remove_all(p);
    return p;
}

bool has_issue(const harness::ValidationReport& rep, const std::string& text) {
    for (const auto& i : rep.issues) {
        if (i.message.find(text) != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST(Config, RoundTrip) {
    auto cfg = smoke();
    EXPECT_EQ(config::parse_config(config::serialize_config(cfg)), cfg);
    cfg.epsilon_override = 0.1 + 0.2;
    cfg.sweep = {0.5, 0.8, 0.9};
    cfg.regularizer = {0.45};
    cfg.tolerances.tv = 0.013;
    cfg.checks.poisson = true;
    cfg.seed = 18446744073709551615ull;
    EXPECT_EQ(config::parse_config(config::serialize_config(cfg)), cfg);
}

TEST(Config, RejectsUnknownKeysAndBadJson) {
    EXPECT_THROW(config::parse_config("{\"topology\": {\"nodes\": [\"r\"], \"root\": \"r\"}, \"colour\": 1}"),
                 ConfigError);
    EXPECT_THROW(config::parse_config("{ not json"), ConfigError);
    EXPECT_THROW(config::parse_config("{\"horizon\": 5}"), ConfigError);  // no topology
    EXPECT_THROW(config::parse_config("{\"topology\": {\"nodes\": [\"r\"], \"root\": \"r\"}, \"horizon\": \"x\"}"),
                 ConfigError);
}

TEST(Validate, C0MustExceedOne) {
    auto cfg = smoke();
    cfg.c0 = 1.0;
    const auto rep = harness::validate_config(cfg);
    EXPECT_FALSE(rep.ok());
    EXPECT_TRUE(has_issue(rep, "C0 must exceed 1"));
}

TEST(Validate, OverloadIsInadmissible) {
    auto cfg = smoke();
    cfg.types[0].rate = 1.01;
    const auto rep = harness::validate_config(cfg);
    EXPECT_TRUE(has_issue(rep, "inadmissible"));
    EXPECT_THROW(harness::run_experiment(cfg, std::nullopt), ConfigError);
}

TEST(Validate, SweepPointsAreCheckedUpFront) {
    auto cfg = smoke();
    cfg.sweep = {1.0, 4.0};
    EXPECT_TRUE(has_issue(harness::validate_config(cfg), "multiplier 4"));
    cfg.sweep = {1.0, 2.0};
    EXPECT_TRUE(harness::validate_config(cfg).ok());
}

TEST(Validate, EchoShowsEpsilonAndLoads) {
    const auto rep = harness::validate_config(smoke());
    ASSERT_TRUE(rep.ok());
    // f = 0.3 on one queue: epsilon = min{(1/2)(0.7/0.3), 0.7} = 0.7
    EXPECT_NEAR(rep.epsilon->epsilon, 0.7, 1e-15);
    EXPECT_NE(rep.echo.find("epsilon 0.7"), std::string::npos);
    EXPECT_NE(rep.echo.find("a_up"), std::string::npos);
    EXPECT_NE(rep.echo.find("f_eps"), std::string::npos);
}

TEST(Validate, StructuralErrorsAreCollected) {
    auto cfg = smoke();
    cfg.routes.push_back({"a", "a"});
    EXPECT_FALSE(harness::validate_config(cfg).ok());
    cfg = smoke();
    cfg.types[0].route = 5;
    EXPECT_FALSE(harness::validate_config(cfg).ok());
    cfg = smoke();
    cfg.regularizer = {0.2};
    EXPECT_TRUE(has_issue(harness::validate_config(cfg), "does not exceed"));
    cfg = smoke();
    cfg.burn_in = 1.0;
    cfg.horizon = -1;
    EXPECT_EQ(harness::validate_config(cfg).issues.size(), 2u);
}

TEST(RunExperiment, SmokeWritesArtifacts) {
    const auto dir = scratch("smoke");
    const auto start = std::chrono::steady_clock::now();
    const auto r = harness::run_experiment(smoke(), dir);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(r.ledger.violations.empty());
    for (const char* f : {"ledger.csv", "summary.csv", "summary.txt", "verdict.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    EXPECT_NE(slurp(dir / "verdict.json").find("\"sfasim\": \"0.3.0\""), std::string::npos);
    EXPECT_EQ(slurp(dir / "ledger.csv").rfind("# sfasim-ledger v1 sfasim 0.3.0", 0), 0u);
}

TEST(RunExperiment, SameSeedSameBytes) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    harness::run_experiment(smoke(), a);
    harness::run_experiment(smoke(), b);
    for (const char* f : {"ledger.csv", "summary.csv", "verdict.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    auto other = smoke();
    other.seed = 8;
    const auto c = scratch("det_c");
    harness::run_experiment(other, c);
    EXPECT_NE(slurp(a / "ledger.csv"), slurp(c / "ledger.csv"));
}

TEST(RunExperiment, RegularizedRunDropsDummiesFromStats) {
    const auto cfg = config::load_config(fs::path(SFASIM_CONFIG_DIR) / "regularized.json");
    const auto r = harness::run_experiment(cfg, std::nullopt);
    EXPECT_TRUE(r.ledger.violations.empty());
    std::size_t real = 0, dummies = 0;
    for (const auto& f : r.ledger.flows) {
        (f.dummy ? dummies : real) += 1;
    }
    EXPECT_GT(dummies, 0u);
    EXPECT_LE(r.stats[0].count, real);
    EXPECT_TRUE(r.passed());
}

TEST(RunSweep, ParallelMatchesSerial) {
    auto cfg = smoke();
    cfg.sweep = {0.5, 1.5, 2.5};
    const auto serial_dir = scratch("sweep1");
    const auto parallel_dir = scratch("sweep3");
    const auto s = harness::run_sweep(cfg, serial_dir, 1);
    const auto p = harness::run_sweep(cfg, parallel_dir, 3);
    ASSERT_EQ(s.points.size(), 3u);
    EXPECT_EQ(slurp(serial_dir / "summary.csv"), slurp(parallel_dir / "summary.csv"));
    EXPECT_EQ(slurp(serial_dir / "point_02" / "ledger.csv"), slurp(parallel_dir / "point_02" / "ledger.csv"));
    EXPECT_TRUE(s.passed()) << s.checks.back().detail;
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        EXPECT_GT(*s.points[i].stats[0].mean_d, *s.points[i - 1].stats[0].mean_d);
    }
}

TEST(GrowthTrend, FlagsFlatDelays) {
    harness::SweepPoint lo, hi;
    lo.multiplier = 0.5;
    hi.multiplier = 0.9;
    lo.rho = {0.5};
    hi.rho = {0.9};
    metrics::TypeStats s;
    s.mean_d = 10.0;
    lo.stats = {s};
    s.mean_d = 12.0;
    hi.stats = {s};
    EXPECT_FALSE(harness::growth_trend({lo, hi}).passed);
    hi.stats[0].mean_d = 40.0;
    EXPECT_TRUE(harness::growth_trend({lo, hi}).passed);
}
