#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfasim/bandwidth_net.hpp"
#include "sfasim/config.hpp"
#include "sfasim/ct_network.hpp"
#include "sfasim/dt_network.hpp"
#include "sfasim/metrics.hpp"

namespace sfasim::harness {

/// Topology, routes and types resolved from a config.
struct Network {
    topo::Dag dag;
    std::vector<topo::Route> routes;
    std::vector<FlowType> types;  // exogenous arrival rates
    topo::LoadProfile profile;    // load the internal queues see: regularizer rates when one is configured
};

/// Throws ConfigError on the first structural problem.
Network build_network(const config::ExperimentConfig& cfg);

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::optional<ct::EpsilonConfig> epsilon;  // first sweep point, or the base load
    std::optional<topo::LoadProfile> profile;
    std::string echo;  // human-readable loads and slot length

    bool ok() const { return issues.empty(); }
};

/// Checks every field, every sweep point included, and never throws for a bad config.
ValidationReport validate_config(const config::ExperimentConfig& cfg);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    Network net;
    ct::EpsilonConfig eps;
    nb::EmulationResult nb;
    ct::CtResult ct;
    dt::DelayLedger ledger;
    std::vector<metrics::TypeStats> stats;
    std::optional<metrics::DistributionComparison> distribution;
    std::vector<metrics::PoissonReport> poisson;  // per type, N_B departures
    std::vector<Check> checks;

    bool passed() const;
};

/// flow_gen -> (regularizer) -> N_B -> N_C -> N_D -> metrics. Writes
/// ledger.csv, summary.csv, summary.txt and verdict.json into `out` when
/// given. cfg.sweep is ignored: the rates are run as written. Throws ConfigError / StabilityViolation before simulating anything
/// if the config is rejected.
RunResult run_experiment(const config::ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out);

struct SweepPoint {
    double multiplier = 1.0;
    std::vector<metrics::TypeStats> stats;
    std::vector<double> rho;  // per route
    std::vector<Check> checks;
    std::size_t violations = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // in multiplier order of the config
    std::vector<Check> checks;       // per-point verdicts plus the growth trend

    bool passed() const;
};

/// Runs every multiplier of cfg.sweep on up to `jobs` worker threads. Point i
/// writes into out/point_<i>; the sweep summary goes to out itself.
SweepResult run_sweep(const config::ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out,
                      unsigned jobs);

/// mean_D grows with the multiplier for every type and the growth between
/// the lightest and heaviest point is at least half of (1 - rho_min) / (1 - rho_max).
Check growth_trend(const std::vector<SweepPoint>& points);

}  // namespace sfasim::harness
