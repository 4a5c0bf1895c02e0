// sfasim: command line front end for the simulator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "selftest.hpp"
#include "sfasim/harness.hpp"
#include "sfasim/version.hpp"

namespace {

using namespace sfasim;

// Exit codes: 0 all checks passed, 1 bad input, 2 a run finished but some check failed.
constexpr int exit_bad_input = 1;
constexpr int exit_check_failed = 2;

config::ExperimentConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
    auto cfg = config::load_config(path);
    if (seed) {
        cfg.seed = *seed;
    }
    return cfg;
}

void print_checks(const std::vector<harness::Check>& checks) {
    for (const auto& c : checks) {
        fmt::print("{:<4} {:<28} {}\n", c.passed ? "ok" : "FAIL", c.name, c.detail);
    }
}

int cmd_validate(const config::ExperimentConfig& cfg) {
    const auto rep = harness::validate_config(cfg);
    if (!rep.ok()) {
        for (const auto& i : rep.issues) {
            fmt::print(stderr, "error: {}: {}\n", i.field, i.message);
        }
        return exit_bad_input;
    }
    fmt::print("{}", rep.echo);
    return 0;
}

int cmd_run(config::ExperimentConfig cfg, const std::optional<std::string>& out) {
    const std::filesystem::path dir = out ? *out : cfg.output_dir;
    const auto r = harness::run_experiment(cfg, dir);
    fmt::print("{} flows, epsilon {:.6g}, {} invariant violations\n", r.ledger.flows.size(), r.eps.epsilon,
               r.ledger.violations.size());
    std::ostringstream table;
    metrics::write_summary_text(table, r.stats);
    fmt::print("{}", table.str());
    print_checks(r.checks);
    fmt::print("artifacts in {}\n", dir.string());
    return r.passed() ? 0 : exit_check_failed;
}

int cmd_sweep(const config::ExperimentConfig& cfg, const std::optional<std::string>& out, unsigned jobs) {
    if (cfg.sweep.empty()) {
        fmt::print(stderr, "error: config has no sweep multipliers\n");
        return exit_bad_input;
    }
    const std::filesystem::path dir = out ? *out : cfg.output_dir;
    const auto res = harness::run_sweep(cfg, dir, jobs);
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        const auto& p = res.points[i];
        for (const auto& s : p.stats) {
            fmt::print("point {} x{:<5g} type {} rho {:.3f} mean_D {} bound_D {:.4g}\n", i, p.multiplier, s.type,
                       p.rho[s.route], s.mean_d ? fmt::format("{:.4g}", *s.mean_d) : "NA", s.bound_d);
        }
    }
    print_checks(res.checks);
    return res.passed() ? 0 : exit_check_failed;
}

int cmd_oracle(const config::ExperimentConfig& cfg) {
    const auto rep = harness::validate_config(cfg);
    if (!rep.ok()) {
        return cmd_validate(cfg);
    }
    const auto net = harness::build_network(cfg);
    const auto& eps = *rep.epsilon;
    const auto dw = sfa::expected_flow_delay(net.profile, net.routes);
    const auto dc = ct::ct_delay_oracle(eps, net.profile, net.routes);
    const auto bw = dt::wait_bound(net.profile, net.routes);
    const auto bs = dt::dt_delay_bound(eps, net.profile, net.routes);
    fmt::print("epsilon {:.10g}\n", eps.epsilon);
    fmt::print("{:>4} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "type", "D_W", "N_C sojourn", "bound_DW", "bound_DS",
               "bound_D");
    for (std::size_t t = 0; t < net.types.size(); ++t) {
        fmt::print("{:>4} {:>12.6g} {:>12.6g} {:>12.6g} {:>12.6g} {:>12.6g}\n", t, dw[t], dc[t], bw[t], bs[t],
                   bw[t] + bs[t]);
    }
    return 0;
}

int cmd_selftest(std::uint64_t seed) {
    bool ok = true;
    for (const auto& item : oracle::run_selftest(seed)) {
        fmt::print("{:<4} {:<20} {}\n", item.passed ? "ok" : "FAIL", item.name, item.detail);
        ok = ok && item.passed;
    }
    return ok ? 0 : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sfasim: flow-level congestion control and slotted LCFS-PR scheduling on tree networks"};
    app.set_version_flag("--version", std::string(sfasim::version));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
        if (needs_config) {
            opt->required();
        }
        sub->add_option("--seed", seed, "override the config seed");
    };
    auto* validate = app.add_subcommand("validate", "check a config and print loads and the slot length");
    add_common(validate, true);
    auto* run = app.add_subcommand("run", "run one experiment and write its artifacts");
    add_common(run, true);
    run->add_option("--out", out, "output directory (default: config output_dir)");
    auto* sweep = app.add_subcommand("sweep", "run every load multiplier of the config");
    add_common(sweep, true);
    sweep->add_option("--out", out, "output directory (default: config output_dir)");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    auto* oracle_cmd = app.add_subcommand("oracle", "print closed-form predictions and bounds");
    add_common(oracle_cmd, true);
    auto* selftest = app.add_subcommand("selftest", "compare the allocation code with brute-force enumeration");
    selftest->add_option("--seed", seed, "seed for the random networks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*selftest) {
            return cmd_selftest(seed.value_or(20240601));
        }
        const auto cfg = load(config_path, seed);
        if (*validate) {
            return cmd_validate(cfg);
        }
        if (*run) {
            return cmd_run(cfg, out);
        }
        if (*sweep) {
            return cmd_sweep(cfg, out, jobs);
        }
        return cmd_oracle(cfg);
    } catch (const sfasim::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_bad_input;
    }
}
