#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfasim/topology.hpp"

namespace sfasim::config {

struct RouteSpec {
    std::string src;
    std::string dst;
    friend bool operator==(const RouteSpec&, const RouteSpec&) = default;
};

/// Flow type by route index into ExperimentConfig::routes.
struct TypeSpec {
    std::size_t route = 0;
    double size = 1.0;
    double rate = 0.0;
    friend bool operator==(const TypeSpec&, const TypeSpec&) = default;
};

struct Tolerances {
    double mean = 0.05;          // relative, sample means vs closed forms
    double tv = 0.02;
    double cv2 = 0.05;           // absolute band around 1
    double poisson_mean = 0.02;  // relative, inter-departure mean vs 1/lambda
    double dispersion = 0.1;
    double correlation = 0.05;
    double wait_bound = 0.05;    // mean D_W <= bound (1 + wait_bound)
    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

/// Which statistical checks a run adds to its verdict. The bound and
/// invariant checks always run.
struct CheckFlags {
    bool oracles = false;
    bool distribution = false;
    int distribution_cap = 20;
    bool poisson = false;
    friend bool operator==(const CheckFlags&, const CheckFlags&) = default;
};

struct ExperimentConfig {
    std::string name = "experiment";
    topo::TreeSpec topology;
    std::vector<RouteSpec> routes;
    std::vector<TypeSpec> types;
    double c0 = 2.0;
    std::optional<double> epsilon_override;
    double horizon = 1e4;
    std::uint64_t seed = 1;
    double burn_in = 0.2;            // fraction of the horizon
    std::vector<double> sweep;       // load multipliers
    std::vector<double> regularizer; // per-type emission rates; empty = off
    std::string output_dir = "out";
    int sfa_limit = 64;              // largest total occupancy the allocation table may reach
    bool trace = false;              // also write per-hop JSON lines
    Tolerances tolerances;
    CheckFlags checks;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// JSON document. Unknown keys are rejected; missing keys take the defaults above.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Same experiment with every type rate (and regularizer rate) scaled by m.
ExperimentConfig scaled(const ExperimentConfig& cfg, double m);

}  // namespace sfasim::config
