#include "sfasim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace sfasim::config {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(fmt::format("{}: expected an object", where));
    }
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
        }
    }
}

template <class T>
void get_if(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
    }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    only_keys(doc,
              {"name", "topology", "routes", "types", "c0", "epsilon", "horizon", "seed", "burn_in", "sweep",
               "regularizer", "output_dir", "sfa_limit", "trace", "tolerances", "checks"},
              "config");

    ExperimentConfig cfg;
    get_if(doc, "name", cfg.name, "config");
    if (!doc.contains("topology")) {
        throw ConfigError("config.topology: missing");
    }
    const auto& tj = doc.at("topology");
    only_keys(tj, {"nodes", "parent", "root"}, "topology");
    get_if(tj, "nodes", cfg.topology.nodes, "topology");
    get_if(tj, "parent", cfg.topology.parent, "topology");
    get_if(tj, "root", cfg.topology.root, "topology");

    if (doc.contains("routes")) {
        for (const auto& r : doc.at("routes")) {
            only_keys(r, {"src", "dst"}, "routes[]");
            RouteSpec rs;
            get_if(r, "src", rs.src, "routes[]");
            get_if(r, "dst", rs.dst, "routes[]");
            cfg.routes.push_back(rs);
        }
    }
    if (doc.contains("types")) {
        for (const auto& t : doc.at("types")) {
            only_keys(t, {"route", "size", "rate"}, "types[]");
            TypeSpec ts;
            get_if(t, "route", ts.route, "types[]");
            get_if(t, "size", ts.size, "types[]");
            get_if(t, "rate", ts.rate, "types[]");
            cfg.types.push_back(ts);
        }
    }
    get_if(doc, "c0", cfg.c0, "config");
    if (doc.contains("epsilon") && !doc.at("epsilon").is_null()) {
        double e = 0;
        get_if(doc, "epsilon", e, "config");
        cfg.epsilon_override = e;
    }
    get_if(doc, "horizon", cfg.horizon, "config");
    get_if(doc, "seed", cfg.seed, "config");
    get_if(doc, "burn_in", cfg.burn_in, "config");
    get_if(doc, "sweep", cfg.sweep, "config");
    get_if(doc, "regularizer", cfg.regularizer, "config");
    get_if(doc, "output_dir", cfg.output_dir, "config");
    get_if(doc, "sfa_limit", cfg.sfa_limit, "config");
    get_if(doc, "trace", cfg.trace, "config");
    if (doc.contains("tolerances")) {
        const auto& j = doc.at("tolerances");
        only_keys(j, {"mean", "tv", "cv2", "poisson_mean", "dispersion", "correlation", "wait_bound"}, "tolerances");
        auto& t = cfg.tolerances;
        get_if(j, "mean", t.mean, "tolerances");
        get_if(j, "tv", t.tv, "tolerances");
        get_if(j, "cv2", t.cv2, "tolerances");
        get_if(j, "poisson_mean", t.poisson_mean, "tolerances");
        get_if(j, "dispersion", t.dispersion, "tolerances");
        get_if(j, "correlation", t.correlation, "tolerances");
        get_if(j, "wait_bound", t.wait_bound, "tolerances");
    }
    if (doc.contains("checks")) {
        const auto& j = doc.at("checks");
        only_keys(j, {"oracles", "distribution", "distribution_cap", "poisson"}, "checks");
        get_if(j, "oracles", cfg.checks.oracles, "checks");
        get_if(j, "distribution", cfg.checks.distribution, "checks");
        get_if(j, "distribution_cap", cfg.checks.distribution_cap, "checks");
        get_if(j, "poisson", cfg.checks.poisson, "checks");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config {}", path.string()));
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json doc;
    doc["name"] = cfg.name;
    doc["topology"] = {{"nodes", cfg.topology.nodes}, {"parent", cfg.topology.parent}, {"root", cfg.topology.root}};
    doc["routes"] = json::array();
    for (const auto& r : cfg.routes) {
        doc["routes"].push_back({{"src", r.src}, {"dst", r.dst}});
    }
    doc["types"] = json::array();
    for (const auto& t : cfg.types) {
        doc["types"].push_back({{"route", t.route}, {"size", t.size}, {"rate", t.rate}});
    }
    doc["c0"] = cfg.c0;
    doc["epsilon"] = cfg.epsilon_override ? json(*cfg.epsilon_override) : json(nullptr);
    doc["horizon"] = cfg.horizon;
    doc["seed"] = cfg.seed;
    doc["burn_in"] = cfg.burn_in;
    doc["sweep"] = cfg.sweep;
    doc["regularizer"] = cfg.regularizer;
    doc["output_dir"] = cfg.output_dir;
    doc["sfa_limit"] = cfg.sfa_limit;
    doc["trace"] = cfg.trace;
    const auto& t = cfg.tolerances;
    doc["tolerances"] = {{"mean", t.mean},
                         {"tv", t.tv},
                         {"cv2", t.cv2},
                         {"poisson_mean", t.poisson_mean},
                         {"dispersion", t.dispersion},
                         {"correlation", t.correlation},
                         {"wait_bound", t.wait_bound}};
    doc["checks"] = {{"oracles", cfg.checks.oracles},
                     {"distribution", cfg.checks.distribution},
                     {"distribution_cap", cfg.checks.distribution_cap},
                     {"poisson", cfg.checks.poisson}};
    return doc.dump(2) + "\n";
}

ExperimentConfig scaled(const ExperimentConfig& cfg, double m) {
    ExperimentConfig out = cfg;
    for (auto& t : out.types) {
        t.rate *= m;
    }
    for (auto& r : out.regularizer) {
        r *= m;
    }
    out.sweep.clear();
    return out;
}

}  // namespace sfasim::config
