#include "sfasim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"
#include "sfasim/flow_gen.hpp"
#include "sfasim/version.hpp"

namespace sfasim::harness {

namespace fs = std::filesystem;
using config::ExperimentConfig;

Network build_network(const ExperimentConfig& cfg) {
    Network net{topo::Dag::build(cfg.topology), {}, {}, {}};
    for (std::size_t i = 0; i < cfg.routes.size(); ++i) {
        net.routes.push_back(topo::make_route(net.dag, cfg.routes[i].src, cfg.routes[i].dst, i));
    }
    for (const auto& t : cfg.types) {
        if (t.route >= net.routes.size()) {
            throw ConfigError(fmt::format("type refers to route {} but only {} routes exist", t.route,
                                          net.routes.size()));
        }
        net.types.push_back(FlowType{t.route, t.size, t.rate});
    }
    auto offered = net.types;
    if (cfg.regularizer.size() == offered.size()) {
        for (std::size_t t = 0; t < offered.size(); ++t) {
            offered[t].rate = cfg.regularizer[t];
        }
    }
    net.profile = topo::compute_loads(net.dag.num_queues(), net.routes, offered);
    return net;
}

namespace {

std::vector<double> sweep_multipliers(const ExperimentConfig& cfg) {
    if (cfg.sweep.empty()) {
        return {1.0};
    }
    return cfg.sweep;
}

}  // namespace

ValidationReport validate_config(const ExperimentConfig& cfg) {
    ValidationReport rep;
    auto issue = [&](std::string field, std::string msg) { rep.issues.push_back({std::move(field), std::move(msg)}); };

    if (!(cfg.c0 > 1.0)) {
        issue("c0", "C0 must exceed 1");
    }
    if (!(cfg.horizon > 0)) {
        issue("horizon", "horizon must be positive");
    }
    if (!(cfg.burn_in >= 0 && cfg.burn_in < 1)) {
        issue("burn_in", "burn-in fraction must lie in [0, 1)");
    }
    if (cfg.sfa_limit < 1) {
        issue("sfa_limit", "must be at least 1");
    }
    if (cfg.epsilon_override && !(*cfg.epsilon_override > 0)) {
        issue("epsilon", "slot length must be positive");
    }
    if (cfg.types.empty()) {
        issue("types", "at least one flow type is needed");
    }
    for (std::size_t t = 0; t < cfg.types.size(); ++t) {
        if (!(cfg.types[t].size > 0)) {
            issue(fmt::format("types[{}].size", t), "must be positive");
        }
        if (!(cfg.types[t].rate >= 0)) {
            issue(fmt::format("types[{}].rate", t), "must be non-negative");
        }
    }
    for (double m : cfg.sweep) {
        if (!(m > 0)) {
            issue("sweep", fmt::format("multiplier {} must be positive", m));
        }
    }
    if (!cfg.regularizer.empty() && cfg.regularizer.size() != cfg.types.size()) {
        issue("regularizer", "needs one rate per type");
    }
    if (cfg.checks.distribution_cap < 0) {
        issue("checks.distribution_cap", "must be non-negative");
    }
    if (!rep.ok()) {
        return rep;
    }

    std::optional<Network> net;
    try {
        net = build_network(cfg);
    } catch (const Error& e) {
        issue("topology/routes", e.what());
        return rep;
    }
    for (double m : sweep_multipliers(cfg)) {
        const auto point = config::scaled(cfg, m);
        const auto p = build_network(point).profile;
        for (std::size_t v = 0; v < p.f.size(); ++v) {
            if (!(p.f[v] < 1.0)) {
                issue("types", fmt::format("inadmissible load at multiplier {}: f = {:.6g} at queue {}", m, p.f[v],
                                           net->dag.queue_name(v)));
            }
        }
        for (std::size_t t = 0; t < point.regularizer.size(); ++t) {
            if (!(point.regularizer[t] > point.types[t].rate)) {
                issue(fmt::format("regularizer[{}]", t),
                      fmt::format("rate {} does not exceed the type's arrival rate {} at multiplier {}",
                                  point.regularizer[t], point.types[t].rate, m));
            }
        }
        if (rep.ok()) {
            try {
                (void)ct::choose_epsilon(p, net->routes, cfg.c0, cfg.epsilon_override);
            } catch (const Error& e) {
                issue("epsilon", fmt::format("multiplier {}: {}", m, e.what()));
            }
        }
    }
    if (!rep.ok()) {
        return rep;
    }

    std::ostringstream echo;
    for (double m : sweep_multipliers(cfg)) {
        const auto p = build_network(config::scaled(cfg, m)).profile;
        const auto eps = ct::choose_epsilon(p, net->routes, cfg.c0, cfg.epsilon_override);
        if (!rep.epsilon) {
            rep.epsilon = eps;
            rep.profile = p;
        }
        if (!cfg.sweep.empty()) {
            fmt::print(echo, "multiplier {}\n", m);
        }
        fmt::print(echo, "epsilon {:.10g}{}\n", eps.epsilon, eps.overridden ? " (override)" : "");
        for (std::size_t v = 0; v < p.f.size(); ++v) {
            if (p.f[v] > 0) {
                fmt::print(echo, "queue {:<12} f = {:.6g}  f_eps = {:.6g}\n", net->dag.queue_name(v), p.f[v],
                           eps.f_eps[v]);
            }
        }
        for (std::size_t j = 0; j < net->routes.size(); ++j) {
            std::string path;
            for (QueueId q : net->routes[j].queue_path) {
                path += (path.empty() ? "" : " ") + net->dag.queue_name(q);
            }
            fmt::print(echo, "route {} [{}] rho = {:.6g}\n", j, path, p.rho[j]);
        }
        for (std::size_t t = 0; t < p.types.size(); ++t) {
            fmt::print(echo, "type {} route {} x = {:.6g} lambda = {:.6g} packets = {}\n", t, p.types[t].route,
                       p.types[t].size, p.types[t].rate, eps.packets[t]);
        }
    }
    rep.echo = echo.str();
    return rep;
}

bool RunResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool SweepResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

std::string join_issues(const ValidationReport& rep) {
    std::string out;
    for (const auto& i : rep.issues) {
        out += (out.empty() ? "" : "; ") + i.field + ": " + i.message;
    }
    return out;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

void add_run_checks(RunResult& r, const ExperimentConfig& cfg) {
    const auto& tol = cfg.tolerances;
    const auto& prof = r.net.profile;

    r.checks.push_back({"emulation_invariants", r.ledger.violations.empty(),
                        fmt::format("{} violations", r.ledger.violations.size())});

    bool eps_ok = true;
    for (std::size_t v = 0; v < prof.f.size(); ++v) {
        eps_ok = eps_ok && r.eps.f_eps[v] < 1.0;
        if (!r.eps.overridden) {
            eps_ok = eps_ok && 1.0 - r.eps.f_eps[v] >= (r.eps.c0 - 1.0) / r.eps.c0 * (1.0 - prof.f[v]) * (1 - 1e-12);
        }
    }
    r.checks.push_back({"epsilon_rule", eps_ok, fmt::format("epsilon {:.10g}", r.eps.epsilon)});

    std::size_t short_flows = 0;
    for (const auto& fl : r.ledger.flows) {
        short_flows += fl.packets_delivered != r.eps.packets[fl.type] ? 1 : 0;
    }
    r.checks.push_back({"all_packets_delivered", short_flows == 0, fmt::format("{} incomplete flows", short_flows)});

    for (const auto& s : r.stats) {
        // means net of the regularizer wait, which no bound or oracle covers
        const double dr = s.mean_dr.value_or(0.0);
        const auto net = [dr](const std::optional<double>& m) {
            return m ? std::optional<double>(*m - dr) : std::nullopt;
        };
        const auto mean = [](const std::optional<double>& m) { return m ? fmt::format("{:.6g}", *m) : "NA"; };
        r.checks.push_back({fmt::format("bound_D[{}]", s.type), s.within_bound(),
                            fmt::format("mean {} <= {:.6g}", mean(net(s.mean_d)), s.bound_d)});
        r.checks.push_back({fmt::format("bound_DW[{}]", s.type), s.within_wait_bound(tol.wait_bound),
                            fmt::format("mean {} <= {:.6g}", mean(net(s.mean_dw)), s.bound_dw)});
        if (cfg.checks.oracles) {
            r.checks.push_back({fmt::format("oracle_DW[{}]", s.type),
                                s.mean_dw && within(*s.mean_dw - dr, s.oracle_dw, tol.mean),
                                fmt::format("mean {} vs {:.6g}", mean(net(s.mean_dw)), s.oracle_dw)});
            r.checks.push_back({fmt::format("oracle_DC[{}]", s.type),
                                s.mean_dc && within(*s.mean_dc, s.oracle_ds, tol.mean),
                                fmt::format("mean {} vs {:.6g}", mean(s.mean_dc), s.oracle_ds)});
        }
    }
}

std::vector<double> input_rates(const ExperimentConfig& cfg, const Network& net) {
    std::vector<double> rates;
    for (std::size_t t = 0; t < net.types.size(); ++t) {
        rates.push_back(cfg.regularizer.empty() ? net.types[t].rate : cfg.regularizer[t]);
    }
    return rates;
}

void add_statistical_checks(RunResult& r, const ExperimentConfig& cfg) {
    const auto& tol = cfg.tolerances;
    const double from = cfg.burn_in * cfg.horizon;
    const auto rates = input_rates(cfg, r.net);

    if (cfg.checks.distribution) {
        const auto engine = nb::NbEngine::for_types(r.net.types, r.net.routes, cfg.sfa_limit);
        std::vector<double> alpha;
        for (std::size_t t = 0; t < r.net.types.size(); ++t) {
            alpha.push_back(r.net.types[t].size * rates[t]);
        }
        sfa::StationaryLaw law(engine.spec(), alpha, cfg.sfa_limit);
        r.distribution = metrics::compare_distribution(r.nb.histogram, law, cfg.checks.distribution_cap);
        r.checks.push_back({"occupancy_tv", r.distribution->tv <= tol.tv && !r.distribution->warning,
                            fmt::format("tv {:.5f} (analytic mass {:.4f})", r.distribution->tv,
                                        r.distribution->analytic_mass)});
        const auto expected = sfa::expected_occupancy(engine.spec(), alpha);
        for (std::size_t t = 0; t < expected.size(); ++t) {
            r.checks.push_back({fmt::format("mean_occupancy[{}]", t), within(r.nb.mean_occupancy[t], expected[t], tol.mean),
                                fmt::format("{:.5g} vs {:.5g}", r.nb.mean_occupancy[t], expected[t])});
        }
    }

    if (cfg.checks.poisson) {
        std::vector<std::vector<double>> deps;
        for (std::size_t t = 0; t < r.net.types.size(); ++t) {
            deps.push_back(nb::departure_process(r.nb, t, from, cfg.horizon));
            r.poisson.push_back(metrics::test_poisson(deps.back(), rates[t]));
            const auto& p = r.poisson.back();
            r.checks.push_back({fmt::format("poisson_departures[{}]", t),
                                p.consistent(tol.poisson_mean, tol.cv2, tol.dispersion),
                                fmt::format("n {} mean ratio {:.4f} cv2 {:.4f} dispersion {:.4f}{}", p.samples,
                                            p.mean_ratio, p.cv2, p.dispersion, p.inconclusive ? " inconclusive" : "")});
        }
        const double slowest = *std::min_element(rates.begin(), rates.end());
        for (std::size_t a = 0; a < deps.size(); ++a) {
            for (std::size_t b = a + 1; b < deps.size(); ++b) {
                const double c =
                    metrics::window_count_correlation(deps[a], deps[b], from, cfg.horizon, 10.0 / slowest);
                r.checks.push_back({fmt::format("departure_correlation[{},{}]", a, b),
                                    std::abs(c) <= tol.correlation, fmt::format("r = {:.4f}", c)});
            }
        }
    }
}

nlohmann::json checks_json(const std::vector<Check>& checks) {
    auto arr = nlohmann::json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return arr;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError(fmt::format("cannot write {}", path.string()));
    }
    out << text;
}

void write_run(const RunResult& r, const ExperimentConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "ledger.csv", std::ios::binary);
        dt::write_ledger(out, r.ledger, version);
    }
    {
        std::ofstream out(dir / "summary.csv", std::ios::binary);
        metrics::write_summary_csv(out, r.stats, version);
    }
    {
        std::ofstream out(dir / "summary.txt", std::ios::binary);
        fmt::print(out, "sfasim {}  {}  seed {}  epsilon {:.10g}\n", version, cfg.name, cfg.seed, r.eps.epsilon);
        metrics::write_summary_text(out, r.stats);
    }
    if (cfg.trace) {
        std::ofstream out(dir / "hops.jsonl", std::ios::binary);
        dt::write_hops_jsonl(out, r.ledger);
    }
    nlohmann::json verdict = {{"format", "sfasim-verdict"},
                              {"format_version", 1},
                              {"sfasim", version},
                              {"name", cfg.name},
                              {"seed", cfg.seed},
                              {"epsilon", r.eps.epsilon},
                              {"flows", r.ledger.flows.size()},
                              {"violations", r.ledger.violations.size()},
                              {"passed", r.passed()},
                              {"checks", checks_json(r.checks)}};
    write_text(dir / "verdict.json", verdict.dump(2) + "\n");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& base, const std::optional<fs::path>& out) {
    const auto cfg = config::scaled(base, 1.0);
    const auto rep = validate_config(cfg);
    if (!rep.ok()) {
        throw ConfigError(join_issues(rep));
    }
    RunResult r;
    r.net = build_network(cfg);
    r.eps = *rep.epsilon;

    auto stream = flowgen::gen_poisson(r.net.types, cfg.horizon, cfg.seed);
    if (!cfg.regularizer.empty()) {
        stream = flowgen::regularize(stream, r.net.types, cfg.regularizer);
    }
    nb::EmulationOptions nbo;
    nbo.max_total = cfg.sfa_limit;
    nbo.stats_from = cfg.burn_in * cfg.horizon;
    nbo.stats_to = cfg.horizon;
    nbo.histogram = cfg.checks.distribution;
    r.nb = nb::run_emulation(stream, r.net.types, r.net.routes, r.net.dag.num_queues(), nbo);
    stream = {};

    r.ct = ct::run_ct(r.nb.injections, r.net.types, r.net.routes, r.eps);
    dt::DtOptions dto;
    dto.split_slot = ct::slot_ceil(cfg.horizon / 2 / r.eps.epsilon);
    r.ledger = dt::run_dt(r.ct, r.nb.injections, r.net.types, r.eps, r.net.dag.num_queues(), dto);
    r.stats = metrics::summarize(r.ledger, r.net.profile, r.net.routes, r.eps, cfg.burn_in * cfg.horizon);

    add_run_checks(r, cfg);
    add_statistical_checks(r, cfg);
    if (out) {
        write_run(r, cfg, *out);
    }
    return r;
}

Check growth_trend(const std::vector<SweepPoint>& points) {
    Check c{"mean_D_growth", true, ""};
    if (points.size() < 2) {
        c.detail = "fewer than two sweep points";
        return c;
    }
    std::vector<const SweepPoint*> order;
    for (const auto& p : points) {
        order.push_back(&p);
    }
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->multiplier < b->multiplier; });
    const auto& first = *order.front();
    const auto& last = *order.back();
    for (std::size_t t = 0; t < first.stats.size(); ++t) {
        for (std::size_t i = 1; i < order.size(); ++i) {
            const auto& lo = order[i - 1]->stats[t].mean_d;
            const auto& hi = order[i]->stats[t].mean_d;
            if (!lo || !hi || !(*hi > *lo)) {
                c.passed = false;
                c.detail += fmt::format("type {} not increasing at multiplier {}; ", t, order[i]->multiplier);
            }
        }
        const auto route = first.stats[t].route;
        const double need = 0.5 * (1.0 - first.rho[route]) / (1.0 - last.rho[route]);
        const auto& lo = first.stats[t].mean_d;
        const auto& hi = last.stats[t].mean_d;
        if (lo && hi) {
            const double got = *hi / *lo;
            c.detail += fmt::format("type {} growth {:.3f} (needs >= {:.3f}); ", t, got, need);
            c.passed = c.passed && got >= need;
        }
    }
    return c;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::optional<fs::path>& out, unsigned jobs) {
    const auto rep = validate_config(cfg);
    if (!rep.ok()) {
        throw ConfigError(join_issues(rep));
    }
    const auto multipliers = sweep_multipliers(cfg);
    std::vector<SweepPoint> points(multipliers.size());
    std::vector<std::exception_ptr> errors(multipliers.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < multipliers.size(); i = next++) {
            try {
                const auto point = config::scaled(cfg, multipliers[i]);
                std::optional<fs::path> dir;
                if (out) {
                    dir = *out / fmt::format("point_{:02}", i);
                }
                const auto r = run_experiment(point, dir);
                points[i] = SweepPoint{multipliers[i], r.stats, r.net.profile.rho, r.checks, r.ledger.violations.size()};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(multipliers.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    SweepResult res;
    res.points = std::move(points);
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        const auto& p = res.points[i];
        const bool ok = std::all_of(p.checks.begin(), p.checks.end(), [](const Check& c) { return c.passed; });
        res.checks.push_back({fmt::format("point_{:02}", i), ok, fmt::format("multiplier {}", p.multiplier)});
    }
    res.checks.push_back(growth_trend(res.points));

    if (out) {
        fs::create_directories(*out);
        std::ostringstream csv;
        fmt::print(csv, "# sfasim-sweep v1 sfasim {}\n", version);
        csv << "point,multiplier,type,rho,count,mean_DW,mean_DS,mean_D,bound_D,within_bound\n";
        for (std::size_t i = 0; i < res.points.size(); ++i) {
            const auto& p = res.points[i];
            for (const auto& s : p.stats) {
                const auto cell = [](const std::optional<double>& v) {
                    return v ? fmt::format("{:.10g}", *v) : std::string("NA");
                };
                fmt::print(csv, "{},{:.10g},{},{:.10g},{},{},{},{},{:.10g},{}\n", i, p.multiplier, s.type,
                           p.rho[s.route], s.count, cell(s.mean_dw), cell(s.mean_ds), cell(s.mean_d), s.bound_d,
                           s.within_bound() ? 1 : 0);
            }
        }
        write_text(*out / "summary.csv", csv.str());
        nlohmann::json verdict = {{"format", "sfasim-sweep-verdict"},
                                  {"format_version", 1},
                                  {"sfasim", version},
                                  {"name", cfg.name},
                                  {"seed", cfg.seed},
                                  {"passed", res.passed()},
                                  {"checks", checks_json(res.checks)}};
        write_text(*out / "verdict.json", verdict.dump(2) + "\n");
    }
    return res;
}

}  // namespace sfasim::harness
