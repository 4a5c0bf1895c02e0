#include "sfasim/bandwidth_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sfasim::nb {

NbEngine::NbEngine(sfa::BandwidthNetworkSpec spec, std::vector<double> class_sizes, int max_total)
    : model_(std::move(spec), max_total), sizes_(std::move(class_sizes)) {
    if (sizes_.size() != model_.spec().num_routes()) {
        throw ConfigError("one flow size is needed per bandwidth-network class");
    }
    state_.active.resize(sizes_.size());
    state_.n.assign(sizes_.size(), 0);
    state_.rates = model_.phi_rate(state_.n);
    occupancy_integral_.assign(sizes_.size(), 0.0);
}

NbEngine NbEngine::for_types(std::span<const FlowType> types, std::span<const topo::Route> routes, int max_total) {
    std::vector<QueueId> used;
    for (const auto& t : types) {
        const auto& path = routes[t.route].queue_path;
        used.insert(used.end(), path.begin(), path.end());
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    std::vector<std::vector<QueueId>> paths;
    std::vector<double> sizes;
    for (const auto& t : types) {
        auto& compact = paths.emplace_back();
        for (QueueId v : routes[t.route].queue_path) {
            compact.push_back(static_cast<QueueId>(std::lower_bound(used.begin(), used.end(), v) - used.begin()));
        }
        sizes.push_back(t.size);
    }
    return NbEngine(sfa::unit_network(used.size(), paths), std::move(sizes), max_total);
}

void NbEngine::advance(double t) {
    const double dt = t - state_.clock;
    if (dt < 0) {
        throw InternalConsistency(fmt::format("N_B clock moving backwards from {} to {}", state_.clock, t));
    }
    if (dt == 0) {
        return;
    }
    accumulate(state_.clock, t);
    for (std::size_t c = 0; c < state_.active.size(); ++c) {
        if (state_.n[c] == 0) {
            continue;
        }
        const double rate = state_.rates.phi[c] / state_.n[c];
        const double tolerance = 1e-9 * std::max(1.0, sizes_[c]) + 16 * std::numeric_limits<double>::epsilon() * t * rate;
        for (auto& flow : state_.active[c]) {
            flow.remaining -= rate * dt;
            flow.served += rate * dt;
            if (flow.remaining < -tolerance) {
                throw InternalConsistency(fmt::format("flow {} overshot its size by {}", flow.uid, -flow.remaining));
            }
        }
    }
    state_.clock = t;
}

std::optional<NbDeparture> NbEngine::next_departure() const {
    std::optional<NbDeparture> best;
    for (std::size_t c = 0; c < state_.active.size(); ++c) {
        if (state_.n[c] == 0) {
            continue;
        }
        const double rate = state_.rates.phi[c] / state_.n[c];
        if (!(rate > 0)) {
            throw InternalConsistency(fmt::format("class {} has {} flows but no bandwidth", c, state_.n[c]));
        }
        for (const auto& flow : state_.active[c]) {
            const double when = state_.clock + std::max(flow.remaining, 0.0) / rate;
            if (!best || when < best->time || (when == best->time && flow.uid < best->flow.uid)) {
                best = NbDeparture{when, flow};
            }
        }
    }
    return best;
}

void NbEngine::arrive(double t, TypeId cls, FlowUid uid, bool dummy) {
    advance(t);
    state_.active.at(cls).push_back(ResidualFlow{uid, cls, sizes_[cls], sizes_[cls], t, 0.0, dummy});
    ++state_.n[cls];
    recompute();
}

NbDeparture NbEngine::depart() {
    auto next = next_departure();
    if (!next) {
        throw InternalConsistency("departure requested from an empty N_B");
    }
    advance(next->time);
    auto& flows = state_.active[next->flow.cls];
    auto it = std::find_if(flows.begin(), flows.end(), [&](const ResidualFlow& f) { return f.uid == next->flow.uid; });
    next->flow = *it;
    next->flow.remaining = 0.0;
    flows.erase(it);
    --state_.n[next->flow.cls];
    recompute();
    return *next;
}

void NbEngine::recompute() {
    state_.rates = model_.phi_rate(state_.n);
    const auto& spec = model_.spec();
    for (std::size_t l = 0; l < spec.num_resources(); ++l) {
        double used = 0.0;
        for (std::size_t c = 0; c < state_.rates.phi.size(); ++c) {
            used += spec.usage[l][c] * state_.rates.phi[c];
        }
        max_utilisation_ = std::max(max_utilisation_, used / spec.capacity[l]);
    }
}

void NbEngine::record_occupancy(double from, double to, bool histogram) {
    recording_ = to > from;
    histogram_on_ = histogram;
    window_from_ = from;
    window_to_ = to;
}

void NbEngine::accumulate(double t0, double t1) {
    if (!recording_) {
        return;
    }
    const double len = std::min(t1, window_to_) - std::max(t0, window_from_);
    if (len <= 0) {
        return;
    }
    for (std::size_t c = 0; c < state_.n.size(); ++c) {
        occupancy_integral_[c] += state_.n[c] * len;
    }
    if (histogram_on_) {
        histogram_[state_.n] += len;
    }
    recorded_time_ += len;
}

std::vector<double> NbEngine::mean_occupancy() const {
    std::vector<double> mean(occupancy_integral_.size(), 0.0);
    if (recorded_time_ > 0) {
        for (std::size_t c = 0; c < mean.size(); ++c) {
            mean[c] = occupancy_integral_[c] / recorded_time_;
        }
    }
    return mean;
}

EmulationResult run_emulation(const flowgen::ArrivalStream& stream, std::span<const FlowType> types,
                              std::span<const topo::Route> routes, std::size_t num_queues,
                              const EmulationOptions& options) {
    const auto profile = topo::compute_loads(num_queues, routes, types);
    if (!topo::is_admissible(profile)) {
        throw StabilityViolation("virtual network refuses to run: some queue has load >= 1");
    }
    auto engine = NbEngine::for_types(types, routes, options.max_total);
    engine.record_occupancy(options.stats_from, options.stats_to, options.histogram);

    EmulationResult result;
    const auto& events = stream.events;
    result.injections.resize(events.size());
    result.departures.reserve(events.size());
    std::size_t next = 0;
    while (true) {
        const auto leaving = engine.next_departure();
        if (next < events.size() && (!leaving || events[next].time < leaving->time)) {
            const auto& e = events[next++];
            if (e.uid >= result.injections.size()) {
                throw ConfigError("arrival stream uids must be dense and start at 0");
            }
            result.injections[e.uid] = Injection{e.uid, e.type, e.arrived, e.time, 0.0, e.dummy};
            engine.arrive(e.time, e.type, e.uid, e.dummy);
        } else if (leaving) {
            const auto dep = engine.depart();
            result.injections[dep.flow.uid].t_inject = dep.time;
            result.departures.push_back(dep);
        } else {
            break;
        }
        ++result.events;
    }
    result.mean_occupancy = engine.mean_occupancy();
    result.histogram = engine.occupancy_histogram();
    result.max_utilisation = engine.max_utilisation();
    return result;
}

std::vector<double> departure_process(const EmulationResult& result, TypeId cls, double from, double to) {
    std::vector<double> times;
    for (const auto& d : result.departures) {
        if (d.flow.cls == cls && d.time >= from && d.time < to) {
            times.push_back(d.time);
        }
    }
    return times;
}

void write_injections(std::ostream& out, std::span<const Injection> injections) {
    fmt::print(out, "uid,t_arrive,t_inject\n");
    for (const auto& inj : injections) {
        fmt::print(out, "{},{:.17g},{:.17g}\n", inj.uid, inj.t_arrive, inj.t_inject);
    }
}

}  // namespace sfasim::nb
