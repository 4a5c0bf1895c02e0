#include "sfasim/ct_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sfasim/event_queue.hpp"

namespace sfasim::ct {

std::int64_t slot_ceil(double u) {
    const double guard = 1e-12 * std::max(1.0, std::abs(u));
    const double below = std::floor(u);
    if (u - below <= guard) {
        return static_cast<std::int64_t>(below);
    }
    return static_cast<std::int64_t>(std::ceil(u));
}

std::int64_t packet_count(double x, double epsilon) {
    if (!(x > 0) || !(epsilon > 0)) {
        throw ConfigError("packetization needs positive size and slot length");
    }
    return std::max<std::int64_t>(1, slot_ceil(x / epsilon));
}

EpsilonConfig choose_epsilon(const topo::LoadProfile& profile, std::span<const topo::Route> routes, double c0,
                             std::optional<double> override_epsilon) {
    if (!(c0 > 1.0)) {
        throw ConfigError("C0 must exceed 1");
    }
    if (!topo::is_admissible(profile)) {
        throw StabilityViolation("arrival rates lie outside the admissible region");
    }
    EpsilonConfig eps;
    eps.c0 = c0;
    if (override_epsilon) {
        if (!(*override_epsilon > 0)) {
            throw ConfigError("epsilon override must be positive");
        }
        eps.epsilon = *override_epsilon;
        eps.overridden = true;
    } else {
        double value = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < profile.f.size(); ++v) {
            if (profile.lambda_sum[v] > 0) {
                value = std::min(value, (1.0 - profile.f[v]) / profile.lambda_sum[v] / c0);
            }
        }
        for (double rho : profile.rho) {
            value = std::min(value, 1.0 - rho);
        }
        eps.epsilon = std::isfinite(value) ? value : 1.0;
    }

    for (const auto& t : profile.types) {
        const auto p = packet_count(t.size, eps.epsilon);
        eps.packets.push_back(p);
        eps.x_eps.push_back(static_cast<double>(p) * eps.epsilon);
    }
    eps.f_eps.assign(profile.f.size(), 0.0);
    for (std::size_t t = 0; t < profile.types.size(); ++t) {
        for (QueueId v : routes[profile.types[t].route].queue_path) {
            eps.f_eps[v] += eps.x_eps[t] * profile.types[t].rate;
        }
    }
    for (std::size_t v = 0; v < eps.f_eps.size(); ++v) {
        if (!(eps.f_eps[v] < 1.0)) {
            throw StabilityViolation(fmt::format("slot length {} overloads queue {} (f_eps = {})", eps.epsilon, v,
                                                 eps.f_eps[v]));
        }
        if (!eps.overridden) {
            const double lhs = 1.0 - eps.f_eps[v];
            const double rhs = (c0 - 1.0) / c0 * (1.0 - profile.f[v]);
            if (lhs < rhs * (1.0 - 1e-12)) {
                throw InternalConsistency(fmt::format("rounded slack {} below {} at queue {}", lhs, rhs, v));
            }
        }
    }
    return eps;
}

std::vector<double> ct_delay_oracle(const EpsilonConfig& eps, const topo::LoadProfile& profile,
                                    std::span<const topo::Route> routes) {
    std::vector<double> delay;
    for (std::size_t t = 0; t < profile.types.size(); ++t) {
        double d = 0.0;
        for (QueueId v : routes[profile.types[t].route].queue_path) {
            d += eps.x_eps[t] / (1.0 - eps.f_eps[v]);
        }
        delay.push_back(d);
    }
    return delay;
}

namespace {

struct CtEvent {
    bool completion = false;
    QueueId queue = 0;
    FlowUid uid = 0;
    std::size_t hop = 0;
    std::uint64_t version = 0;
};

struct Job {
    FlowUid uid = 0;
    std::size_t hop = 0;
    double remaining = 0.0;
};

struct Station {
    std::vector<Job> stack;
    double segment_start = 0.0;
    std::uint64_t version = 0;
    BusyCycle cycle;
};

}  // namespace

CtResult run_ct(std::span<const nb::Injection> injections, std::span<const FlowType> types,
                std::span<const topo::Route> routes, const EpsilonConfig& eps, const CtOptions& options) {
    CtResult result;
    result.epsilon = eps.epsilon;
    result.flows.resize(injections.size());

    QueueId max_queue = 0;
    EventQueue<CtEvent> events;
    for (std::size_t i = 0; i < injections.size(); ++i) {
        const auto& inj = injections[i];
        if (inj.uid != i) {
            throw InternalConsistency("injections must be indexed by uid");
        }
        const auto& route = routes[types[inj.type].route];
        auto& flow = result.flows[i];
        flow.uid = inj.uid;
        flow.type = inj.type;
        flow.dummy = inj.dummy;
        flow.hops.resize(route.queue_path.size());
        for (std::size_t h = 0; h < route.queue_path.size(); ++h) {
            flow.hops[h].queue = route.queue_path[h];
            max_queue = std::max(max_queue, route.queue_path[h]);
        }
        events.push(inj.t_inject / eps.epsilon, CtEvent{false, route.queue_path.front(), inj.uid, 0, 0}, 1 + inj.uid);
    }
    std::vector<Station> stations(injections.empty() ? 0 : max_queue + 1);

    auto schedule_top = [&](Station& st, QueueId q, double now) {
        st.segment_start = now;
        ++st.version;
        events.push(now + st.stack.back().remaining, CtEvent{true, q, st.stack.back().uid, 0, st.version}, 0);
    };
    auto log_segment = [&](QueueId q, FlowUid uid, double from, double to) {
        if (options.record_service && to > from) {
            result.service.push_back(ServiceSegment{q, uid, from, to});
        }
    };

    while (!events.empty()) {
        const double now = events.top().time;
        const CtEvent ev = events.top().payload;
        events.pop();
        auto& st = stations[ev.queue];

        if (!ev.completion) {
            result.flows[ev.uid].hops[ev.hop].tau = now;
            if (!st.stack.empty()) {
                auto& top = st.stack.back();
                log_segment(ev.queue, top.uid, st.segment_start, now);
                top.remaining = std::max(0.0, top.remaining - (now - st.segment_start));
            } else {
                st.cycle = BusyCycle{ev.queue, ev.uid, ev.uid, 0, now, now, 0.0};
            }
            const double work = static_cast<double>(eps.packets[result.flows[ev.uid].type]);
            st.stack.push_back(Job{ev.uid, ev.hop, work});
            st.cycle.work += work;
            ++st.cycle.flows;
            schedule_top(st, ev.queue, now);
            continue;
        }

        if (ev.version != st.version) {
            continue;  // preempted
        }
        const Job done = st.stack.back();
        st.stack.pop_back();
        log_segment(ev.queue, done.uid, st.segment_start, now);
        auto& flow = result.flows[done.uid];
        flow.hops[done.hop].delta = now;
        if (done.hop + 1 < flow.hops.size()) {
            events.push(now, CtEvent{false, flow.hops[done.hop + 1].queue, done.uid, done.hop + 1, 0}, 1 + done.uid);
        }
        if (!st.stack.empty()) {
            schedule_top(st, ev.queue, now);
        } else {
            st.cycle.end = now;
            st.cycle.last_to_leave = done.uid;
            if (options.record_cycles) {
                result.cycles.push_back(st.cycle);
            }
        }
    }
    return result;
}

void write_ct_table(std::ostream& out, const CtResult& result) {
    out << "uid,node,tau,delta\n";
    for (const auto& flow : result.flows) {
        for (const auto& hop : flow.hops) {
            fmt::print(out, "{},{},{:.17g},{:.17g}\n", flow.uid, hop.queue, result.to_time(hop.tau),
                       result.to_time(hop.delta));
        }
    }
}

}  // namespace sfasim::ct
