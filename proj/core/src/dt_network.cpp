#include "sfasim/dt_network.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include "json.hpp"

namespace sfasim::dt {

namespace {

struct Resident {
    FlowUid uid = 0;
    std::size_t hop = 0;
    std::int64_t s_slot = 0;
    std::int64_t ready = 0;  // max(s_slot, a_slot)
    double tau = 0.0;
    std::int64_t sent = 0;
};

struct ServeOrder {  // max-heap: largest (s_slot, tau, uid) on top
    bool operator()(const Resident& a, const Resident& b) const {
        if (a.s_slot != b.s_slot) {
            return a.s_slot < b.s_slot;
        }
        if (a.tau != b.tau) {
            return a.tau < b.tau;
        }
        return a.uid < b.uid;
    }
};

struct ReadyOrder {  // min-heap on ready slot
    bool operator()(const Resident& a, const Resident& b) const {
        if (a.ready != b.ready) {
            return a.ready > b.ready;
        }
        return a.uid > b.uid;
    }
};

struct Node {
    std::priority_queue<Resident, std::vector<Resident>, ReadyOrder> pending;
    std::priority_queue<Resident, std::vector<Resident>, ServeOrder> eligible;
    std::size_t resident() const { return pending.size() + eligible.size(); }
};

}  // namespace

std::string describe(const Violation& v) {
    if (v.kind == ViolationKind::late_arrival) {
        return fmt::format("flow {} hop {}: available at slot {} after its schedule slot {}", v.uid, v.hop, v.actual,
                           v.limit);
    }
    return fmt::format("flow {} hop {}: left at slot {} after ceil(delta) = {}", v.uid, v.hop, v.actual, v.limit);
}

DelayLedger run_dt(const ct::CtResult& ct, std::span<const nb::Injection> injections,
                   std::span<const FlowType> types, const ct::EpsilonConfig& eps,
                   std::size_t num_queues, const DtOptions& options) {
    if (ct.flows.size() != injections.size()) {
        throw InternalConsistency("continuous-time result and injections disagree on the flow count");
    }
    DelayLedger ledger;
    ledger.epsilon = eps.epsilon;
    ledger.flows.resize(injections.size());
    ledger.max_resident_first.assign(num_queues, 0);
    ledger.max_resident_second.assign(num_queues, 0);

    std::vector<QueueId> order = options.node_order;
    if (order.empty()) {
        order.resize(num_queues);
        std::iota(order.begin(), order.end(), QueueId{0});
    } else {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<QueueId> all(num_queues);
        std::iota(all.begin(), all.end(), QueueId{0});
        if (sorted != all) {
            throw ConfigError("node order must be a permutation of the queues");
        }
    }

    auto record = [&](Violation v) {
        if (options.throw_on_violation) {
            throw EmulationInfeasible(describe(v));
        }
        ledger.violations.push_back(v);
    };

    std::vector<FlowUid> by_start(injections.size());
    for (std::size_t i = 0; i < injections.size(); ++i) {
        const auto& inj = injections[i];
        const auto& cf = ct.flows[i];
        auto& fl = ledger.flows[i];
        fl.uid = inj.uid;
        fl.type = inj.type;
        fl.route = types[inj.type].route;
        fl.size = types[inj.type].size;
        fl.dummy = inj.dummy;
        fl.t_arrive = inj.t_arrive;
        fl.t_inject = inj.t_inject;
        fl.hops.resize(cf.hops.size());
        for (std::size_t h = 0; h < cf.hops.size(); ++h) {
            auto& hl = fl.hops[h];
            hl.queue = cf.hops[h].queue;
            hl.tau = ct.to_time(cf.hops[h].tau);
            hl.delta = ct.to_time(cf.hops[h].delta);
            hl.s_slot = ct::slot_ceil(cf.hops[h].tau);
            hl.delta_ceil_slot = ct::slot_ceil(cf.hops[h].delta);
        }
        fl.hops[0].a_slot = ct::slot_ceil(inj.t_inject / eps.epsilon);
        fl.d_w = inj.t_inject - inj.t_arrive;
        fl.d_r = inj.t_nb - inj.t_arrive;
        fl.d_c = ct.to_time(cf.hops.back().delta - cf.hops.front().tau);
        by_start[i] = inj.uid;
    }
    std::sort(by_start.begin(), by_start.end(), [&](FlowUid a, FlowUid b) {
        const auto sa = std::max(ledger.flows[a].hops[0].s_slot, ledger.flows[a].hops[0].a_slot);
        const auto sb = std::max(ledger.flows[b].hops[0].s_slot, ledger.flows[b].hops[0].a_slot);
        return sa != sb ? sa < sb : a < b;
    });

    std::vector<Node> nodes(num_queues);
    auto enter = [&](FlowUid uid, std::size_t hop) {
        auto& hl = ledger.flows[uid].hops[hop];
        if (hl.a_slot > hl.s_slot) {
            record(Violation{ViolationKind::late_arrival, uid, hop, hl.a_slot, hl.s_slot});
        }
        Resident r{uid, hop, hl.s_slot, std::max(hl.s_slot, hl.a_slot), ct.flows[uid].hops[hop].tau, 0};
        nodes[hl.queue].pending.push(r);
    };

    struct Delivery {
        FlowUid uid;
        std::size_t hop;
    };
    std::vector<Delivery> deliveries;
    std::size_t next_injection = 0;
    std::int64_t k = 0;
    if (!by_start.empty()) {
        const auto& h0 = ledger.flows[by_start[0]].hops[0];
        k = std::max(h0.s_slot, h0.a_slot);
    }
    constexpr auto none = std::numeric_limits<std::int64_t>::max();

    while (true) {
        while (next_injection < by_start.size()) {
            const auto& h0 = ledger.flows[by_start[next_injection]].hops[0];
            if (std::max(h0.s_slot, h0.a_slot) > k) {
                break;
            }
            enter(by_start[next_injection], 0);
            ++next_injection;
        }
        for (QueueId q : order) {
            auto& nd = nodes[q];
            while (!nd.pending.empty() && nd.pending.top().ready <= k) {
                nd.eligible.push(nd.pending.top());
                nd.pending.pop();
            }
            auto& peak = k < options.split_slot ? ledger.max_resident_first[q] : ledger.max_resident_second[q];
            peak = std::max(peak, nd.resident());
        }

        // Every node decides from the state at the start of the slot; what it
        // sends shows up downstream only once the slot is over.
        deliveries.clear();
        for (QueueId q : order) {
            auto& nd = nodes[q];
            if (nd.eligible.empty()) {
                continue;
            }
            Resident r = nd.eligible.top();
            nd.eligible.pop();
            ++r.sent;
            if (options.record_transmissions) {
                ledger.transmissions.push_back(Transmission{k, q, r.uid});
            }
            auto& fl = ledger.flows[r.uid];
            if (r.hop + 1 == fl.hops.size()) {
                ++fl.packets_delivered;
            }
            if (r.sent < eps.packets[fl.type]) {
                nd.eligible.push(r);
            } else {
                deliveries.push_back(Delivery{r.uid, r.hop});
            }
        }
        for (const auto& dv : deliveries) {
            auto& fl = ledger.flows[dv.uid];
            auto& hl = fl.hops[dv.hop];
            hl.d_slot = k + 1;
            if (hl.d_slot > hl.delta_ceil_slot) {
                record(Violation{ViolationKind::late_departure, dv.uid, dv.hop, hl.d_slot, hl.delta_ceil_slot});
            }
            if (dv.hop + 1 < fl.hops.size()) {
                fl.hops[dv.hop + 1].a_slot = k + 1;
                enter(dv.uid, dv.hop + 1);
            } else {
                fl.d_s = static_cast<double>(hl.d_slot) * eps.epsilon - fl.t_inject;
                fl.d = fl.d_w + fl.d_s;
            }
        }
        ledger.last_slot = k;

        bool busy = false;
        std::int64_t next = none;
        for (const auto& nd : nodes) {
            busy = busy || !nd.eligible.empty();
            if (!nd.pending.empty()) {
                next = std::min(next, nd.pending.top().ready);
            }
        }
        if (next_injection < by_start.size()) {
            const auto& h0 = ledger.flows[by_start[next_injection]].hops[0];
            next = std::min(next, std::max(h0.s_slot, h0.a_slot));
        }
        if (busy) {
            ++k;
        } else if (next == none) {
            break;
        } else {
            k = std::max(k + 1, next);
        }
    }
    return ledger;
}

std::vector<double> wait_bound(const topo::LoadProfile& profile, std::span<const topo::Route> routes) {
    std::vector<double> out;
    for (std::size_t t = 0; t < profile.types.size(); ++t) {
        const auto& type = profile.types[t];
        const double d = static_cast<double>(routes[type.route].hop_count());
        out.push_back(type.size * d / (1.0 - profile.rho[type.route]));
    }
    return out;
}

std::vector<double> dt_delay_bound(const ct::EpsilonConfig& eps, const topo::LoadProfile& profile,
                                   std::span<const topo::Route> routes) {
    auto out = wait_bound(profile, routes);
    const double factor = eps.c0 / (eps.c0 - 1.0);
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] = factor * (out[t] + static_cast<double>(routes[profile.types[t].route].hop_count()));
    }
    return out;
}

void write_ledger(std::ostream& out, const DelayLedger& ledger, const std::string& tool_version) {
    fmt::print(out, "# {} v{} sfasim {}\n", ledger_format, ledger_version, tool_version);
    out << "uid,route,size,t_arrive,t_inject,D_W,D_S,D\n";
    for (const auto& fl : ledger.flows) {
        if (fl.dummy) {
            continue;
        }
        fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", fl.uid, fl.route, fl.size,
                   fl.t_arrive, fl.t_inject, fl.d_w, fl.d_s, fl.d);
    }
}

void write_hops_jsonl(std::ostream& out, const DelayLedger& ledger) {
    for (const auto& fl : ledger.flows) {
        for (std::size_t h = 0; h < fl.hops.size(); ++h) {
            const auto& hl = fl.hops[h];
            nlohmann::json row = {{"uid", fl.uid},         {"hop", h},
                                  {"queue", hl.queue},     {"dummy", fl.dummy},
                                  {"tau", hl.tau},         {"delta", hl.delta},
                                  {"a_slot", hl.a_slot},   {"s_slot", hl.s_slot},
                                  {"d_slot", hl.d_slot},   {"delta_ceil_slot", hl.delta_ceil_slot}};
            out << row.dump() << '\n';
        }
    }
}

}  // namespace sfasim::dt
