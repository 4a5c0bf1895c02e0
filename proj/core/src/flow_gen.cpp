#include "sfasim/flow_gen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sfasim::flowgen {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Substream::Substream(std::uint64_t seed, const FlowType& type, std::uint64_t salt) {
    std::uint64_t key = mix64(seed);
    key = mix64(key ^ static_cast<std::uint64_t>(type.route));
    key = mix64(key ^ std::bit_cast<std::uint64_t>(type.size));
    key = mix64(key ^ salt);
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    engine_.seed(seq);
}

double Substream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Substream::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

namespace {

void sort_and_number(std::vector<ArrivalEvent>& events) {
    std::stable_sort(events.begin(), events.end(), [](const ArrivalEvent& a, const ArrivalEvent& b) {
        return a.time != b.time ? a.time < b.time : a.type < b.type;
    });
    for (std::size_t i = 0; i < events.size(); ++i) {
        events[i].uid = i;
    }
}

}  // namespace

ArrivalStream gen_poisson(std::span<const FlowType> types, double horizon, std::uint64_t seed) {
    if (!(horizon > 0)) {
        throw ConfigError("arrival horizon must be positive");
    }
    ArrivalStream stream{horizon, seed, {}};
    for (TypeId t = 0; t < types.size(); ++t) {
        if (types[t].rate < 0) {
            throw ConfigError(fmt::format("flow type {} has a negative rate", t));
        }
        if (types[t].rate == 0) {
            continue;
        }
        Substream rng(seed, types[t]);
        for (double now = rng.exponential(types[t].rate); now < horizon; now += rng.exponential(types[t].rate)) {
            stream.events.push_back({now, t, 0, now, false});
        }
    }
    sort_and_number(stream.events);
    return stream;
}

ArrivalStream regularize(const ArrivalStream& stream, std::span<const FlowType> types,
                         std::span<const double> reg_rates) {
    if (reg_rates.size() != types.size()) {
        throw ConfigError("one regularizer rate is needed per flow type");
    }
    for (TypeId t = 0; t < types.size(); ++t) {
        if (!(reg_rates[t] > types[t].rate)) {
            throw UnstableRegularizer(fmt::format("regularizer rate {} for type {} does not exceed its arrival rate {}",
                                                  reg_rates[t], t, types[t].rate));
        }
    }
    std::vector<std::vector<double>> arrivals(types.size());
    for (const auto& e : stream.events) {
        arrivals.at(e.type).push_back(e.arrived);
    }

    ArrivalStream out{stream.horizon, stream.rng_seed, {}};
    for (TypeId t = 0; t < types.size(); ++t) {
        Substream rng(stream.rng_seed, types[t], 0x5265677531ULL);
        const auto& queue = arrivals[t];
        std::size_t head = 0;
        for (double now = rng.exponential(reg_rates[t]); now < stream.horizon; now += rng.exponential(reg_rates[t])) {
            if (head < queue.size() && queue[head] <= now) {
                out.events.push_back({now, t, 0, queue[head], false});
                ++head;
            } else {
                out.events.push_back({now, t, 0, now, true});
            }
        }
        // Flows still queued at the horizon keep being emitted at Poisson epochs.
        for (double now = stream.horizon; head < queue.size();) {
            now += rng.exponential(reg_rates[t]);
            if (queue[head] <= now) {
                out.events.push_back({now, t, 0, queue[head], false});
                ++head;
            }
        }
    }
    sort_and_number(out.events);
    return out;
}

void write_stream(std::ostream& out, const ArrivalStream& stream, std::span<const FlowType> types) {
    const bool dummies = std::any_of(stream.events.begin(), stream.events.end(), [](const auto& e) { return e.dummy; });
    const bool delayed = std::any_of(stream.events.begin(), stream.events.end(),
                                     [](const auto& e) { return e.arrived != e.time; });
    const bool extended = dummies || delayed;
    fmt::print(out, extended ? "time,route,size,uid,dummy,arrived\n" : "time,route,size,uid\n");
    for (const auto& e : stream.events) {
        const auto& t = types[e.type];
        if (extended) {
            fmt::print(out, "{:.17g},{},{:.17g},{},{},{:.17g}\n", e.time, t.route, t.size, e.uid, e.dummy ? 1 : 0,
                       e.arrived);
        } else {
            fmt::print(out, "{:.17g},{},{:.17g},{}\n", e.time, t.route, t.size, e.uid);
        }
    }
}

ArrivalStream read_stream(std::istream& in, std::span<const FlowType> types, double horizon) {
    ArrivalStream stream{horizon, 0, {}};
    std::string line;
    if (!std::getline(in, line) || line.rfind("time,route,size,uid", 0) != 0) {
        throw ConfigError("arrival stream: missing header line");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cols.push_back(cell);
        }
        if (cols.size() != 4 && cols.size() != 6) {
            throw ConfigError(fmt::format("arrival stream line {}: expected 4 or 6 columns", lineno));
        }
        ArrivalEvent e;
        try {
            e.time = std::stod(cols[0]);
            const auto route = static_cast<RouteId>(std::stoull(cols[1]));
            const double size = std::stod(cols[2]);
            e.uid = std::stoull(cols[3]);
            auto it = std::find_if(types.begin(), types.end(),
                                   [&](const FlowType& t) { return t.route == route && t.size == size; });
            if (it == types.end()) {
                throw ConfigError(fmt::format("arrival stream line {}: no flow type ({}, {})", lineno, route, size));
            }
            e.type = static_cast<TypeId>(it - types.begin());
            e.arrived = e.time;
            if (cols.size() == 6) {
                e.dummy = cols[4] == "1";
                e.arrived = std::stod(cols[5]);
            }
        } catch (const std::logic_error&) {
            throw ConfigError(fmt::format("arrival stream line {}: malformed number", lineno));
        }
        stream.events.push_back(e);
    }
    return stream;
}

}  // namespace sfasim::flowgen
