#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "sfasim/types.hpp"

namespace sfasim::flowgen {

/// One exogenous flow. `time` is when the flow is offered to the congestion
/// controller; `arrived` is when it reached the system (they differ only for
/// regularized streams). Dummy flows carry load but no statistics.
struct ArrivalEvent {
    double time = 0.0;
    TypeId type = 0;
    FlowUid uid = 0;
    double arrived = 0.0;
    bool dummy = false;

    friend bool operator==(const ArrivalEvent&, const ArrivalEvent&) = default;
};

struct ArrivalStream {
    double horizon = 0.0;
    std::uint64_t rng_seed = 0;
    std::vector<ArrivalEvent> events;  // sorted by (time, uid)
};

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Independent generator for one flow type. The seed depends on the type's
/// identity (route, size) and a salt, not on its position in the type list.
class Substream {
public:
    Substream(std::uint64_t seed, const FlowType& type, std::uint64_t salt = 0);

    double uniform();  // in [0, 1)
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
};

/// Superposition of independent Poisson processes, one per type, over
/// [0, horizon). uids are assigned in time order.
ArrivalStream gen_poisson(std::span<const FlowType> types, double horizon, std::uint64_t seed);

/// Passes each type through a Poisson regularizer of rate reg_rates[t]: at
/// every emission epoch the oldest waiting real flow of that type leaves, or
/// a dummy flow if none is waiting. Throws UnstableRegularizer when a
/// regularizer rate does not exceed its type's arrival rate.
ArrivalStream regularize(const ArrivalStream& stream, std::span<const FlowType> types,
                         std::span<const double> reg_rates);

/// Line-per-event text format `time,route,size,uid` (plus a `dummy` column
/// when the stream contains dummies), preceded by a header line.
void write_stream(std::ostream& out, const ArrivalStream& stream, std::span<const FlowType> types);

/// Reads the format written by write_stream; (route, size) pairs are mapped
/// back to indices into `types`.
ArrivalStream read_stream(std::istream& in, std::span<const FlowType> types, double horizon);

}  // namespace sfasim::flowgen
