#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sfasim/bandwidth_net.hpp"
#include "sfasim/topology.hpp"

namespace sfasim::ct {

/// Slot length and the sizes/loads it induces. Flow sizes round up to a
/// whole number of slots: x_eps = epsilon * ceil(x / epsilon).
struct EpsilonConfig {
    double epsilon = 1.0;
    double c0 = 2.0;
    bool overridden = false;
    std::vector<std::int64_t> packets;  // per type: ceil(x / epsilon)
    std::vector<double> x_eps;          // per type
    std::vector<double> f_eps;          // per queue
};

/// ceil(u) for u on the slot grid, treating values within a 1e-12 relative
/// band above an integer as that integer (floating-point noise).
std::int64_t slot_ceil(double u);

/// Number of epsilon-slots a flow of size x occupies.
std::int64_t packet_count(double x, double epsilon);

/// epsilon = min{ (1/C0) min_v (1 - f_v) / sum_{j in v} sum_x lambda_{j,x},  min_j (1 - rho_j) }
/// unless `override_epsilon` is given. Throws ConfigError when C0 <= 1 and
/// StabilityViolation when the load (or the rounded load) is not admissible.
EpsilonConfig choose_epsilon(const topo::LoadProfile& profile, std::span<const topo::Route> routes, double c0,
                             std::optional<double> override_epsilon = std::nullopt);

/// Closed-form mean sojourn per type: sum_{v in j} x_eps / (1 - f_eps_v).
std::vector<double> ct_delay_oracle(const EpsilonConfig& eps, const topo::LoadProfile& profile,
                                    std::span<const topo::Route> routes);

/// Arrival and departure of a flow at one queue, in slot units (time / epsilon).
struct CtHop {
    QueueId queue = 0;
    double tau = 0.0;
    double delta = 0.0;
};

struct CtFlow {
    FlowUid uid = 0;
    TypeId type = 0;
    bool dummy = false;
    std::vector<CtHop> hops;
};

struct ServiceSegment {
    QueueId queue = 0;
    FlowUid uid = 0;
    double start = 0.0;
    double end = 0.0;
};

struct BusyCycle {
    QueueId queue = 0;
    FlowUid first = 0;
    FlowUid last_to_leave = 0;
    std::size_t flows = 0;
    double start = 0.0;
    double end = 0.0;
    double work = 0.0;  // total service brought by the cycle's flows
};

struct CtOptions {
    bool record_service = false;
    bool record_cycles = false;
};

struct CtResult {
    double epsilon = 1.0;
    std::vector<CtFlow> flows;  // indexed by uid
    std::vector<ServiceSegment> service;
    std::vector<BusyCycle> cycles;

    double to_time(double slots) const { return slots * epsilon; }
};

/// Continuous-time LCFS-PR network: every flow needs x_eps of service at each
/// queue on its route and enters its first queue at t_inject. A departure
/// is an arrival at the next queue at the same instant.
CtResult run_ct(std::span<const nb::Injection> injections, std::span<const FlowType> types,
                std::span<const topo::Route> routes, const EpsilonConfig& eps, const CtOptions& options = {});

/// `uid,node,tau,delta` in real time, with a header line.
void write_ct_table(std::ostream& out, const CtResult& result);

}  // namespace sfasim::ct
