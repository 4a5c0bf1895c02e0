#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfasim/ct_network.hpp"

namespace sfasim::dt {

/// One flow's passage through one queue. Slots are integers: a flow arrives
/// at the end of slot a_slot - 1 (available from a_slot on), is scheduled
/// from s_slot = ceil(tau) and has fully left when slot d_slot - 1 ends.
struct HopLedger {
    QueueId queue = 0;
    double tau = 0.0;    // N_C arrival, real time
    double delta = 0.0;  // N_C departure, real time
    std::int64_t a_slot = 0;
    std::int64_t s_slot = 0;
    std::int64_t d_slot = 0;
    std::int64_t delta_ceil_slot = 0;
};

struct FlowLedger {
    FlowUid uid = 0;
    TypeId type = 0;
    RouteId route = 0;
    double size = 0.0;
    bool dummy = false;
    double t_arrive = 0.0;
    double t_inject = 0.0;
    std::int64_t packets_delivered = 0;
    double d_w = 0.0;  // waiting in the external buffer
    double d_r = 0.0;  // part of d_w spent in the regularizer, before N_B
    double d_s = 0.0;  // injection to delivery of the last packet
    double d = 0.0;    // d_w + d_s
    double d_c = 0.0;  // sojourn in N_C
    std::vector<HopLedger> hops;
};

enum class ViolationKind { late_arrival, late_departure };

struct Violation {
    ViolationKind kind = ViolationKind::late_arrival;
    FlowUid uid = 0;
    std::size_t hop = 0;
    std::int64_t actual = 0;  // a_slot or d_slot
    std::int64_t limit = 0;   // s_slot or ceil(delta)
};

struct Transmission {
    std::int64_t slot = 0;
    QueueId queue = 0;
    FlowUid uid = 0;
};

struct DtOptions {
    bool throw_on_violation = false;
    bool record_transmissions = false;
    std::vector<QueueId> node_order;  // per-slot processing order; empty = index order
    std::int64_t split_slot = 0;      // resident maxima are kept separately before/after this slot
};

struct DelayLedger {
    double epsilon = 1.0;
    std::vector<FlowLedger> flows;  // indexed by uid
    std::vector<Violation> violations;
    std::vector<Transmission> transmissions;
    std::vector<std::size_t> max_resident_first;  // per queue
    std::vector<std::size_t> max_resident_second;
    std::int64_t last_slot = 0;
};

/// Slotted network: each queue sends at most one packet per slot, choosing
/// among the flows it fully holds the one with the largest ceil(tau); ties go
/// to the larger N_C arrival time, then to the larger uid. Preemption happens
/// at slot boundaries. A flow enters the first queue at slot ceil(t_inject / eps).
DelayLedger run_dt(const ct::CtResult& ct, std::span<const nb::Injection> injections,
                   std::span<const FlowType> types, const ct::EpsilonConfig& eps,
                   std::size_t num_queues, const DtOptions& options = {});

/// Per type: C0 / (C0 - 1) * (x d / (1 - rho) + d), d = hop count.
std::vector<double> dt_delay_bound(const ct::EpsilonConfig& eps, const topo::LoadProfile& profile,
                                   std::span<const topo::Route> routes);

/// Per type: x d / (1 - rho).
std::vector<double> wait_bound(const topo::LoadProfile& profile, std::span<const topo::Route> routes);

inline constexpr const char* ledger_format = "sfasim-ledger";
inline constexpr int ledger_version = 1;

/// Real flows only, one row per flow, preceded by a version comment.
void write_ledger(std::ostream& out, const DelayLedger& ledger, const std::string& tool_version);

/// JSON lines, one object per (flow, hop).
void write_hops_jsonl(std::ostream& out, const DelayLedger& ledger);

std::string describe(const Violation& v);

}  // namespace sfasim::dt
