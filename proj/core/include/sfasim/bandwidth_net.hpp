#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sfasim/flow_gen.hpp"
#include "sfasim/sfa.hpp"
#include "sfasim/topology.hpp"

namespace sfasim::nb {

/// A flow in the virtual network with `remaining` work left. Flow classes
/// are the refined (route, size) types.
struct ResidualFlow {
    FlowUid uid = 0;
    TypeId cls = 0;
    double size = 0.0;
    double remaining = 0.0;
    double entered = 0.0;  // time the flow entered N_B
    double served = 0.0;   // integral of the allocated per-flow rate
    bool dummy = false;
};

struct NbState {
    double clock = 0.0;
    std::vector<std::vector<ResidualFlow>> active;  // per class
    sfa::Occupancy n;
    sfa::RateAllocation rates;
};

struct NbDeparture {
    double time = 0.0;
    ResidualFlow flow;
};

/// SFA bandwidth-sharing network over the queues used by the flow types.
/// Each type is its own class with deterministic size; all flows of a class
/// share the class allocation phi_c(n) equally.
class NbEngine {
public:
    NbEngine(sfa::BandwidthNetworkSpec spec, std::vector<double> class_sizes,
             int max_total = sfa::default_max_total);

    /// Builds the virtual network for `types`: one unit-capacity resource per
    /// queue touched by some route, incidence from the routes.
    static NbEngine for_types(std::span<const FlowType> types, std::span<const topo::Route> routes,
                              int max_total = sfa::default_max_total);

    const NbState& state() const { return state_; }
    const sfa::BandwidthNetworkSpec& spec() const { return model_.spec(); }
    std::size_t num_classes() const { return sizes_.size(); }

    /// Drains work at the current rates up to time t (t >= clock).
    void advance(double t);

    /// Earliest completion under the current (constant) rates; ties go to
    /// the lower uid. Empty when no flow is active.
    std::optional<NbDeparture> next_departure() const;

    /// Adds a flow of class `cls` at time t and recomputes rates.
    void arrive(double t, TypeId cls, FlowUid uid, bool dummy = false);

    /// Advances to the next departure, removes that flow and recomputes rates.
    NbDeparture depart();

    /// Largest sum_j B_lj phi_j / C_l seen after any rate recomputation.
    double max_utilisation() const { return max_utilisation_; }

    /// Time-weighted occupancy statistics restricted to [from, to).
    void record_occupancy(double from, double to, bool histogram);
    const std::map<sfa::Occupancy, double>& occupancy_histogram() const { return histogram_; }
    std::vector<double> mean_occupancy() const;

private:
    void recompute();
    void accumulate(double t0, double t1);

    sfa::SfaModel model_;
    std::vector<double> sizes_;
    NbState state_;
    double max_utilisation_ = 0.0;

    bool recording_ = false;
    bool histogram_on_ = false;
    double window_from_ = 0.0;
    double window_to_ = 0.0;
    std::map<sfa::Occupancy, double> histogram_;
    std::vector<double> occupancy_integral_;
    double recorded_time_ = 0.0;
};

/// Injection decision for one flow: it leaves the external buffer and enters
/// its first internal queue at t_inject, its N_B departure time.
struct Injection {
    FlowUid uid = 0;
    TypeId type = 0;
    double t_arrive = 0.0;  // arrival at the system
    double t_nb = 0.0;      // entry into N_B
    double t_inject = 0.0;
    bool dummy = false;
};

struct EmulationOptions {
    int max_total = sfa::default_max_total;
    double stats_from = 0.0;  // occupancy window
    double stats_to = 0.0;
    bool histogram = false;
};

struct EmulationResult {
    std::vector<Injection> injections;  // indexed by uid
    std::vector<NbDeparture> departures;  // in departure order
    std::vector<double> mean_occupancy;
    std::map<sfa::Occupancy, double> histogram;
    double max_utilisation = 0.0;
    std::size_t events = 0;
};

/// Runs N_B on the stream and returns every flow's injection time.
/// Refuses to run (StabilityViolation) when the load is not admissible.
EmulationResult run_emulation(const flowgen::ArrivalStream& stream, std::span<const FlowType> types,
                              std::span<const topo::Route> routes, std::size_t num_queues,
                              const EmulationOptions& options = {});

/// Departure epochs of class `cls` within [from, to).
std::vector<double> departure_process(const EmulationResult& result, TypeId cls, double from, double to);

/// `uid,t_arrive,t_inject` with a header line.
void write_injections(std::ostream& out, std::span<const Injection> injections);

}  // namespace sfasim::nb
