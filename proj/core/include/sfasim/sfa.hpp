#pragma once

#include <memory>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sfasim/topology.hpp"
#include "sfasim/types.hpp"

namespace sfasim::sfa {

using Rational = boost::multiprecision::cpp_rational;

/// Number of flows per route (or per refined (j, x) class).
using Occupancy = std::vector<int>;

/// Bandwidth-sharing network: resources with capacities and the amount of
/// each resource one unit of route-j volume consumes.
template <class T>
struct BasicBandwidthSpec {
    std::vector<T> capacity;              // C_l, one per resource
    std::vector<std::vector<T>> usage;    // usage[l][j] = B_lj

    std::size_t num_resources() const { return capacity.size(); }
    std::size_t num_routes() const { return usage.empty() ? 0 : usage.front().size(); }
    bool uses(std::size_t l, std::size_t j) const { return usage[l][j] > 0; }

    /// Throws ConfigError unless capacities are positive, usage is
    /// non-negative and every route uses at least one resource.
    void validate() const;
};

using BandwidthNetworkSpec = BasicBandwidthSpec<double>;
using ExactBandwidthSpec = BasicBandwidthSpec<Rational>;

ExactBandwidthSpec to_exact(const BandwidthNetworkSpec& spec);

/// Unit-capacity, 0/1-incidence network with one resource per queue and one
/// route per entry of `paths`.
BandwidthNetworkSpec unit_network(std::size_t num_queues, std::span<const std::vector<QueueId>> paths);

struct RateAllocation {
    Occupancy n;
    std::vector<double> phi;
};

inline constexpr int default_max_total = 64;

namespace detail {
template <class Arith>
class Normalizer;
struct LogArith;
struct ExactArith;
}  // namespace detail

/// SFA allocation on a fixed network, evaluated in log-domain double
/// precision. Results are memoised per occupancy vector; an instance is
/// not safe for concurrent use.
class SfaModel {
public:
    explicit SfaModel(BandwidthNetworkSpec spec, int max_total = default_max_total);
    ~SfaModel();
    SfaModel(SfaModel&&) noexcept;
    SfaModel& operator=(SfaModel&&) noexcept;

    /// log Phi(n); -inf when some n_j < 0. Throws ResourceLimit when
    /// sum(n) exceeds the configured cap.
    double log_phi_big(const Occupancy& n);
    double phi_big(const Occupancy& n);

    /// phi_j(n) = Phi(n - e_j) / Phi(n).
    RateAllocation phi_rate(const Occupancy& n);

    const BandwidthNetworkSpec& spec() const { return spec_; }
    int max_total() const { return max_total_; }
    std::size_t cache_size() const;
    void clear_cache();

private:
    BandwidthNetworkSpec spec_;
    int max_total_;
    std::unique_ptr<detail::Normalizer<detail::LogArith>> engine_;
};

/// Same recursion in exact rational arithmetic, for oracle comparisons.
class ExactSfaModel {
public:
    explicit ExactSfaModel(ExactBandwidthSpec spec, int max_total = default_max_total);
    ~ExactSfaModel();
    ExactSfaModel(ExactSfaModel&&) noexcept;
    ExactSfaModel& operator=(ExactSfaModel&&) noexcept;

    Rational phi_big(const Occupancy& n);
    std::vector<Rational> phi_rate(const Occupancy& n);

    const ExactBandwidthSpec& spec() const { return spec_; }

private:
    ExactBandwidthSpec spec_;
    std::unique_ptr<detail::Normalizer<detail::ExactArith>> engine_;
};

/// g_l = sum_j B_lj alpha_j / C_l.
std::vector<double> resource_loads(const BandwidthNetworkSpec& spec, std::span<const double> alpha);

/// Product-form stationary law pi(n) = Phi(n)/Phi * prod_j alpha_j^{n_j}.
class StationaryLaw {
public:
    /// Throws StabilityViolation unless every resource has g_l < 1.
    StationaryLaw(BandwidthNetworkSpec spec, std::vector<double> alpha, int max_total = default_max_total);

    double log_normalizer() const { return log_normalizer_; }
    double normalizer() const;
    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& load() const { return load_; }

    double log_pi(const Occupancy& n);
    double pi(const Occupancy& n);

private:
    SfaModel model_;
    std::vector<double> alpha_;
    std::vector<double> load_;
    double log_normalizer_ = 0.0;
};

StationaryLaw stationary_pi(const BandwidthNetworkSpec& spec, std::span<const double> alpha,
                            int max_total = default_max_total);

/// E[N_j] = sum_{l in j} (B_lj alpha_j / C_l) / (1 - g_l).
std::vector<double> expected_occupancy(const BandwidthNetworkSpec& spec, std::span<const double> alpha);

/// Mean sojourn of each flow type in the virtual network:
/// sum over queues v on the route of x / (1 - f_v).
std::vector<double> expected_flow_delay(const topo::LoadProfile& profile, std::span<const topo::Route> routes);

}  // namespace sfasim::sfa
