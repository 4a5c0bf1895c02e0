#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfasim/dt_network.hpp"
#include "sfasim/sfa.hpp"

namespace sfasim::metrics {

/// Per-type delay means next to their closed-form predictions and bounds.
/// A mean is absent (nullopt) when no real flow of the type arrived after burn-in.
struct TypeStats {
    TypeId type = 0;
    RouteId route = 0;
    double size = 0.0;
    double rate = 0.0;
    std::size_t hops = 0;
    std::size_t count = 0;
    std::optional<double> mean_dw;
    std::optional<double> mean_ds;
    std::optional<double> mean_d;
    std::optional<double> mean_dc;  // N_C sojourn
    std::optional<double> mean_dr;  // regularizer wait, zero without one
    double oracle_dw = 0.0;         // sum_v x / (1 - f_v)
    double oracle_ds = 0.0;         // sum_v x_eps / (1 - f_eps_v)
    double bound_dw = 0.0;
    double bound_ds = 0.0;
    double bound_d = 0.0;

    /// The bounds cover the time from entering N_B on; the regularizer wait
    /// is taken off first. True when the mean is absent.
    bool within_bound() const { return !mean_d || *mean_d - mean_dr.value_or(0.0) <= bound_d; }
    bool within_wait_bound(double tolerance) const {
        return !mean_dw || *mean_dw - mean_dr.value_or(0.0) <= bound_dw * (1.0 + tolerance);
    }
};

std::vector<TypeStats> summarize(const dt::DelayLedger& ledger, const topo::LoadProfile& profile,
                                 std::span<const topo::Route> routes, const ct::EpsilonConfig& eps,
                                 double burn_in_time);

struct PoissonReport {
    std::size_t samples = 0;
    double mean_ratio = 0.0;  // mean gap * rate
    double cv2 = 0.0;
    double dispersion = 0.0;  // variance / mean of counts in windows of ~10 mean gaps
    bool inconclusive = true;

    bool consistent(double mean_tol, double cv2_tol, double dispersion_tol) const;
};

inline constexpr std::size_t poisson_min_samples = 10000;

/// `times` must be sorted; `rate` is the nominal intensity.
PoissonReport test_poisson(std::span<const double> times, double rate);

/// Pearson correlation of the counts of two point processes over windows
/// of length `window` tiling [from, to).
double window_count_correlation(std::span<const double> a, std::span<const double> b, double from, double to,
                                double window);

struct DistributionComparison {
    double tv = 0.0;
    double analytic_mass = 0.0;  // stationary mass on {sum n <= cap}
    double empirical_mass = 0.0;
    bool warning = false;        // cap leaves more than 20% of the analytic mass out
};

/// Total variation between the time-weighted histogram and the stationary law,
/// both restricted to {sum n <= cap} and renormalized.
DistributionComparison compare_distribution(const std::map<sfa::Occupancy, double>& histogram,
                                            sfa::StationaryLaw& law, int cap);

void write_summary_csv(std::ostream& out, std::span<const TypeStats> stats, const std::string& tool_version);
void write_summary_text(std::ostream& out, std::span<const TypeStats> stats);

}  // namespace sfasim::metrics
