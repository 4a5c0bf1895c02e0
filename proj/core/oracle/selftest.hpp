#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sfasim/sfa.hpp"

namespace sfasim::oracle {

/// Up to `max_resources` resources and `max_routes` routes; capacities and
/// usages are small rationals (p/q with q in {1, 2, 3}), every route uses at
/// least one resource.
sfa::ExactBandwidthSpec random_spec(std::mt19937_64& rng, std::size_t max_resources = 4,
                                    std::size_t max_routes = 3);

sfa::BandwidthNetworkSpec to_double(const sfa::ExactBandwidthSpec& spec);

struct SelftestItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Production allocation code against the enumerator and closed forms.
std::vector<SelftestItem> run_selftest(std::uint64_t seed, std::size_t specs = 200, int max_total = 6);

}  // namespace sfasim::oracle
