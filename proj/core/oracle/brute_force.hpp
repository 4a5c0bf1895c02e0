#pragma once

#include <vector>

#include "sfasim/sfa.hpp"

namespace sfasim::oracle {

/// Direct sum over U(n): every way of splitting each n_j over the resources
/// of route j, weighted by the per-resource multinomials. No memoization,
/// nothing shared with the production recursion.
sfa::Rational phi_enumerated(const sfa::ExactBandwidthSpec& spec, const sfa::Occupancy& n);
double phi_enumerated(const sfa::BandwidthNetworkSpec& spec, const sfa::Occupancy& n);

/// Number of elements of U(n).
std::size_t count_u(const sfa::BandwidthNetworkSpec& spec, const sfa::Occupancy& n);

/// All n >= 0 with sum n <= total, in lexicographic order.
std::vector<sfa::Occupancy> occupancies_up_to(std::size_t dims, int total);

}  // namespace sfasim::oracle
