#include "selftest.hpp"

#include <cmath>
#include <sstream>

#include "brute_force.hpp"

namespace sfasim::oracle {

sfa::ExactBandwidthSpec random_spec(std::mt19937_64& rng, std::size_t max_resources, std::size_t max_routes) {
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const auto res = static_cast<std::size_t>(uniform(1, static_cast<int>(max_resources)));
    const auto routes = static_cast<std::size_t>(uniform(1, static_cast<int>(max_routes)));
    sfa::ExactBandwidthSpec spec;
    for (std::size_t l = 0; l < res; ++l) {
        spec.capacity.emplace_back(uniform(1, 4), uniform(1, 3));
    }
    spec.usage.assign(res, std::vector<sfa::Rational>(routes, sfa::Rational(0)));
    for (std::size_t j = 0; j < routes; ++j) {
        bool any = false;
        for (std::size_t l = 0; l < res; ++l) {
            if (uniform(0, 1) == 1) {
                spec.usage[l][j] = sfa::Rational(uniform(1, 3), uniform(1, 3));
                any = true;
            }
        }
        if (!any) {
            spec.usage[static_cast<std::size_t>(uniform(0, static_cast<int>(res) - 1))][j] =
                sfa::Rational(uniform(1, 3), uniform(1, 3));
        }
    }
    return spec;
}

sfa::BandwidthNetworkSpec to_double(const sfa::ExactBandwidthSpec& spec) {
    sfa::BandwidthNetworkSpec out;
    for (const auto& c : spec.capacity) {
        out.capacity.push_back(static_cast<double>(c));
    }
    for (const auto& row : spec.usage) {
        out.usage.emplace_back();
        for (const auto& b : row) {
            out.usage.back().push_back(static_cast<double>(b));
        }
    }
    return out;
}

std::vector<SelftestItem> run_selftest(std::uint64_t seed, std::size_t specs, int max_total) {
    std::vector<SelftestItem> items;
    std::mt19937_64 rng(seed);

    std::size_t exact_bad = 0, float_bad = 0, compared = 0;
    double worst = 0.0;
    for (std::size_t s = 0; s < specs; ++s) {
        const auto exact = random_spec(rng);
        const auto approx = to_double(exact);
        const auto approx_exact = sfa::to_exact(approx);
        sfa::ExactSfaModel model(exact, max_total);
        sfa::SfaModel fmodel(approx, max_total);
        for (const auto& n : occupancies_up_to(exact.num_routes(), max_total)) {
            ++compared;
            if (model.phi_big(n) != phi_enumerated(exact, n)) {
                ++exact_bad;
            }
            const double truth = static_cast<double>(phi_enumerated(approx_exact, n));
            const double got = fmodel.phi_big(n);
            const double rel = std::abs(got - truth) / std::abs(truth);
            worst = std::max(worst, rel);
            if (!(rel <= 1e-12)) {
                ++float_bad;
            }
        }
    }
    std::ostringstream d;
    d << specs << " specs, " << compared << " occupancies, " << exact_bad << " mismatches";
    items.push_back({"phi_exact", exact_bad == 0, d.str()});
    d.str("");
    d << "worst relative error " << worst;
    items.push_back({"phi_float", float_bad == 0, d.str()});

    // Two routes on one unit resource: plain processor sharing.
    sfa::ExactBandwidthSpec ps{{sfa::Rational(1)}, {{sfa::Rational(1), sfa::Rational(1)}}};
    sfa::ExactSfaModel psm(ps, 30);
    std::size_t ps_bad = 0;
    for (const auto& n : occupancies_up_to(2, 30)) {
        if (n[0] + n[1] == 0) {
            continue;
        }
        const auto phi = psm.phi_rate(n);
        if (phi[0] != sfa::Rational(n[0], n[0] + n[1]) || phi[1] != sfa::Rational(n[1], n[0] + n[1])) {
            ++ps_bad;
        }
    }
    items.push_back({"processor_sharing", ps_bad == 0, std::to_string(ps_bad) + " mismatches"});

    // One route, one unit resource, alpha = 1/2: geometric law.
    sfa::StationaryLaw law(sfa::BandwidthNetworkSpec{{1.0}, {{1.0}}}, {0.5}, 64);
    double mass = 0.0;
    for (int k = 0; k <= 40; ++k) {
        mass += law.pi({k});
    }
    const double expect = 1.0 - std::pow(0.5, 41);
    d.str("");
    d << "mass " << mass << " vs " << expect;
    items.push_back({"geometric_tail", std::abs(mass - expect) <= 1e-9, d.str()});
    return items;
}

}  // namespace sfasim::oracle
