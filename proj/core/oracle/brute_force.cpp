#include "brute_force.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace sfasim::oracle {

namespace {

// All compositions of `total` into `parts` non-negative integers.
std::vector<std::vector<int>> compositions(int total, std::size_t parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(parts, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == parts) {
            cur[i] = left;
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            cur[i] = k;
            rec(i + 1, left - k);
        }
    };
    if (parts == 0) {
        if (total == 0) {
            out.emplace_back();
        }
        return out;
    }
    rec(0, total);
    return out;
}

template <class T, class Spec, class Term>
T enumerate(const Spec& spec, const sfa::Occupancy& n, Term term) {
    const std::size_t routes = spec.num_routes();
    const std::size_t res = spec.num_resources();
    for (int v : n) {
        if (v < 0) {
            return T(0);
        }
    }
    std::vector<std::vector<std::size_t>> on_route(routes);
    for (std::size_t j = 0; j < routes; ++j) {
        for (std::size_t l = 0; l < res; ++l) {
            if (spec.usage[l][j] != 0) {
                on_route[j].push_back(l);
            }
        }
    }
    std::vector<std::vector<std::vector<int>>> choices(routes);
    for (std::size_t j = 0; j < routes; ++j) {
        choices[j] = compositions(n[j], on_route[j].size());
        if (choices[j].empty()) {
            return T(0);
        }
    }
    T sum(0);
    std::vector<std::size_t> pick(routes, 0);
    while (true) {
        // m[l][j]
        std::vector<std::vector<int>> m(res, std::vector<int>(routes, 0));
        for (std::size_t j = 0; j < routes; ++j) {
            for (std::size_t k = 0; k < on_route[j].size(); ++k) {
                m[on_route[j][k]][j] = choices[j][pick[j]][k];
            }
        }
        sum += term(m);
        std::size_t j = 0;
        for (; j < routes; ++j) {
            if (++pick[j] < choices[j].size()) {
                break;
            }
            pick[j] = 0;
        }
        if (j == routes) {
            break;
        }
    }
    return sum;
}

sfa::Rational factorial(int k) {
    sfa::Rational f(1);
    for (int i = 2; i <= k; ++i) {
        f *= i;
    }
    return f;
}

}  // namespace

sfa::Rational phi_enumerated(const sfa::ExactBandwidthSpec& spec, const sfa::Occupancy& n) {
    return enumerate<sfa::Rational>(spec, n, [&](const std::vector<std::vector<int>>& m) {
        sfa::Rational term(1);
        for (std::size_t l = 0; l < m.size(); ++l) {
            const int ml = std::accumulate(m[l].begin(), m[l].end(), 0);
            term *= factorial(ml);
            for (std::size_t j = 0; j < m[l].size(); ++j) {
                term /= factorial(m[l][j]);
                const sfa::Rational w = spec.usage[l][j] / spec.capacity[l];
                for (int k = 0; k < m[l][j]; ++k) {
                    term *= w;
                }
            }
        }
        return term;
    });
}

double phi_enumerated(const sfa::BandwidthNetworkSpec& spec, const sfa::Occupancy& n) {
    return enumerate<double>(spec, n, [&](const std::vector<std::vector<int>>& m) {
        double term = 1.0;
        for (std::size_t l = 0; l < m.size(); ++l) {
            const int ml = std::accumulate(m[l].begin(), m[l].end(), 0);
            term *= std::tgamma(ml + 1.0);
            for (std::size_t j = 0; j < m[l].size(); ++j) {
                term /= std::tgamma(m[l][j] + 1.0);
                term *= std::pow(spec.usage[l][j] / spec.capacity[l], m[l][j]);
            }
        }
        return term;
    });
}

std::size_t count_u(const sfa::BandwidthNetworkSpec& spec, const sfa::Occupancy& n) {
    return enumerate<std::size_t>(spec, n, [](const std::vector<std::vector<int>>&) { return std::size_t{1}; });
}

std::vector<sfa::Occupancy> occupancies_up_to(std::size_t dims, int total) {
    std::vector<sfa::Occupancy> out;
    sfa::Occupancy cur(dims, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i == dims) {
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            cur[i] = k;
            rec(i + 1, left - k);
        }
    };
    rec(0, total);
    return out;
}

}  // namespace sfasim::oracle
