#include "sfasim/sfa.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "normalizer.hpp"

namespace sfasim::sfa {

template <class T>
void BasicBandwidthSpec<T>::validate() const {
    if (usage.size() != capacity.size()) {
        throw ConfigError("bandwidth spec: usage rows must match the number of resources");
    }
    const std::size_t routes = num_routes();
    for (std::size_t l = 0; l < capacity.size(); ++l) {
        if (!(capacity[l] > 0)) {
            throw ConfigError(fmt::format("bandwidth spec: resource {} needs positive capacity", l));
        }
        if (usage[l].size() != routes) {
            throw ConfigError(fmt::format("bandwidth spec: usage row {} has the wrong length", l));
        }
        for (const auto& b : usage[l]) {
            if (b < 0) {
                throw ConfigError(fmt::format("bandwidth spec: negative usage on resource {}", l));
            }
        }
    }
    for (std::size_t j = 0; j < routes; ++j) {
        bool used = false;
        for (std::size_t l = 0; l < capacity.size(); ++l) {
            used = used || uses(l, j);
        }
        if (!used) {
            throw ConfigError(fmt::format("bandwidth spec: route {} uses no resource", j));
        }
    }
}

template struct BasicBandwidthSpec<double>;
template struct BasicBandwidthSpec<Rational>;

ExactBandwidthSpec to_exact(const BandwidthNetworkSpec& spec) {
    ExactBandwidthSpec exact;
    for (double c : spec.capacity) {
        exact.capacity.emplace_back(c);
    }
    for (const auto& row : spec.usage) {
        auto& out = exact.usage.emplace_back();
        for (double b : row) {
            out.emplace_back(b);
        }
    }
    return exact;
}

BandwidthNetworkSpec unit_network(std::size_t num_queues, std::span<const std::vector<QueueId>> paths) {
    BandwidthNetworkSpec spec;
    spec.capacity.assign(num_queues, 1.0);
    spec.usage.assign(num_queues, std::vector<double>(paths.size(), 0.0));
    for (std::size_t j = 0; j < paths.size(); ++j) {
        for (QueueId v : paths[j]) {
            spec.usage.at(v)[j] = 1.0;
        }
    }
    return spec;
}

SfaModel::SfaModel(BandwidthNetworkSpec spec, int max_total) : spec_(std::move(spec)), max_total_(max_total) {
    spec_.validate();
    engine_ = std::make_unique<detail::Normalizer<detail::LogArith>>(spec_, max_total_);
}

SfaModel::~SfaModel() = default;
SfaModel::SfaModel(SfaModel&&) noexcept = default;
SfaModel& SfaModel::operator=(SfaModel&&) noexcept = default;

double SfaModel::log_phi_big(const Occupancy& n) { return engine_->phi(n); }

double SfaModel::phi_big(const Occupancy& n) { return std::exp(engine_->phi(n)); }

RateAllocation SfaModel::phi_rate(const Occupancy& n) {
    RateAllocation rates{n, std::vector<double>(n.size(), 0.0)};
    const double log_full = engine_->phi(n);
    Occupancy down = n;
    for (std::size_t j = 0; j < n.size(); ++j) {
        if (n[j] <= 0) {
            continue;
        }
        --down[j];
        rates.phi[j] = std::exp(engine_->phi(down) - log_full);
        ++down[j];
    }
    return rates;
}

std::size_t SfaModel::cache_size() const { return engine_->size(); }

void SfaModel::clear_cache() { engine_->clear(); }

ExactSfaModel::ExactSfaModel(ExactBandwidthSpec spec, int max_total) : spec_(std::move(spec)) {
    spec_.validate();
    engine_ = std::make_unique<detail::Normalizer<detail::ExactArith>>(spec_, max_total);
}

ExactSfaModel::~ExactSfaModel() = default;
ExactSfaModel::ExactSfaModel(ExactSfaModel&&) noexcept = default;
ExactSfaModel& ExactSfaModel::operator=(ExactSfaModel&&) noexcept = default;

Rational ExactSfaModel::phi_big(const Occupancy& n) { return engine_->phi(n); }

std::vector<Rational> ExactSfaModel::phi_rate(const Occupancy& n) {
    std::vector<Rational> phi(n.size(), Rational(0));
    const Rational full = engine_->phi(n);
    Occupancy down = n;
    for (std::size_t j = 0; j < n.size(); ++j) {
        if (n[j] <= 0) {
            continue;
        }
        --down[j];
        phi[j] = engine_->phi(down) / full;
        ++down[j];
    }
    return phi;
}

std::vector<double> resource_loads(const BandwidthNetworkSpec& spec, std::span<const double> alpha) {
    if (alpha.size() != spec.num_routes()) {
        throw ConfigError("traffic intensity vector does not match the number of routes");
    }
    std::vector<double> g(spec.num_resources(), 0.0);
    for (std::size_t l = 0; l < g.size(); ++l) {
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            g[l] += spec.usage[l][j] * alpha[j];
        }
        g[l] /= spec.capacity[l];
    }
    return g;
}

namespace {

std::vector<double> checked_loads(const BandwidthNetworkSpec& spec, std::span<const double> alpha) {
    auto g = resource_loads(spec, alpha);
    for (std::size_t l = 0; l < g.size(); ++l) {
        if (!(g[l] < 1.0)) {
            throw StabilityViolation(fmt::format("resource {} has load {} >= 1", l, g[l]));
        }
    }
    for (double a : alpha) {
        if (a < 0) {
            throw ConfigError("traffic intensities must be non-negative");
        }
    }
    return g;
}

}  // namespace

StationaryLaw::StationaryLaw(BandwidthNetworkSpec spec, std::vector<double> alpha, int max_total)
    : model_(std::move(spec), max_total), alpha_(std::move(alpha)) {
    load_ = checked_loads(model_.spec(), alpha_);
    for (std::size_t l = 0; l < load_.size(); ++l) {
        // C / (C - sum B alpha) = 1 / (1 - g)
        log_normalizer_ -= std::log1p(-load_[l]);
    }
}

double StationaryLaw::normalizer() const { return std::exp(log_normalizer_); }

double StationaryLaw::log_pi(const Occupancy& n) {
    double out = model_.log_phi_big(n) - log_normalizer_;
    for (std::size_t j = 0; j < n.size(); ++j) {
        if (n[j] == 0) {
            continue;
        }
        if (alpha_[j] == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        out += n[j] * std::log(alpha_[j]);
    }
    return out;
}

double StationaryLaw::pi(const Occupancy& n) { return std::exp(log_pi(n)); }

StationaryLaw stationary_pi(const BandwidthNetworkSpec& spec, std::span<const double> alpha, int max_total) {
    return StationaryLaw(spec, std::vector<double>(alpha.begin(), alpha.end()), max_total);
}

std::vector<double> expected_occupancy(const BandwidthNetworkSpec& spec, std::span<const double> alpha) {
    spec.validate();
    const auto g = checked_loads(spec, alpha);
    std::vector<double> mean(alpha.size(), 0.0);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        for (std::size_t l = 0; l < g.size(); ++l) {
            if (spec.uses(l, j)) {
                mean[j] += spec.usage[l][j] * alpha[j] / spec.capacity[l] / (1.0 - g[l]);
            }
        }
    }
    return mean;
}

std::vector<double> expected_flow_delay(const topo::LoadProfile& profile, std::span<const topo::Route> routes) {
    if (!topo::is_admissible(profile)) {
        throw StabilityViolation("arrival rates lie outside the admissible region");
    }
    std::vector<double> delay;
    delay.reserve(profile.types.size());
    for (const auto& t : profile.types) {
        double d = 0.0;
        for (QueueId v : routes[t.route].queue_path) {
            d += t.size / (1.0 - profile.f[v]);
        }
        delay.push_back(d);
    }
    return delay;
}

}  // namespace sfasim::sfa
