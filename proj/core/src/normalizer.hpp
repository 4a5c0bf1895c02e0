#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "sfasim/sfa.hpp"

namespace sfasim::sfa::detail {

struct OccupancyHash {
    std::size_t operator()(const Occupancy& n) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (int v : n) {
            h ^= static_cast<std::size_t>(static_cast<unsigned>(v));
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

// Values are log-magnitudes; the recursion only ever adds positive terms.
struct LogArith {
    using value_type = double;
    static value_type zero() { return -std::numeric_limits<double>::infinity(); }
    static value_type one() { return 0.0; }
    static value_type weight(double b, double c) { return std::log(b / c); }
    static value_type add(value_type a, value_type b) {
        if (a < b) {
            std::swap(a, b);
        }
        if (b == zero()) {
            return a;
        }
        return a + std::log1p(std::exp(b - a));
    }
    static value_type mul(value_type a, value_type b) { return a + b; }
    static bool is_zero(value_type a) { return a == zero(); }
};

struct ExactArith {
    using value_type = Rational;
    static value_type zero() { return Rational(0); }
    static value_type one() { return Rational(1); }
    static value_type weight(const Rational& b, const Rational& c) { return b / c; }
    static value_type add(const value_type& a, const value_type& b) { return a + b; }
    static value_type mul(const value_type& a, const value_type& b) { return a * b; }
    static bool is_zero(const value_type& a) { return a == 0; }
};

/// Phi(n) via resource peeling. With F_k the sum over U(n) restricted to
/// the first k resources,
///   F_0(n) = [n == 0]
///   F_k(n) = F_{k-1}(n) + sum_{j uses l_k} (B_{l_k j} / C_{l_k}) F_k(n - e_j)
/// and Phi(n) = F_L(n). The split is on whether resource l_k carries any
/// flow in m; if it does, one flow is peeled off its multinomial.
template <class Arith>
class Normalizer {
public:
    using Value = typename Arith::value_type;

    template <class Spec>
    Normalizer(const Spec& spec, int max_total) : max_total_(max_total) {
        const std::size_t resources = spec.num_resources();
        routes_ = spec.num_routes();
        weights_.resize(resources);
        users_.resize(resources);
        for (std::size_t l = 0; l < resources; ++l) {
            for (std::size_t j = 0; j < routes_; ++j) {
                if (spec.uses(l, j)) {
                    users_[l].push_back(j);
                    weights_[l].push_back(Arith::weight(spec.usage[l][j], spec.capacity[l]));
                }
            }
        }
    }

    Value phi(const Occupancy& n) {
        if (n.size() != routes_) {
            throw ConfigError(fmt::format("occupancy has {} entries, network has {} routes", n.size(), routes_));
        }
        for (int v : n) {
            if (v < 0) {
                return Arith::zero();
            }
        }
        const long total = std::accumulate(n.begin(), n.end(), 0L);
        if (total > max_total_) {
            throw ResourceLimit(fmt::format("occupancy total {} exceeds the normalizer cap {}", total, max_total_));
        }
        return table(n).back();
    }

    std::size_t size() const { return memo_.size(); }
    void clear() { memo_.clear(); }

private:
    const std::vector<Value>& table(const Occupancy& n) {
        if (auto it = memo_.find(n); it != memo_.end()) {
            return it->second;
        }
        std::vector<Occupancy> stack{n};
        Occupancy down;
        while (!stack.empty()) {
            const Occupancy top = stack.back();
            if (memo_.contains(top)) {
                stack.pop_back();
                continue;
            }
            bool ready = true;
            for (std::size_t j = 0; j < routes_; ++j) {
                if (top[j] == 0) {
                    continue;
                }
                down = top;
                --down[j];
                if (!memo_.contains(down)) {
                    stack.push_back(down);
                    ready = false;
                }
            }
            if (ready) {
                memo_.emplace(top, compute(top));
                stack.pop_back();
            }
        }
        return memo_.at(n);
    }

    std::vector<Value> compute(const Occupancy& n) const {
        const std::size_t resources = users_.size();
        std::vector<const std::vector<Value>*> below(routes_, nullptr);
        Occupancy down;
        for (std::size_t j = 0; j < routes_; ++j) {
            if (n[j] > 0) {
                down = n;
                --down[j];
                below[j] = &memo_.at(down);
            }
        }
        std::vector<Value> f(resources + 1, Arith::zero());
        const bool empty = std::all_of(n.begin(), n.end(), [](int v) { return v == 0; });
        f[0] = empty ? Arith::one() : Arith::zero();
        for (std::size_t k = 1; k <= resources; ++k) {
            Value acc = f[k - 1];
            const auto& users = users_[k - 1];
            for (std::size_t i = 0; i < users.size(); ++i) {
                const auto* prev = below[users[i]];
                if (prev != nullptr && !Arith::is_zero((*prev)[k])) {
                    acc = Arith::add(acc, Arith::mul(weights_[k - 1][i], (*prev)[k]));
                }
            }
            f[k] = std::move(acc);
        }
        return f;
    }

    int max_total_;
    std::size_t routes_ = 0;
    std::vector<std::vector<std::size_t>> users_;
    std::vector<std::vector<Value>> weights_;
    std::unordered_map<Occupancy, std::vector<Value>, OccupancyHash> memo_;
};

}  // namespace sfasim::sfa::detail
