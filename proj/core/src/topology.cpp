#include "sfasim/topology.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace sfasim::topo {

Dag Dag::build(const TreeSpec& spec) {
    Dag dag;
    if (spec.nodes.empty()) {
        throw MalformedTree("tree has no nodes");
    }
    for (const auto& name : spec.nodes) {
        if (!dag.index_.emplace(name, dag.names_.size()).second) {
            throw MalformedTree(fmt::format("duplicate tree node '{}'", name));
        }
        dag.names_.push_back(name);
    }
    if (!dag.index_.contains(spec.root)) {
        throw MalformedTree(fmt::format("root '{}' is not a tree node", spec.root));
    }
    if (spec.parent.contains(spec.root)) {
        throw MalformedTree(fmt::format("root '{}' has a parent", spec.root));
    }

    const std::size_t count = dag.names_.size();
    dag.parent_.assign(count, npos);
    for (const auto& [child, par] : spec.parent) {
        auto c = dag.index_.find(child);
        auto p = dag.index_.find(par);
        if (c == dag.index_.end() || p == dag.index_.end()) {
            throw MalformedTree(fmt::format("parent entry {} -> {} names an unknown node", child, par));
        }
        dag.parent_[c->second] = p->second;
    }
    const std::size_t root = dag.index_.at(spec.root);
    for (std::size_t v = 0; v < count; ++v) {
        if (v != root && dag.parent_[v] == npos) {
            throw MalformedTree(fmt::format("multiple roots: '{}' and '{}' have no parent", spec.root, dag.names_[v]));
        }
    }

    dag.depth_.assign(count, 0);
    for (std::size_t v = 0; v < count; ++v) {
        std::size_t steps = 0;
        for (std::size_t u = v; u != root; u = dag.parent_[u]) {
            if (++steps > count) {
                throw MalformedTree(fmt::format("cycle in parent map through '{}'", dag.names_[v]));
            }
        }
        dag.depth_[v] = steps;
    }

    // Height (rounds of leaf removal before a node becomes a leaf) gives the layers.
    std::vector<std::size_t> height(count, 0);
    std::vector<std::size_t> by_depth(count);
    std::iota(by_depth.begin(), by_depth.end(), 0);
    std::stable_sort(by_depth.begin(), by_depth.end(),
                     [&](std::size_t a, std::size_t b) { return dag.depth_[a] > dag.depth_[b]; });
    for (std::size_t v : by_depth) {
        if (v != root) {
            auto& h = height[dag.parent_[v]];
            h = std::max(h, height[v] + 1);
        }
    }

    dag.queues_.resize(2 * count);
    for (std::size_t v = 0; v < count; ++v) {
        dag.queues_[dag.queue(v, Direction::up)] = {Direction::up, v};
        dag.queues_[dag.queue(v, Direction::down)] = {Direction::down, v};
    }
    for (std::size_t c = 0; c < count; ++c) {
        if (c == root) {
            continue;
        }
        const std::size_t p = dag.parent_[c];
        dag.links_.emplace_back(dag.queue(c, Direction::up), dag.queue(p, Direction::up));
        dag.links_.emplace_back(dag.queue(c, Direction::up), dag.queue(p, Direction::down));
        dag.links_.emplace_back(dag.queue(p, Direction::down), dag.queue(c, Direction::down));
    }
    std::sort(dag.links_.begin(), dag.links_.end());

    std::vector<std::size_t> layered(count);
    std::iota(layered.begin(), layered.end(), 0);
    std::stable_sort(layered.begin(), layered.end(),
                     [&](std::size_t a, std::size_t b) { return height[a] < height[b]; });
    for (std::size_t v : layered) {
        dag.order_.push_back(dag.queue(v, Direction::up));
    }
    std::vector<std::size_t> downward(count);
    std::iota(downward.begin(), downward.end(), 0);
    std::stable_sort(downward.begin(), downward.end(),
                     [&](std::size_t a, std::size_t b) { return height[a] > height[b]; });
    for (std::size_t v : downward) {
        dag.order_.push_back(dag.queue(v, Direction::down));
    }
    dag.position_.assign(2 * count, 0);
    for (std::size_t i = 0; i < dag.order_.size(); ++i) {
        dag.position_[dag.order_[i]] = i;
    }
    return dag;
}

bool Dag::has_link(QueueId from, QueueId to) const {
    return std::binary_search(links_.begin(), links_.end(), std::pair{from, to});
}

std::string Dag::queue_name(QueueId q) const {
    const auto& node = queues_.at(q);
    return fmt::format("{}_{}", names_[node.tree_node], node.dir == Direction::up ? "up" : "down");
}

std::size_t Dag::node_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw ConfigError(fmt::format("unknown tree node '{}'", name));
    }
    return it->second;
}

bool Route::contains(QueueId q) const {
    return std::find(queue_path.begin(), queue_path.end(), q) != queue_path.end();
}

Route make_route(const Dag& dag, const std::string& src, const std::string& dst, RouteId id) {
    if (src == dst) {
        throw ConfigError(fmt::format("route {}: source and destination are both '{}'", id, src));
    }
    std::size_t a = dag.node_index(src);
    std::size_t b = dag.node_index(dst);

    std::vector<std::size_t> climb;  // src side, below the LCA
    std::vector<std::size_t> descend;  // dst side, below the LCA, dst first
    while (dag.depth_of(a) > dag.depth_of(b)) {
        climb.push_back(a);
        a = dag.parent_of(a);
    }
    while (dag.depth_of(b) > dag.depth_of(a)) {
        descend.push_back(b);
        b = dag.parent_of(b);
    }
    while (a != b) {
        climb.push_back(a);
        descend.push_back(b);
        a = dag.parent_of(a);
        b = dag.parent_of(b);
    }
    const std::size_t lca = a;

    Route route;
    route.id = id;
    for (std::size_t u : climb) {
        route.queue_path.push_back(dag.queue(u, Direction::up));
    }
    // descend holds dst, parent(dst), ..., child(lca); the transmitting down
    // queues are lca, child(lca), ..., parent(dst).
    std::vector<std::size_t> senders{lca};
    for (auto it = descend.rbegin(); it != descend.rend(); ++it) {
        senders.push_back(*it);
    }
    senders.pop_back();
    for (std::size_t w : senders) {
        route.queue_path.push_back(dag.queue(w, Direction::down));
    }
    for (std::size_t i = 1; i < route.queue_path.size(); ++i) {
        if (!dag.has_link(route.queue_path[i - 1], route.queue_path[i])) {
            throw InternalConsistency(fmt::format("route {} steps across a non-link", id));
        }
    }
    return route;
}

RoutingMatrix::RoutingMatrix(std::size_t num_queues, std::span<const Route> routes)
    : queues_(num_queues), routes_(routes.size()), entries_(num_queues * routes.size(), 0) {
    for (std::size_t j = 0; j < routes.size(); ++j) {
        for (QueueId v : routes[j].queue_path) {
            entries_.at(v * routes_ + j) = 1;
        }
    }
}

LoadProfile compute_loads(std::size_t num_queues, std::span<const Route> routes, std::span<const FlowType> types) {
    LoadProfile profile;
    profile.types.assign(types.begin(), types.end());
    profile.alpha.assign(routes.size(), 0.0);
    profile.f.assign(num_queues, 0.0);
    profile.lambda_sum.assign(num_queues, 0.0);
    for (const auto& t : types) {
        if (t.route >= routes.size()) {
            throw ConfigError(fmt::format("flow type references route {} but only {} routes exist", t.route, routes.size()));
        }
        if (!(t.rate >= 0.0) || !(t.size > 0.0)) {
            throw ConfigError(fmt::format("flow type on route {} needs size > 0 and rate >= 0", t.route));
        }
        profile.alpha[t.route] += t.size * t.rate;
        for (QueueId v : routes[t.route].queue_path) {
            profile.f.at(v) += t.size * t.rate;
            profile.lambda_sum.at(v) += t.rate;
        }
    }
    profile.rho.assign(routes.size(), 0.0);
    for (std::size_t j = 0; j < routes.size(); ++j) {
        for (QueueId v : routes[j].queue_path) {
            profile.rho[j] = std::max(profile.rho[j], profile.f[v]);
        }
    }
    return profile;
}

bool is_admissible(const LoadProfile& profile) {
    return std::all_of(profile.f.begin(), profile.f.end(), [](double fv) { return fv < 1.0; });
}

}  // namespace sfasim::topo
