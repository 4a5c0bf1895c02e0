#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfasim/types.hpp"

namespace sfasim::topo {

/// Rooted tree given as a parent map. Every node except `root` has exactly
/// one parent.
struct TreeSpec {
    std::vector<std::string> nodes;
    std::map<std::string, std::string> parent;
    std::string root;

    friend bool operator==(const TreeSpec&, const TreeSpec&) = default;
};

enum class Direction { up, down };

struct QueueNode {
    Direction dir = Direction::up;
    std::size_t tree_node = 0;
};

/// Up/down queue graph of a tree. Queue ids are dense; `topo_order` lists
/// them leaf up-queues first, root in the middle, leaf down-queues last.
class Dag {
public:
    static Dag build(const TreeSpec& spec);

    std::size_t num_queues() const { return queues_.size(); }
    const std::vector<QueueNode>& queues() const { return queues_; }
    const std::vector<std::pair<QueueId, QueueId>>& links() const { return links_; }
    const std::vector<QueueId>& topo_order() const { return order_; }
    std::size_t position(QueueId q) const { return position_.at(q); }
    bool has_link(QueueId from, QueueId to) const;

    QueueId queue(std::size_t tree_node, Direction dir) const { return 2 * tree_node + (dir == Direction::down ? 1 : 0); }
    QueueId queue(const std::string& node, Direction dir) const { return queue(node_index(node), dir); }
    std::string queue_name(QueueId q) const;

    std::size_t num_tree_nodes() const { return names_.size(); }
    std::size_t node_index(const std::string& name) const;
    const std::string& node_name(std::size_t idx) const { return names_.at(idx); }
    // parent index, or npos for the root
    std::size_t parent_of(std::size_t idx) const { return parent_.at(idx); }
    std::size_t depth_of(std::size_t idx) const { return depth_.at(idx); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> depth_;
    std::vector<QueueNode> queues_;
    std::vector<std::pair<QueueId, QueueId>> links_;
    std::vector<QueueId> order_;
    std::vector<std::size_t> position_;
};

struct Route {
    RouteId id = 0;
    std::vector<QueueId> queue_path;

    std::size_t hop_count() const { return queue_path.size(); }
    bool contains(QueueId q) const;
};

/// Path of transmitting queues from `src` to `dst`: the up-queues of src and
/// its ancestors below the lowest common ancestor, then the down-queues from
/// the LCA to the parent of dst.
Route make_route(const Dag& dag, const std::string& src, const std::string& dst, RouteId id = 0);

/// 0/1 queue-by-route incidence (the matrix A).
class RoutingMatrix {
public:
    RoutingMatrix(std::size_t num_queues, std::span<const Route> routes);

    std::size_t num_queues() const { return queues_; }
    std::size_t num_routes() const { return routes_; }
    int at(QueueId v, RouteId j) const { return entries_[v * routes_ + j]; }

private:
    std::size_t queues_;
    std::size_t routes_;
    std::vector<int> entries_;
};

/// Offered load of a set of flow types on the queues.
struct LoadProfile {
    std::vector<FlowType> types;
    std::vector<double> alpha;       // per route: sum_x x * lambda_{j,x}
    std::vector<double> f;           // per queue
    std::vector<double> rho;         // per route: max f_v along the route
    std::vector<double> lambda_sum;  // per queue: sum of lambda over types through it
};

LoadProfile compute_loads(std::size_t num_queues, std::span<const Route> routes, std::span<const FlowType> types);

/// f_v < 1 at every queue.
bool is_admissible(const LoadProfile& profile);

}  // namespace sfasim::topo
