#include <gtest/gtest.h>

#include <random>

#include "sfasim/topology.hpp"

using namespace sfasim;
using topo::Direction;

namespace {

topo::TreeSpec star() { return {{"r", "a", "b"}, {{"a", "r"}, {"b", "r"}}, "r"}; }

// r - m - a chain plus a second leaf b under r
topo::TreeSpec lopsided() { return {{"r", "m", "a", "b"}, {{"m", "r"}, {"a", "m"}, {"b", "r"}}, "r"}; }

std::vector<std::string> names(const topo::Dag& dag, const std::vector<QueueId>& qs) {
    std::vector<std::string> out;
    for (auto q : qs) {
        out.push_back(dag.queue_name(q));
    }
    return out;
}

topo::TreeSpec random_tree(std::mt19937_64& rng, std::size_t n) {
    topo::TreeSpec spec;
    spec.root = "n0";
    spec.nodes.push_back("n0");
    for (std::size_t i = 1; i < n; ++i) {
        const auto p = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
        spec.nodes.push_back("n" + std::to_string(i));
        spec.parent["n" + std::to_string(i)] = "n" + std::to_string(p);
    }
    return spec;
}

}  // namespace

TEST(BuildDag, SingleNode) {
    auto dag = topo::Dag::build({{"r"}, {}, "r"});
    EXPECT_EQ(dag.num_queues(), 2u);
    EXPECT_TRUE(dag.links().empty());
    EXPECT_EQ(names(dag, dag.topo_order()), (std::vector<std::string>{"r_up", "r_down"}));
}

TEST(BuildDag, StarOrderIsLayered) {
    auto dag = topo::Dag::build(star());
    EXPECT_EQ(dag.num_queues(), 6u);
    EXPECT_EQ(names(dag, dag.topo_order()),
              (std::vector<std::string>{"a_up", "b_up", "r_up", "r_down", "a_down", "b_down"}));
    EXPECT_TRUE(dag.has_link(dag.queue("a", Direction::up), dag.queue("r", Direction::up)));
    EXPECT_TRUE(dag.has_link(dag.queue("a", Direction::up), dag.queue("r", Direction::down)));
    EXPECT_TRUE(dag.has_link(dag.queue("r", Direction::down), dag.queue("b", Direction::down)));
    EXPECT_FALSE(dag.has_link(dag.queue("r", Direction::down), dag.queue("a", Direction::up)));
    EXPECT_EQ(dag.links().size(), 6u);
}

TEST(BuildDag, LinksGoForward) {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        auto dag = topo::Dag::build(random_tree(rng, 1 + rep % 12));
        for (auto [u, v] : dag.links()) {
            EXPECT_LT(dag.position(u), dag.position(v));
        }
    }
}

TEST(BuildDag, Rejections) {
    EXPECT_THROW(topo::Dag::build({{"a", "b"}, {{"a", "b"}, {"b", "a"}}, "a"}), MalformedTree);
    EXPECT_THROW(topo::Dag::build({{"r", "a", "b"}, {{"a", "r"}}, "r"}), MalformedTree);  // b is a second root
    EXPECT_THROW(topo::Dag::build({{"r", "a"}, {{"a", "x"}}, "r"}), MalformedTree);
    EXPECT_THROW(topo::Dag::build({{"r", "a"}, {{"a", "r"}, {"r", "a"}}, "r"}), MalformedTree);
}

TEST(MakeRoute, LeafToLeafThroughRoot) {
    auto dag = topo::Dag::build(star());
    auto r = topo::make_route(dag, "a", "b");
    EXPECT_EQ(names(dag, r.queue_path), (std::vector<std::string>{"a_up", "r_down"}));
    EXPECT_EQ(r.hop_count(), 2u);
}

TEST(MakeRoute, LeafToAncestor) {
    auto dag = topo::Dag::build(lopsided());
    EXPECT_EQ(names(dag, topo::make_route(dag, "a", "r").queue_path), (std::vector<std::string>{"a_up", "m_up"}));
    EXPECT_EQ(names(dag, topo::make_route(dag, "a", "m").queue_path), (std::vector<std::string>{"a_up"}));
    EXPECT_EQ(names(dag, topo::make_route(dag, "r", "a").queue_path),
              (std::vector<std::string>{"r_down", "m_down"}));
    EXPECT_EQ(names(dag, topo::make_route(dag, "a", "b").queue_path),
              (std::vector<std::string>{"a_up", "m_up", "r_down"}));
    EXPECT_EQ(names(dag, topo::make_route(dag, "b", "a").queue_path),
              (std::vector<std::string>{"b_up", "r_down", "m_down"}));
}

TEST(MakeRoute, SameEndpointsRejected) {
    auto dag = topo::Dag::build(star());
    EXPECT_THROW(topo::make_route(dag, "a", "a"), ConfigError);
    EXPECT_THROW(topo::make_route(dag, "a", "zz"), ConfigError);
}

TEST(MakeRoute, RandomRoutesRespectOrder) {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        const auto spec = random_tree(rng, 2 + rep % 10);
        auto dag = topo::Dag::build(spec);
        std::vector<topo::Route> routes;
        for (const auto& s : spec.nodes) {
            for (const auto& d : spec.nodes) {
                if (s != d) {
                    routes.push_back(topo::make_route(dag, s, d, routes.size()));
                }
            }
        }
        topo::RoutingMatrix a(dag.num_queues(), routes);
        for (const auto& r : routes) {
            ASSERT_GE(r.hop_count(), 1u);
            for (std::size_t h = 0; h + 1 < r.queue_path.size(); ++h) {
                EXPECT_TRUE(dag.has_link(r.queue_path[h], r.queue_path[h + 1]));
                EXPECT_LT(dag.position(r.queue_path[h]), dag.position(r.queue_path[h + 1]));
            }
            for (QueueId v = 0; v < dag.num_queues(); ++v) {
                EXPECT_EQ(a.at(v, r.id), r.contains(v) ? 1 : 0);
            }
        }
    }
}

TEST(ComputeLoads, Examples) {
    const std::vector<topo::Route> single{{0, {0}}};
    const std::vector<FlowType> one{{0, 1.0, 0.5}};
    auto p = topo::compute_loads(1, single, one);
    EXPECT_DOUBLE_EQ(p.f[0], 0.5);
    EXPECT_DOUBLE_EQ(p.alpha[0], 0.5);
    EXPECT_DOUBLE_EQ(p.rho[0], 0.5);

    const std::vector<topo::Route> shared{{0, {0}}, {1, {0, 1}}};
    const std::vector<FlowType> two{{0, 1.0, 0.3}, {1, 3.0, 0.1}};
    EXPECT_NEAR(topo::compute_loads(2, shared, two).f[0], 0.6, 1e-15);

    const std::vector<topo::Route> path{{0, {0, 1, 2}}};
    const std::vector<topo::Route> pieces{{0, {0}}, {1, {1}}, {2, {2}}, {3, {0, 1, 2}}};
    const std::vector<FlowType> loads{{0, 1.0, 0.2}, {1, 1.0, 0.7}, {2, 1.0, 0.5}, {3, 1.0, 0.0}};
    EXPECT_DOUBLE_EQ(topo::compute_loads(3, pieces, loads).rho[3], 0.7);
}

TEST(ComputeLoads, Admissibility) {
    const std::vector<topo::Route> routes{{0, {0}}, {1, {1}}};
    EXPECT_TRUE(topo::is_admissible(topo::compute_loads(2, routes, std::vector<FlowType>{{0, 1, 0.9}, {1, 1, 0.9}})));
    EXPECT_FALSE(topo::is_admissible(topo::compute_loads(2, routes, std::vector<FlowType>{{0, 1, 0.9}, {1, 1, 1.0}})));
    EXPECT_TRUE(topo::is_admissible(topo::compute_loads(2, routes, std::vector<FlowType>{})));
}

TEST(ComputeLoads, LinearInRates) {
    const std::vector<topo::Route> routes{{0, {0, 1}}, {1, {1, 2}}};
    std::vector<FlowType> types{{0, 1.5, 0.1}, {1, 0.5, 0.4}, {0, 2.0, 0.05}};
    const auto base = topo::compute_loads(3, routes, types);
    for (auto& t : types) {
        t.rate *= 1.7;
    }
    const auto scaled = topo::compute_loads(3, routes, types);
    for (std::size_t v = 0; v < 3; ++v) {
        EXPECT_NEAR(scaled.f[v], 1.7 * base.f[v], 1e-14);
    }
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(scaled.alpha[j], 1.7 * base.alpha[j], 1e-14);
    }
}
