#include <gtest/gtest.h>

#include <cmath>

#include "sfasim/bandwidth_net.hpp"
#include "sfasim/flow_gen.hpp"
#include "sfasim/metrics.hpp"

using namespace sfasim;

namespace {

nb::NbEngine single_resource(std::vector<double> sizes) {
    sfa::BandwidthNetworkSpec spec{{1.0}, {std::vector<double>(sizes.size(), 1.0)}};
    return nb::NbEngine(spec, std::move(sizes));
}

}  // namespace

TEST(NbEngine, LoneFlowTakesItsSize) {
    auto e = single_resource({1.0});
    e.arrive(0.0, 0, 0);
    const auto d = e.depart();
    EXPECT_DOUBLE_EQ(d.time, 1.0);
    EXPECT_EQ(d.flow.uid, 0u);
    EXPECT_NEAR(d.flow.served, 1.0, 1e-12);
}

TEST(NbEngine, SharedResourceHalvesRates) {
    auto e = single_resource({1.0, 1.0});
    e.arrive(0.0, 0, 0);
    e.arrive(0.0, 1, 1);
    EXPECT_DOUBLE_EQ(e.state().rates.phi[0], 0.5);
    const auto a = e.depart();
    const auto b = e.depart();
    EXPECT_DOUBLE_EQ(a.time, 2.0);
    EXPECT_DOUBLE_EQ(b.time, 2.0);
    EXPECT_EQ(a.flow.uid, 0u);  // tie goes to the lower uid
    EXPECT_EQ(b.flow.uid, 1u);
}

TEST(NbEngine, ArrivalOnlySchedulesNothingEarly) {
    auto e = single_resource({3.0});
    EXPECT_FALSE(e.next_departure());
    e.arrive(1.0, 0, 0);
    EXPECT_EQ(e.state().n[0], 1);
    EXPECT_DOUBLE_EQ(e.next_departure()->time, 4.0);
}

TEST(NbEngine, EqualShareWithinAClass) {
    // two flows on one route with rate 1: each gets 1/2
    auto e = single_resource({2.0});
    e.arrive(0.0, 0, 0);
    e.advance(1.0);  // remaining 1
    e.arrive(1.0, 0, 1);
    const auto d = e.next_departure();
    EXPECT_DOUBLE_EQ(d->time, 3.0);
    EXPECT_EQ(d->flow.uid, 0u);
}

TEST(NbEngine, QuarterRate) {
    // remaining 0.5 at rate 0.25 takes 2
    sfa::BandwidthNetworkSpec spec{{1.0}, {{1.0, 1.0, 1.0, 1.0}}};
    nb::NbEngine e(spec, {0.5, 9.0, 9.0, 9.0});
    for (TypeId c = 0; c < 4; ++c) {
        e.arrive(0.0, c, c);
    }
    EXPECT_DOUBLE_EQ(e.next_departure()->time, 2.0);
}

TEST(Emulation, LoneFlowOnTwoHops) {
    const std::vector<topo::Route> routes{{0, {0, 1}}};
    const std::vector<FlowType> types{{0, 1.0, 0.1}};
    flowgen::ArrivalStream s{10.0, 0, {{3.0, 0, 0, 3.0, false}}};
    const auto r = nb::run_emulation(s, types, routes, 2);
    ASSERT_EQ(r.injections.size(), 1u);
    EXPECT_DOUBLE_EQ(r.injections[0].t_inject, 5.0);
}

TEST(Emulation, TinyFlowsBarelyWait) {
    const std::vector<topo::Route> routes{{0, {0}}};
    const std::vector<FlowType> types{{0, 1e-9, 0.1}};
    flowgen::ArrivalStream s{10.0, 0, {{3.0, 0, 0, 3.0, false}}};
    const auto r = nb::run_emulation(s, types, routes, 1);
    EXPECT_NEAR(r.injections[0].t_inject - r.injections[0].t_arrive, 0.0, 1e-8);
}

TEST(Emulation, RefusesOverload) {
    const std::vector<topo::Route> routes{{0, {0}}};
    const std::vector<FlowType> types{{0, 1.0, 1.0}};
    EXPECT_THROW(nb::run_emulation(flowgen::ArrivalStream{1.0, 0, {}}, types, routes, 1), StabilityViolation);
}

TEST(Emulation, EmptyRunHasNoDepartures) {
    const std::vector<topo::Route> routes{{0, {0}}};
    const std::vector<FlowType> types{{0, 1.0, 0.5}};
    const auto r = nb::run_emulation(flowgen::ArrivalStream{1.0, 0, {}}, types, routes, 1);
    EXPECT_TRUE(nb::departure_process(r, 0, 0.0, 1.0).empty());
}

TEST(Emulation, WaitEqualsVirtualSojournAndRatesStayFeasible) {
    const std::vector<topo::Route> routes{{0, {0, 1}}, {1, {1, 2}}};
    const std::vector<FlowType> types{{0, 1.0, 0.2}, {1, 2.0, 0.15}, {0, 0.5, 0.3}};
    const auto s = flowgen::gen_poisson(types, 5000.0, 2);
    const auto r = nb::run_emulation(s, types, routes, 3);
    EXPECT_LE(r.max_utilisation, 1.0 + 1e-9);
    ASSERT_EQ(r.departures.size(), s.events.size());
    for (const auto& d : r.departures) {
        const auto& inj = r.injections[d.flow.uid];
        EXPECT_EQ(inj.t_inject, d.time);
        EXPECT_EQ(inj.t_inject - inj.t_arrive, d.time - d.flow.entered);
        EXPECT_NEAR(d.flow.served, types[d.flow.cls].size, 1e-6 * types[d.flow.cls].size);
    }
}

TEST(Emulation, MeanWaitOnTwoHalfLoadedQueues) {
    const std::vector<topo::Route> routes{{0, {0, 1}}};
    const std::vector<FlowType> types{{0, 1.0, 0.5}};
    const auto s = flowgen::gen_poisson(types, 2e5, 31);
    nb::EmulationOptions opt;
    opt.max_total = 512;
    const auto r = nb::run_emulation(s, types, routes, 2, opt);
    double sum = 0;
    std::size_t n = 0;
    for (const auto& inj : r.injections) {
        if (inj.t_arrive > 4e4) {
            sum += inj.t_inject - inj.t_arrive;
            ++n;
        }
    }
    EXPECT_NEAR(sum / n, 4.0, 0.2);
}

TEST(Emulation, OccupancyMatchesClosedFormAtModerateLoad) {
    const std::vector<topo::Route> routes{{0, {0}}, {1, {0, 1}}};
    const std::vector<FlowType> types{{0, 1.0, 0.3}, {1, 1.0, 0.3}};
    const auto s = flowgen::gen_poisson(types, 2e5, 13);
    nb::EmulationOptions opt;
    opt.max_total = 256;
    opt.stats_from = 2e4;
    opt.stats_to = 2e5;
    const auto r = nb::run_emulation(s, types, routes, 2, opt);
    const auto spec = nb::NbEngine::for_types(types, routes).spec();
    const auto expect = sfa::expected_occupancy(spec, std::vector<double>{0.3, 0.3});
    EXPECT_NEAR(r.mean_occupancy[0], expect[0], 0.05 * expect[0]);
    EXPECT_NEAR(r.mean_occupancy[1], expect[1], 0.05 * expect[1]);
}

TEST(Emulation, DeparturesLookPoisson) {
    const std::vector<topo::Route> routes{{0, {0}}, {1, {0}}};
    const std::vector<FlowType> types{{0, 1.0, 0.3}, {1, 2.0, 0.15}};
    const auto s = flowgen::gen_poisson(types, 4e5, 6);
    nb::EmulationOptions opt;
    opt.max_total = 256;
    const auto r = nb::run_emulation(s, types, routes, 1, opt);
    const auto d0 = nb::departure_process(r, 0, 4e4, 4e5);
    const auto rep = metrics::test_poisson(d0, 0.3);
    EXPECT_FALSE(rep.inconclusive);
    EXPECT_NEAR(rep.mean_ratio, 1.0, 0.02);
    EXPECT_NEAR(rep.cv2, 1.0, 0.05);
    const auto d1 = nb::departure_process(r, 1, 4e4, 4e5);
    EXPECT_LE(std::abs(metrics::window_count_correlation(d0, d1, 4e4, 4e5, 100.0)), 0.05);
}
