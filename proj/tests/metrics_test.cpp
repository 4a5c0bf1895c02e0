#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pipeline_support.hpp"
#include "sfasim/metrics.hpp"

using namespace sfasim;
using namespace testing_support;

namespace {

const std::vector<topo::Route> kRoutes{{0, {0, 1}}, {1, {1}}};
const std::vector<FlowType> kTypes{{0, 1.0, 0.2}, {1, 2.0, 0.1}, {1, 0.5, 0.0}};

}  // namespace

TEST(Summarize, MeansBoundsAndAbsentTypes) {
    const auto l = run_layers(kTypes, kRoutes, 2, 20000.0, 4);
    const auto stats = metrics::summarize(l.ledger, l.profile, kRoutes, l.eps, 4000.0);
    ASSERT_EQ(stats.size(), 3u);
    for (const auto& s : stats) {
        EXPECT_LE(s.oracle_dw, s.bound_dw);
        EXPECT_LE(s.oracle_ds, s.bound_ds);
        EXPECT_DOUBLE_EQ(s.bound_d, s.bound_dw + s.bound_ds);
    }
    EXPECT_GT(stats[0].count, 0u);
    EXPECT_TRUE(stats[0].within_bound());
    EXPECT_TRUE(stats[1].within_bound());
    EXPECT_NEAR(*stats[0].mean_d, *stats[0].mean_dw + *stats[0].mean_ds, 1e-9);
    EXPECT_EQ(stats[2].count, 0u);
    EXPECT_FALSE(stats[2].mean_d.has_value());

    std::size_t expected = 0;
    for (const auto& f : l.ledger.flows) {
        expected += (f.type == 0 && f.t_arrive >= 4000.0) ? 1 : 0;
    }
    EXPECT_EQ(stats[0].count, expected);

    std::ostringstream csv;
    metrics::write_summary_csv(csv, stats, "test");
    EXPECT_NE(csv.str().find(",NA,"), std::string::npos);
}

TEST(Summarize, OracleColumnsIgnoreTheLedger) {
    const auto l = run_layers(kTypes, kRoutes, 2, 2000.0, 4);
    const auto full = metrics::summarize(l.ledger, l.profile, kRoutes, l.eps, 0.0);
    const auto empty = metrics::summarize(dt::DelayLedger{}, l.profile, kRoutes, l.eps, 0.0);
    for (std::size_t t = 0; t < full.size(); ++t) {
        EXPECT_EQ(full[t].oracle_dw, empty[t].oracle_dw);
        EXPECT_EQ(full[t].oracle_ds, empty[t].oracle_ds);
        EXPECT_EQ(full[t].bound_d, empty[t].bound_d);
        EXPECT_FALSE(empty[t].mean_d.has_value());
    }
}

TEST(Summarize, RowOrderDoesNotMatter) {
    const auto l = run_layers(kTypes, kRoutes, 2, 5000.0, 9);
    auto shuffled = l.ledger;
    std::mt19937_64 rng(3);
    std::shuffle(shuffled.flows.begin(), shuffled.flows.end(), rng);
    const auto a = metrics::summarize(l.ledger, l.profile, kRoutes, l.eps, 1000.0);
    const auto b = metrics::summarize(shuffled, l.profile, kRoutes, l.eps, 1000.0);
    for (std::size_t t = 0; t < a.size(); ++t) {
        EXPECT_EQ(a[t].count, b[t].count);
        EXPECT_EQ(a[t].mean_d, b[t].mean_d);
        EXPECT_EQ(a[t].mean_dw, b[t].mean_dw);
    }
}

TEST(TestPoisson, SyntheticPoisson) {
    std::mt19937_64 rng(2);
    std::exponential_distribution<double> gap(2.0);
    std::vector<double> t{0.0};
    for (int i = 0; i < 200000; ++i) {
        t.push_back(t.back() + gap(rng));
    }
    const auto r = metrics::test_poisson(t, 2.0);
    EXPECT_FALSE(r.inconclusive);
    EXPECT_GE(r.cv2, 0.95);
    EXPECT_LE(r.cv2, 1.05);
    EXPECT_TRUE(r.consistent(0.02, 0.05, 0.1));
}

TEST(TestPoisson, DeterministicInputIsRejected) {
    std::vector<double> t;
    for (int i = 0; i < 20000; ++i) {
        t.push_back(0.5 * i);
    }
    const auto r = metrics::test_poisson(t, 2.0);
    EXPECT_NEAR(r.cv2, 0.0, 1e-12);
    EXPECT_NEAR(r.mean_ratio, 1.0, 1e-12);
    EXPECT_FALSE(r.consistent(0.02, 0.05, 0.1));
}

TEST(TestPoisson, FewSamplesAreInconclusive) {
    std::vector<double> t{0.0, 0.3, 1.1, 1.2};
    EXPECT_TRUE(metrics::test_poisson(t, 1.0).inconclusive);
    EXPECT_TRUE(metrics::test_poisson(std::vector<double>{}, 1.0).inconclusive);
}

TEST(WindowCorrelation, IdenticalAndIndependent) {
    std::mt19937_64 rng(6);
    std::exponential_distribution<double> gap(1.0);
    std::vector<double> a{0.0}, b{0.0};
    while (a.back() < 1e5) {
        a.push_back(a.back() + gap(rng));
    }
    while (b.back() < 1e5) {
        b.push_back(b.back() + gap(rng));
    }
    EXPECT_NEAR(metrics::window_count_correlation(a, a, 0, 1e5, 10), 1.0, 1e-12);
    EXPECT_LE(std::abs(metrics::window_count_correlation(a, b, 0, 1e5, 10)), 0.05);
}

TEST(CompareDistribution, LawAgainstItself) {
    sfa::BandwidthNetworkSpec spec{{1.0}, {{1.0, 1.0}}};
    sfa::StationaryLaw law(spec, {0.2, 0.3});
    std::map<sfa::Occupancy, double> hist;
    for (int a = 0; a <= 12; ++a) {
        for (int b = 0; a + b <= 12; ++b) {
            hist[{a, b}] = law.pi({a, b});
        }
    }
    const auto c = metrics::compare_distribution(hist, law, 12);
    EXPECT_NEAR(c.tv, 0.0, 1e-12);
    EXPECT_FALSE(c.warning);
}

TEST(CompareDistribution, NarrowCapWarns) {
    sfa::StationaryLaw law({{1.0}, {{1.0}}}, {0.9});
    std::map<sfa::Occupancy, double> hist{{{0}, 1.0}};
    EXPECT_TRUE(metrics::compare_distribution(hist, law, 5).warning);
}

TEST(CompareDistribution, SimulatedSingleServer) {
    const std::vector<topo::Route> routes{{0, {0}}};
    const std::vector<FlowType> types{{0, 1.0, 0.5}};
    nb::EmulationOptions opt;
    opt.max_total = 256;
    opt.stats_from = 1e4;
    opt.stats_to = 5e5;
    opt.histogram = true;
    const auto r = nb::run_emulation(flowgen::gen_poisson(types, 5e5, 1), types, routes, 1, opt);
    sfa::StationaryLaw law({{1.0}, {{1.0}}}, {0.5});
    const auto c = metrics::compare_distribution(r.histogram, law, 20);
    EXPECT_LE(c.tv, 0.02);
}
