#include <benchmark/benchmark.h>

#include "sfasim/bandwidth_net.hpp"
#include "sfasim/ct_network.hpp"
#include "sfasim/dt_network.hpp"
#include "sfasim/flow_gen.hpp"
#include "sfasim/sfa.hpp"

using namespace sfasim;

namespace {

// three resources, four routes with overlapping usage
sfa::BandwidthNetworkSpec mesh() {
    return {{1.0, 1.5, 2.0}, {{1, 1, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}}};
}

void BM_PhiColdCache(benchmark::State& state) {
    const int total = static_cast<int>(state.range(0));
    const sfa::Occupancy n{total / 4, total / 4, total / 4, total - 3 * (total / 4)};
    sfa::SfaModel m(mesh(), 256);
    for (auto _ : state) {
        m.clear_cache();
        benchmark::DoNotOptimize(m.phi_rate(n));
    }
}
BENCHMARK(BM_PhiColdCache)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

struct Chain {
    std::vector<FlowType> types{{0, 1.0, 0.3}, {0, 2.0, 0.2}};
    std::vector<topo::Route> routes{{0, {0, 1}}};
};

void BM_VirtualNetwork(benchmark::State& state) {
    Chain c;
    const auto stream = flowgen::gen_poisson(c.types, static_cast<double>(state.range(0)), 3);
    nb::EmulationOptions opt;
    opt.max_total = 1024;
    for (auto _ : state) {
        benchmark::DoNotOptimize(nb::run_emulation(stream, c.types, c.routes, 2, opt));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.events.size()));
}
BENCHMARK(BM_VirtualNetwork)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SlotEngine(benchmark::State& state) {
    Chain c;
    const auto profile = topo::compute_loads(2, c.routes, c.types);
    const auto eps = ct::choose_epsilon(profile, c.routes, 2.0);
    nb::EmulationOptions opt;
    opt.max_total = 1024;
    const auto nbr =
        nb::run_emulation(flowgen::gen_poisson(c.types, static_cast<double>(state.range(0)), 5), c.types, c.routes, 2, opt);
    const auto ctr = ct::run_ct(nbr.injections, c.types, c.routes, eps);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dt::run_dt(ctr, nbr.injections, c.types, eps, 2));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * nbr.injections.size()));
}
BENCHMARK(BM_SlotEngine)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
