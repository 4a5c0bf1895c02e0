#include "sfasim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sfasim::metrics {

namespace {

struct Accumulator {
    std::size_t n = 0;
    double dw = 0.0, ds = 0.0, d = 0.0, dc = 0.0, dr = 0.0;
};

std::optional<double> mean_of(double sum, std::size_t n) {
    if (n == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(n);
}

}  // namespace

std::vector<TypeStats> summarize(const dt::DelayLedger& ledger, const topo::LoadProfile& profile,
                                 std::span<const topo::Route> routes, const ct::EpsilonConfig& eps,
                                 double burn_in_time) {
    const auto oracle_ds = ct::ct_delay_oracle(eps, profile, routes);
    const auto bound_dw = dt::wait_bound(profile, routes);
    const auto bound_ds = dt::dt_delay_bound(eps, profile, routes);

    // Sum in uid order whatever order the rows come in.
    std::vector<const dt::FlowLedger*> rows;
    rows.reserve(ledger.flows.size());
    for (const auto& fl : ledger.flows) {
        if (!fl.dummy && fl.t_arrive >= burn_in_time && fl.packets_delivered > 0) {
            rows.push_back(&fl);
        }
    }
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->uid < b->uid; });
    std::vector<Accumulator> acc(profile.types.size());
    for (const auto* fl : rows) {
        auto& a = acc[fl->type];
        ++a.n;
        a.dw += fl->d_w;
        a.ds += fl->d_s;
        a.d += fl->d;
        a.dc += fl->d_c;
        a.dr += fl->d_r;
    }

    std::vector<TypeStats> out;
    for (std::size_t t = 0; t < profile.types.size(); ++t) {
        const auto& type = profile.types[t];
        TypeStats s;
        s.type = t;
        s.route = type.route;
        s.size = type.size;
        s.rate = type.rate;
        s.hops = routes[type.route].hop_count();
        s.count = acc[t].n;
        s.mean_dw = mean_of(acc[t].dw, acc[t].n);
        s.mean_ds = mean_of(acc[t].ds, acc[t].n);
        s.mean_d = mean_of(acc[t].d, acc[t].n);
        s.mean_dc = mean_of(acc[t].dc, acc[t].n);
        s.mean_dr = mean_of(acc[t].dr, acc[t].n);
        for (QueueId v : routes[type.route].queue_path) {
            s.oracle_dw += type.size / (1.0 - profile.f[v]);
        }
        s.oracle_ds = oracle_ds[t];
        s.bound_dw = bound_dw[t];
        s.bound_ds = bound_ds[t];
        s.bound_d = bound_dw[t] + bound_ds[t];
        out.push_back(s);
    }
    return out;
}

bool PoissonReport::consistent(double mean_tol, double cv2_tol, double dispersion_tol) const {
    return !inconclusive && std::abs(mean_ratio - 1.0) <= mean_tol && std::abs(cv2 - 1.0) <= cv2_tol &&
           std::abs(dispersion - 1.0) <= dispersion_tol;
}

PoissonReport test_poisson(std::span<const double> times, double rate) {
    PoissonReport r;
    if (times.size() < 2 || !(rate > 0)) {
        return r;
    }
    r.samples = times.size() - 1;
    double sum = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        sum += times[i] - times[i - 1];
    }
    const double mean = sum / static_cast<double>(r.samples);
    double ss = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double g = times[i] - times[i - 1] - mean;
        ss += g * g;
    }
    const double var = ss / static_cast<double>(r.samples);
    r.mean_ratio = mean * rate;
    r.cv2 = mean > 0 ? var / (mean * mean) : 0.0;

    const double window = 10.0 / rate;
    const double from = times.front();
    const auto windows = static_cast<std::size_t>((times.back() - from) / window);
    if (windows >= 2) {
        std::vector<double> counts(windows, 0.0);
        for (double t : times) {
            const auto w = static_cast<std::size_t>((t - from) / window);
            if (w < windows) {
                counts[w] += 1.0;
            }
        }
        const double cm = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(windows);
        double cv = 0.0;
        for (double c : counts) {
            cv += (c - cm) * (c - cm);
        }
        cv /= static_cast<double>(windows - 1);
        r.dispersion = cm > 0 ? cv / cm : 0.0;
    }
    r.inconclusive = r.samples < poisson_min_samples;
    return r;
}

double window_count_correlation(std::span<const double> a, std::span<const double> b, double from, double to,
                                double window) {
    const auto windows = static_cast<std::size_t>((to - from) / window);
    if (windows < 2) {
        return 0.0;
    }
    auto bin = [&](std::span<const double> ts) {
        std::vector<double> c(windows, 0.0);
        for (double t : ts) {
            if (t < from) {
                continue;
            }
            const auto w = static_cast<std::size_t>((t - from) / window);
            if (w < windows) {
                c[w] += 1.0;
            }
        }
        return c;
    };
    const auto ca = bin(a);
    const auto cb = bin(b);
    const double n = static_cast<double>(windows);
    const double ma = std::accumulate(ca.begin(), ca.end(), 0.0) / n;
    const double mb = std::accumulate(cb.begin(), cb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t w = 0; w < windows; ++w) {
        sab += (ca[w] - ma) * (cb[w] - mb);
        saa += (ca[w] - ma) * (ca[w] - ma);
        sbb += (cb[w] - mb) * (cb[w] - mb);
    }
    if (saa == 0 || sbb == 0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

DistributionComparison compare_distribution(const std::map<sfa::Occupancy, double>& histogram,
                                            sfa::StationaryLaw& law, int cap) {
    DistributionComparison cmp;
    const std::size_t dims = law.alpha().size();

    std::map<sfa::Occupancy, double> analytic;
    sfa::Occupancy n(dims, 0);
    // Walk every n with sum n <= cap, odometer style.
    while (true) {
        const double p = law.pi(n);
        analytic[n] = p;
        cmp.analytic_mass += p;
        std::size_t i = 0;
        for (; i < dims; ++i) {
            ++n[i];
            if (std::accumulate(n.begin(), n.end(), 0) <= cap) {
                break;
            }
            n[i] = 0;
        }
        if (i == dims) {
            break;
        }
    }

    double empirical_total = 0.0;
    double empirical_in = 0.0;
    for (const auto& [state, w] : histogram) {
        empirical_total += w;
        if (std::accumulate(state.begin(), state.end(), 0) <= cap) {
            empirical_in += w;
        }
    }
    cmp.empirical_mass = empirical_total > 0 ? empirical_in / empirical_total : 0.0;
    cmp.warning = cmp.analytic_mass < 0.8;

    double tv = 0.0;
    for (const auto& [state, p] : analytic) {
        double q = 0.0;
        if (auto it = histogram.find(state); it != histogram.end() && empirical_in > 0) {
            q = it->second / empirical_in;
        }
        tv += std::abs(p / cmp.analytic_mass - q);
    }
    cmp.tv = 0.5 * tv;
    return cmp;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{:.10g}", *v) : std::string("NA"); }

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const TypeStats> stats, const std::string& tool_version) {
    fmt::print(out, "# sfasim-summary v1 sfasim {}\n", tool_version);
    out << "type,route,size,rate,hops,count,mean_DW,mean_DS,mean_D,mean_DC,mean_DR,oracle_DW,oracle_DS,bound_DW,bound_DS,"
           "bound_D,within_bound\n";
    for (const auto& s : stats) {
        fmt::print(out, "{},{},{:.10g},{:.10g},{},{},{},{},{},{},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{}\n",
                   s.type, s.route, s.size, s.rate, s.hops, s.count, cell(s.mean_dw), cell(s.mean_ds), cell(s.mean_d),
                   cell(s.mean_dc), cell(s.mean_dr), s.oracle_dw, s.oracle_ds, s.bound_dw, s.bound_ds, s.bound_d,
                   s.within_bound() ? 1 : 0);
    }
}

void write_summary_text(std::ostream& out, std::span<const TypeStats> stats) {
    fmt::print(out, "{:>4} {:>5} {:>6} {:>8} {:>4} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>4}\n",
               "type", "route", "size", "rate", "hops", "count", "mean_DW", "oracle_DW", "mean_DS", "oracle_DS",
               "mean_D", "mean_DR", "bound_D", "ok");
    for (const auto& s : stats) {
        fmt::print(out,
                   "{:>4} {:>5} {:>6.3g} {:>8.4g} {:>4} {:>8} {:>10.10} {:>10.5g} {:>10.10} {:>10.5g} {:>10.10} {:>10.10} "
                   "{:>10.5g} {:>4}\n",
                   s.type, s.route, s.size, s.rate, s.hops, s.count, cell(s.mean_dw), s.oracle_dw, cell(s.mean_ds),
                   s.oracle_ds, cell(s.mean_d), cell(s.mean_dr), s.bound_d, s.within_bound() ? "yes" : "NO");
    }
}

}  // namespace sfasim::metrics
