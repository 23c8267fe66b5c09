#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vmc/energy.hpp"
#include "vmc/kernel.hpp"

namespace vmc {

/// Run-level metrics: utilization of powered-on PMs, active-server count,
/// total energy and migration count.
struct MetricsReport {
    double mean_active_utilization = 0.0;  ///< Over all (slot, active PM) samples.
    double p50_active_utilization = 0.0;
    double p95_active_utilization = 0.0;
    std::vector<int> active_pms;  ///< Active-server count per slot.
    double mean_active_pms = 0.0;
    double mean_active_fraction = 0.0;
    int peak_active_pms = 0;
    double total_kwh = 0.0;
    std::size_t migrations = 0;
    std::size_t aborted_migrations = 0;
    std::size_t rejected = 0;
    std::size_t wakes = 0;
};

namespace detail {

/// Nearest-rank percentile of an ascending sample.
inline double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace detail

[[nodiscard]] inline MetricsReport metrics_of(const SimTrace& trace, const EnergyLedger& ledger) {
    MetricsReport m;
    std::vector<double> samples;
    for (std::size_t s = 0; s < trace.utilization.size(); ++s) {
        int count = 0;
        for (std::size_t i = 0; i < trace.utilization[s].size(); ++i) {
            if (!trace.active[s][i]) continue;
            ++count;
            samples.push_back(trace.utilization[s][i]);
        }
        m.active_pms.push_back(count);
        m.peak_active_pms = std::max(m.peak_active_pms, count);
    }
    if (!samples.empty()) {
        double sum = 0.0;
        for (double u : samples) sum += u;
        m.mean_active_utilization = sum / static_cast<double>(samples.size());
        std::sort(samples.begin(), samples.end());
        m.p50_active_utilization = detail::percentile(samples, 0.50);
        m.p95_active_utilization = detail::percentile(samples, 0.95);
    }
    if (!m.active_pms.empty()) {
        double sum = 0.0;
        for (int c : m.active_pms) sum += c;
        m.mean_active_pms = sum / static_cast<double>(m.active_pms.size());
        if (!trace.fleet.empty()) m.mean_active_fraction = m.mean_active_pms / static_cast<double>(trace.fleet.size());
    }
    m.total_kwh = datacenter_energy(ledger) / kJoulesPerKWh;
    for (const auto& e : trace.events) {
        switch (e.kind) {
        case EventKind::Migrate: ++m.migrations; break;
        case EventKind::Abort: ++m.aborted_migrations; break;
        case EventKind::Reject: ++m.rejected; break;
        case EventKind::Wake: ++m.wakes; break;
        default: break;
        }
    }
    return m;
}

}  // namespace vmc
