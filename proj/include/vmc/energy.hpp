#pragma once

#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>

#include "vmc/types.hpp"

namespace vmc {

inline constexpr double kJoulesPerWh = 3600.0;
inline constexpr double kJoulesPerKWh = 3.6e6;

struct PowerSample {
    Slot slot = 0;
    PmId pm_id = 0;
    double watts = 0.0;
};

/// Linear server power: p_min + (p_max - p_min) * u for an active PM.
[[nodiscard]] inline double power(const PmSpec& spec, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::out_of_range("utilization " + std::to_string(u) + " outside [0, 1]");
    }
    return spec.p_min + (spec.p_max - spec.p_min) * u;
}

/// Per-slot utilization of one PM; utilization is constant inside a slot.
struct UtilizationSample {
    Slot slot = 0;
    double utilization = 0.0;
};

/// Sum over slots of power(u) * slot length, in joules.
[[nodiscard]] inline double energy_integral(std::span<const UtilizationSample> trace, const PmSpec& spec,
                                            double slot_seconds) {
    if (trace.empty()) throw std::invalid_argument("energy_integral: empty trace");
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].slot != trace[i - 1].slot + 1) {
            throw std::invalid_argument("energy_integral: trace slots are not contiguous");
        }
    }
    double joules = 0.0;
    for (const auto& s : trace) joules += power(spec, s.utilization) * slot_seconds;
    return joules;
}

/// Energy added by a VM that raises utilization by `u_increase` for `seconds`.
[[nodiscard]] inline double vm_energy_increment(const PmSpec& spec, double u_increase, double seconds) {
    if (seconds < 0.0) throw std::invalid_argument("vm_energy_increment: negative duration");
    if (!(u_increase >= 0.0 && u_increase <= 1.0)) {
        throw std::out_of_range("vm_energy_increment: utilization increase outside [0, 1]");
    }
    return (spec.p_max - spec.p_min) * u_increase * seconds;
}

/// @brief Energy bookkeeping for a run.
///
/// Tracks each PM's total energy alongside its decomposition into a power-on
/// term (p_min for every active second) and one increment per hosted VM. The
/// two views agree whenever utilization is piecewise-constant per slot.
/// Parked PMs draw p_sleep, booked separately.
class EnergyLedger {
public:
    /// Books one slot for an active PM. `hosted` maps VM id to demand.
    void add_active_slot(const PmSpec& spec, const std::map<VmId, CpuUnits>& hosted, double seconds) {
        CpuUnits load = 0;
        for (const auto& [vm, d] : hosted) {
            load += d;
            const double u_ij = static_cast<double>(d) / static_cast<double>(spec.capacity);
            per_vm_increment_[{spec.id, vm}] += vm_energy_increment(spec, u_ij, seconds);
        }
        const double u = static_cast<double>(load) / static_cast<double>(spec.capacity);
        per_pm_energy_[spec.id] += power(spec, u) * seconds;
        on_energy_[spec.id] += spec.p_min * seconds;
        on_seconds_[spec.id] += seconds;
    }

    void add_sleeping_slot(const PmSpec& spec, double seconds) {
        if (spec.p_sleep == 0.0) return;
        per_pm_energy_[spec.id] += spec.p_sleep * seconds;
        sleep_energy_[spec.id] += spec.p_sleep * seconds;
    }

    [[nodiscard]] const std::map<PmId, double>& per_pm_energy() const noexcept { return per_pm_energy_; }
    [[nodiscard]] const std::map<std::pair<PmId, VmId>, double>& per_vm_increment() const noexcept {
        return per_vm_increment_;
    }
    [[nodiscard]] const std::map<PmId, double>& on_energy() const noexcept { return on_energy_; }
    [[nodiscard]] const std::map<PmId, double>& sleep_energy() const noexcept { return sleep_energy_; }
    /// Power-on time per PM (seconds).
    [[nodiscard]] const std::map<PmId, double>& on_seconds() const noexcept { return on_seconds_; }

    [[nodiscard]] double pm_energy(PmId pm) const { return lookup(per_pm_energy_, pm); }
    [[nodiscard]] double pm_on_energy(PmId pm) const { return lookup(on_energy_, pm); }
    [[nodiscard]] double pm_sleep_energy(PmId pm) const { return lookup(sleep_energy_, pm); }

    /// Sum of the VM increments booked against `pm`.
    [[nodiscard]] double pm_increment_energy(PmId pm) const {
        double sum = 0.0;
        for (auto it = per_vm_increment_.lower_bound({pm, std::numeric_limits<VmId>::min()});
             it != per_vm_increment_.end() && it->first.first == pm; ++it) {
            sum += it->second;
        }
        return sum;
    }

private:
    static double lookup(const std::map<PmId, double>& m, PmId pm) {
        auto it = m.find(pm);
        return it == m.end() ? 0.0 : it->second;
    }

    std::map<PmId, double> per_pm_energy_;
    std::map<std::pair<PmId, VmId>, double> per_vm_increment_;
    std::map<PmId, double> on_energy_;
    std::map<PmId, double> sleep_energy_;
    std::map<PmId, double> on_seconds_;
};

/// Datacenter energy: sum of every PM's energy, in joules.
[[nodiscard]] inline double datacenter_energy(const EnergyLedger& ledger) {
    double total = 0.0;
    for (const auto& [pm, j] : ledger.per_pm_energy()) total += j;
    return total;
}

}  // namespace vmc
