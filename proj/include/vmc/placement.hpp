#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "vmc/types.hpp"

namespace vmc {

/// Where a request landed: index into the fleet, and whether that PM had to be woken.
struct Placement {
    std::size_t pm_index = 0;
    bool woke = false;
};

/// Extra constraints used when re-placing a migrating VM.
struct PlacementLimits {
    std::optional<std::size_t> exclude;  ///< Source PM index.
    bool allow_wake = true;
    /// Destination utilization after placement must stay strictly below this.
    double post_below = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool admits(std::span<const PmState> fleet, std::size_t i, CpuUnits demand) const {
        if (exclude && *exclude == i) return false;
        const PmState& pm = fleet[i];
        return pm.fits(demand) && pm.utilization_with(demand) < post_below;
    }
};

struct Move {
    VmId vm = 0;
    PmId src = 0;
    PmId dst = 0;
    CpuUnits demand = 0;
    bool woke_dst = false;
};

struct AbortedMove {
    VmId vm = 0;
    PmId src = 0;
};

/// Outcome of one migration round, computed against a fleet snapshot and
/// applied by the kernel in order: moves, then parks.
struct MigrationPlan {
    std::vector<Move> moves;
    std::vector<AbortedMove> aborted;
    std::vector<PmId> parked;

    [[nodiscard]] std::vector<PmId> sources() const {
        std::vector<PmId> out;
        for (const auto& m : moves) {
            if (std::find(out.begin(), out.end(), m.src) == out.end()) out.push_back(m.src);
        }
        return out;
    }
};

/// Lowest-id sleeping PM that can take `demand` under `limits`.
[[nodiscard]] inline std::optional<Placement> wake_candidate(std::span<const PmState> fleet, CpuUnits demand,
                                                             const PlacementLimits& limits = {}) {
    if (!limits.allow_wake) return std::nullopt;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        if (!fleet[i].active() && limits.admits(fleet, i, demand)) return Placement{i, true};
    }
    return std::nullopt;
}

/// @brief Smallest hosted VM whose removal alone brings utilization under `bound`.
///
/// With `strict` the post-removal utilization must be < bound, otherwise <=.
/// Ties go to the lowest VM id. Returns nullopt when no single VM suffices.
[[nodiscard]] inline std::optional<VmId> select_overload_victim(const PmState& pm, double bound, bool strict) {
    std::optional<VmId> best;
    CpuUnits best_demand = 0;
    for (const auto& [vm, d] : pm.hosted()) {
        const double after = pm.utilization_with(-d);
        const bool ok = strict ? after < bound : after <= bound;
        if (ok && (!best || d < best_demand)) {
            best = vm;
            best_demand = d;
        }
    }
    return best;
}

/// Hosted VMs of `pm`, largest demand first, ties by VM id.
[[nodiscard]] inline std::vector<std::pair<VmId, CpuUnits>> largest_first(const PmState& pm) {
    std::vector<std::pair<VmId, CpuUnits>> vms(pm.hosted().begin(), pm.hosted().end());
    std::stable_sort(vms.begin(), vms.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return vms;
}

/// Index of the PM with `id` in an id-ordered fleet.
[[nodiscard]] inline std::size_t index_of(std::span<const PmState> fleet, PmId id) {
    auto it = std::lower_bound(fleet.begin(), fleet.end(), id,
                               [](const PmState& pm, PmId v) { return pm.id() < v; });
    if (it == fleet.end() || it->id() != id) throw std::out_of_range("unknown PM id " + std::to_string(id));
    return static_cast<std::size_t>(it - fleet.begin());
}

}  // namespace vmc
