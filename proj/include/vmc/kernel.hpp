#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vmc/energy.hpp"
#include "vmc/policy.hpp"
#include "vmc/random.hpp"
#include "vmc/types.hpp"

namespace vmc {

enum class EventKind { Arrive, Depart, Migrate, Abort, Wake, Sleep, Reject };

[[nodiscard]] inline std::string_view to_string(EventKind k) noexcept {
    switch (k) {
    case EventKind::Arrive: return "arrive";
    case EventKind::Depart: return "depart";
    case EventKind::Migrate: return "migrate";
    case EventKind::Abort: return "abort";
    case EventKind::Wake: return "wake";
    case EventKind::Sleep: return "sleep";
    case EventKind::Reject: return "reject";
    }
    return "?";
}

[[nodiscard]] inline std::optional<EventKind> parse_event_kind(std::string_view s) noexcept {
    for (auto k : {EventKind::Arrive, EventKind::Depart, EventKind::Migrate, EventKind::Abort, EventKind::Wake,
                   EventKind::Sleep, EventKind::Reject}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

/// @brief One entry of the run log.
///
/// Column usage: arrive(vm, dst), depart(vm, src), migrate(vm, src, dst),
/// abort(vm, src), wake(dst), sleep(src), reject(vm). Within a slot the
/// kernel emits departures, arrivals and rejects, the migration round, then
/// wakes and sleeps.
struct SimEvent {
    Slot slot = 0;
    EventKind kind = EventKind::Arrive;
    std::optional<VmId> vm;
    std::optional<PmId> src;
    std::optional<PmId> dst;

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

/// Everything needed to replay and audit a run.
struct SimTrace {
    std::vector<SimEvent> events;
    /// utilization[slot][pm index], sampled after the slot's events.
    std::vector<std::vector<double>> utilization;
    /// active[slot][pm index].
    std::vector<std::vector<std::uint8_t>> active;
    std::uint64_t seed = 0;
    PolicyConfig config{};
    TimeGrid grid{};
    std::vector<PmSpec> fleet;
    std::vector<VmRequest> requests;
};

struct RunResult {
    SimTrace trace;
    EnergyLedger ledger;
};

namespace detail {

inline void check_inputs(std::span<const VmRequest> requests, std::span<const PmSpec> fleet, const TimeGrid& grid) {
    if (grid.slot_count < 1 || !(grid.slot_seconds > 0.0)) throw std::invalid_argument("run: empty time grid");
    CpuUnits max_capacity = 0;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const auto& pm = fleet[i];
        if (pm.capacity <= 0 || !(pm.p_min > 0.0) || !(pm.p_min < pm.p_max) || pm.p_sleep < 0.0) {
            throw std::invalid_argument("run: invalid spec for PM " + std::to_string(pm.id));
        }
        if (i > 0 && !(fleet[i - 1].id < pm.id)) throw std::invalid_argument("run: PM ids must be unique and ascending");
        max_capacity = std::max(max_capacity, pm.capacity);
    }
    for (const auto& r : requests) {
        if (!(0 <= r.start && r.start < r.end && r.end <= grid.slot_count)) {
            throw std::invalid_argument("run: VM " + std::to_string(r.id) + " interval outside the horizon");
        }
        if (r.demand <= 0 || r.demand > max_capacity) {
            throw std::invalid_argument("run: VM " + std::to_string(r.id) + " demand out of range");
        }
    }
}

}  // namespace detail

/// @brief Runs one policy over a request list on the slotted grid.
///
/// Each slot: departures (VMs whose end slot is reached), arrivals in
/// (start, id) order, a migration round every `migration_check_period` slots
/// starting at slot 0, then power-mode changes. Energy for the slot is booked
/// against the state left after those steps. VMs still hosted at the horizon
/// depart at slot `slot_count`. The result is a pure function of the inputs.
[[nodiscard]] inline RunResult run(std::span<const VmRequest> requests, std::span<const PmSpec> fleet_specs,
                                   const ValidatedConfig& validated, const TimeGrid& grid) {
    const PolicyConfig& cfg = validated.get();
    detail::check_inputs(requests, fleet_specs, grid);

    std::vector<VmRequest> sorted(requests.begin(), requests.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const VmRequest& a, const VmRequest& b) { return std::tie(a.start, a.id) < std::tie(b.start, b.id); });
    std::set<VmId> ids;
    for (const auto& r : sorted) {
        if (!ids.insert(r.id).second) throw std::invalid_argument("run: duplicate VM id " + std::to_string(r.id));
    }

    RunResult result;
    SimTrace& trace = result.trace;
    trace.seed = cfg.rng_seed;
    trace.config = cfg;
    trace.grid = grid;
    trace.fleet.assign(fleet_specs.begin(), fleet_specs.end());
    trace.requests = sorted;

    const PowerMode initial = cfg.starts_active() ? PowerMode::Active : PowerMode::Sleeping;
    std::vector<PmState> fleet;
    fleet.reserve(fleet_specs.size());
    for (const auto& spec : fleet_specs) fleet.emplace_back(spec, initial);

    Rng rng(cfg.rng_seed);
    std::map<VmId, std::size_t> host_of;
    std::vector<std::vector<VmId>> departures(static_cast<std::size_t>(grid.slot_count) + 1);
    for (const auto& r : sorted) departures[static_cast<std::size_t>(r.end)].push_back(r.id);
    for (auto& d : departures) std::sort(d.begin(), d.end());

    auto depart = [&](Slot s) {
        for (VmId vm : departures[static_cast<std::size_t>(s)]) {
            auto it = host_of.find(vm);
            if (it == host_of.end()) continue;  // rejected
            fleet[it->second].evict(vm);
            trace.events.push_back({s, EventKind::Depart, vm, fleet[it->second].id(), std::nullopt});
            host_of.erase(it);
        }
    };

    std::size_t next = 0;
    for (Slot s = 0; s < grid.slot_count; ++s) {
        std::vector<PmId> woken;
        std::vector<PmId> parked;

        depart(s);

        for (; next < sorted.size() && sorted[next].start == s; ++next) {
            const VmRequest& req = sorted[next];
            const auto placed = allocate(req, fleet, cfg, rng);
            if (!placed) {
                trace.events.push_back({s, EventKind::Reject, req.id, std::nullopt, std::nullopt});
                continue;
            }
            PmState& pm = fleet[placed->pm_index];
            if (!pm.active()) {
                pm.wake();
                woken.push_back(pm.id());
            }
            pm.host(req.id, req.demand);
            host_of[req.id] = placed->pm_index;
            trace.events.push_back({s, EventKind::Arrive, req.id, std::nullopt, pm.id()});
        }

        if (s % cfg.migration_check_period == 0) {
            const MigrationPlan plan = migrate_round(fleet, cfg, rng);
            for (const Move& m : plan.moves) {
                const std::size_t src = index_of(fleet, m.src);
                const std::size_t dst = index_of(fleet, m.dst);
                const CpuUnits d = fleet[src].evict(m.vm);
                if (!fleet[dst].active()) {
                    fleet[dst].wake();
                    woken.push_back(m.dst);
                }
                fleet[dst].host(m.vm, d);
                host_of[m.vm] = dst;
                trace.events.push_back({s, EventKind::Migrate, m.vm, m.src, m.dst});
            }
            for (const AbortedMove& a : plan.aborted) {
                trace.events.push_back({s, EventKind::Abort, a.vm, a.src, std::nullopt});
            }
            for (PmId id : plan.parked) {
                fleet[index_of(fleet, id)].park();
                parked.push_back(id);
            }
        }

        if (cfg.parks_idle()) {
            for (auto& pm : fleet) {
                if (pm.active() && pm.empty()) {
                    pm.park();
                    parked.push_back(pm.id());
                }
            }
        }
        std::sort(woken.begin(), woken.end());
        std::sort(parked.begin(), parked.end());
        for (PmId id : woken) trace.events.push_back({s, EventKind::Wake, std::nullopt, std::nullopt, id});
        for (PmId id : parked) trace.events.push_back({s, EventKind::Sleep, std::nullopt, id, std::nullopt});

        auto& util_row = trace.utilization.emplace_back(fleet.size(), 0.0);
        auto& active_row = trace.active.emplace_back(fleet.size(), std::uint8_t{0});
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            util_row[i] = utilization(fleet[i]);
            active_row[i] = fleet[i].active() ? 1 : 0;
            if (fleet[i].active()) {
                result.ledger.add_active_slot(fleet[i].spec(), fleet[i].hosted(), grid.slot_seconds);
            } else {
                result.ledger.add_sleeping_slot(fleet[i].spec(), grid.slot_seconds);
            }
        }
    }
    depart(grid.slot_count);
    return result;
}

}  // namespace vmc
