#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vmc/placement.hpp"
#include "vmc/random.hpp"
#include "vmc/types.hpp"

// Self-adaptive consolidation: every PM scores itself with an allocation
// function (higher utilization, higher acceptance) and a migration function
// that fires only outside [T_l, T_h]. The scheduler acts on the single best
// score per round so migrations trickle out one PM at a time.

namespace vmc {

struct AcceptanceProbability {
    PmId pm_id = 0;
    double ap = 0.0;
    bool eligible = false;
};

enum class MigrationRegime { None, Under, Over };

struct MigrationProbability {
    PmId pm_id = 0;
    double mp = 0.0;
    MigrationRegime regime = MigrationRegime::None;
};

/// (1 - e^-x) / (1 - e^-1) on [0, T_a]; a PM above T_a scores 0.
[[nodiscard]] inline double allocation_probability(double x, double t_a) {
    if (x > t_a) return 0.0;
    return -std::expm1(-x) / -std::expm1(-1.0);
}

/// AP of `pm` for a request of `demand` units. Ineligible PMs are sleeping,
/// above T_a, or short of free capacity.
[[nodiscard]] inline AcceptanceProbability acceptance(const PmState& pm, CpuUnits demand, double t_a) {
    const double x = utilization(pm);
    AcceptanceProbability out{pm.id(), 0.0, false};
    out.eligible = pm.active() && x <= t_a && pm.fits(demand);
    if (out.eligible) out.ap = allocation_probability(x, t_a);
    return out;
}

/// @brief Beta(alpha, beta) density.
///
/// Defined on [0, 1] for alpha, beta >= 1; at the end points the formula is the
/// continuous extension (0 whenever the matching exponent is positive).
/// Throws std::domain_error for x outside [0, 1] or shapes below 1.
[[nodiscard]] inline double beta_pdf(double x, double alpha, double beta) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("beta_pdf: x outside [0, 1]");
    if (!(alpha >= 1.0 && beta >= 1.0)) throw std::domain_error("beta_pdf: shape parameters must be >= 1");
    const double norm = std::beta(alpha, beta);
    return std::pow(x, alpha - 1.0) * std::pow(1.0 - x, beta - 1.0) / norm;
}

/// 1 - beta_pdf(x)/3 inside the trigger bands (0, T_l] and [T_h, 1], clamped
/// to [0, 1]; zero elsewhere.
[[nodiscard]] inline double migration_function(double x, double t_l, double t_h, double alpha, double beta) {
    const bool under = x > 0.0 && x <= t_l;
    const bool over = x >= t_h && x <= 1.0;
    if (!under && !over) return 0.0;
    return std::clamp(1.0 - beta_pdf(x, alpha, beta) / 3.0, 0.0, 1.0);
}

[[nodiscard]] inline MigrationProbability migration_probability(double x, const PolicyConfig& cfg,
                                                                PmId pm_id = 0) {
    MigrationProbability out{pm_id, 0.0, MigrationRegime::None};
    if (x > 0.0 && x <= cfg.t_l) {
        out.regime = MigrationRegime::Under;
    } else if (x >= cfg.t_h && x <= 1.0) {
        out.regime = MigrationRegime::Over;
    } else {
        return out;
    }
    out.mp = migration_function(x, cfg.t_l, cfg.t_h, cfg.alpha, cfg.beta);
    return out;
}

namespace detail {

/// Fleet indices polled this round: all of them, or a seeded uniform sample.
inline std::vector<std::size_t> polled_indices(std::size_t fleet_size, std::size_t sample_size, Rng& rng) {
    std::vector<std::size_t> all(fleet_size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (sample_size == 0 || sample_size >= fleet_size) return all;
    std::vector<std::size_t> picked;
    picked.reserve(sample_size);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), sample_size, rng);
    return picked;
}

inline std::optional<std::size_t> argmax_ap(std::span<const PmState> fleet, std::span<const std::size_t> indices,
                                            std::span<const double> ap) {
    std::optional<std::size_t> best;
    double best_ap = -1.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::size_t i = indices[k];
        if (ap[k] > best_ap || (ap[k] == best_ap && best && fleet[i].id() < fleet[*best].id())) {
            best = i;
            best_ap = ap[k];
        }
    }
    return best;
}

inline std::optional<std::size_t> save_pick_active(const VmRequest& req, std::span<const PmState> fleet,
                                                   std::span<const std::size_t> polled, const PolicyConfig& cfg,
                                                   Rng& rng, const PlacementLimits& limits) {
    std::vector<std::size_t> eligible;
    std::vector<double> ap;
    for (std::size_t i : polled) {
        const auto a = acceptance(fleet[i], req.demand, cfg.t_a);
        if (a.eligible && limits.admits(fleet, i, req.demand)) {
            eligible.push_back(i);
            ap.push_back(a.ap);
        }
    }
    if (eligible.empty()) return std::nullopt;
    if (cfg.bernoulli_allocation) {
        std::vector<std::size_t> accepted;
        std::vector<double> accepted_ap;
        for (std::size_t k = 0; k < eligible.size(); ++k) {
            if (bernoulli(rng, ap[k])) {
                accepted.push_back(eligible[k]);
                accepted_ap.push_back(ap[k]);
            }
        }
        if (!accepted.empty()) return argmax_ap(fleet, accepted, accepted_ap);
    }
    return argmax_ap(fleet, eligible, ap);
}

}  // namespace detail

/// @brief Picks the hosting PM for `req`.
///
/// Among active PMs with room and x <= T_a, returns the one with the highest
/// AP (ties to the lowest id). Only when no active PM qualifies is the
/// lowest-id sleeping PM that fits woken. Returns nullopt when nothing can
/// host the request. The fleet must be ordered by PM id.
[[nodiscard]] inline std::optional<Placement> save_allocate(const VmRequest& req, std::span<const PmState> fleet,
                                                            const PolicyConfig& cfg, Rng& rng,
                                                            const PlacementLimits& limits = {}) {
    if (fleet.empty()) return std::nullopt;
    const auto polled = detail::polled_indices(fleet.size(), cfg.sample_size, rng);
    if (auto i = detail::save_pick_active(req, fleet, polled, cfg, rng, limits)) return Placement{*i, false};
    if (auto woken = wake_candidate(fleet, req.demand, limits)) return woken;
    if (polled.size() < fleet.size()) {
        const auto all = detail::polled_indices(fleet.size(), 0, rng);
        if (auto i = detail::save_pick_active(req, fleet, all, cfg, rng, limits)) return Placement{*i, false};
    }
    return std::nullopt;
}

namespace detail {

/// Re-places every VM in `vms` off `src` on a copy of `fleet`. All or nothing.
template <typename Allocator>
bool relocate_all(std::vector<PmState>& fleet, std::size_t src,
                  std::span<const std::pair<VmId, CpuUnits>> vms, const PlacementLimits& limits,
                  Allocator&& allocate, std::vector<Move>& moves_out) {
    std::vector<PmState> trial = fleet;
    std::vector<Move> moves;
    for (const auto& [vm, d] : vms) {
        trial[src].evict(vm);
        const VmRequest req{vm, 0, 1, d};
        const auto placed = allocate(req, std::span<const PmState>(trial), limits);
        if (!placed) return false;
        PmState& dst = trial[placed->pm_index];
        if (placed->woke) dst.wake();
        dst.host(vm, d);
        moves.push_back(Move{vm, trial[src].id(), dst.id(), d, placed->woke});
    }
    fleet = std::move(trial);
    moves_out.insert(moves_out.end(), moves.begin(), moves.end());
    return true;
}

/// Shared handling for a PM whose migration trial succeeded: empty it when
/// under-loaded, shed one VM when over-loaded.
template <typename Allocator>
void migrate_from(std::vector<PmState>& scratch, std::size_t src, MigrationRegime regime, double t_h,
                  Allocator&& allocate, MigrationPlan& plan) {
    const PmState& pm = scratch[src];
    if (regime == MigrationRegime::Under) {
        const auto vms = largest_first(pm);
        if (vms.empty()) return;
        // Consolidation moves target PMs that are already on.
        const PlacementLimits limits{src, false, t_h};
        if (relocate_all(scratch, src, vms, limits, allocate, plan.moves)) {
            scratch[src].park();
            plan.parked.push_back(scratch[src].id());
        } else {
            for (const auto& [vm, d] : vms) plan.aborted.push_back(AbortedMove{vm, scratch[src].id()});
        }
    } else if (regime == MigrationRegime::Over) {
        const auto victim = select_overload_victim(pm, t_h, true);
        if (!victim) return;
        const std::pair<VmId, CpuUnits> one[] = {{*victim, pm.hosted().at(*victim)}};
        const PlacementLimits limits{src, true, t_h};
        if (!relocate_all(scratch, src, one, limits, allocate, plan.moves)) {
            plan.aborted.push_back(AbortedMove{*victim, scratch[src].id()});
            return;
        }
        // A PM emptied earlier in this round never actually sleeps if it is
        // picked up again here.
        Move& m = plan.moves.back();
        const auto it = std::find(plan.parked.begin(), plan.parked.end(), m.dst);
        if (it != plan.parked.end()) {
            plan.parked.erase(it);
            m.woke_dst = false;
        }
    }
}

}  // namespace detail

/// @brief One migration round.
///
/// Scores every active PM with the migration function, takes the highest
/// `migration_batch` scores (ties to the lowest id) and runs one Bernoulli
/// trial per candidate. A successful under-loaded PM is emptied and parked,
/// or left untouched if any of its VMs has nowhere to go. A successful
/// over-loaded PM sheds the smallest VM that takes it strictly below T_h.
/// Destinations are chosen by save_allocate and must stay below T_h.
///
/// `trial(p)` decides each Bernoulli draw; the plain overload draws from `rng`.
template <typename Trial>
[[nodiscard]] MigrationPlan save_migrate_round(std::span<const PmState> fleet, const PolicyConfig& cfg, Rng& rng,
                                               Trial&& trial) {
    MigrationPlan plan;
    std::vector<PmState> scratch(fleet.begin(), fleet.end());
    const auto polled = detail::polled_indices(fleet.size(), cfg.sample_size, rng);

    std::vector<MigrationProbability> scores;
    for (std::size_t i : polled) {
        if (!fleet[i].active()) continue;
        auto mp = migration_probability(utilization(fleet[i]), cfg, fleet[i].id());
        if (mp.mp > 0.0) scores.push_back(mp);
    }
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        return a.mp != b.mp ? a.mp > b.mp : a.pm_id < b.pm_id;
    });
    if (scores.size() > cfg.migration_batch) scores.resize(cfg.migration_batch);

    auto allocate = [&](const VmRequest& req, std::span<const PmState> f, const PlacementLimits& limits) {
        return save_allocate(req, f, cfg, rng, limits);
    };
    for (const auto& score : scores) {
        const std::size_t src = index_of(scratch, score.pm_id);
        // Earlier moves in a batch may have shifted this PM's load.
        const auto current = migration_probability(utilization(scratch[src]), cfg, score.pm_id);
        if (current.regime == MigrationRegime::None || !scratch[src].active()) continue;
        if (!trial(current.mp)) continue;
        detail::migrate_from(scratch, src, current.regime, cfg.t_h, allocate, plan);
    }
    return plan;
}

[[nodiscard]] inline MigrationPlan save_migrate_round(std::span<const PmState> fleet, const PolicyConfig& cfg,
                                                      Rng& rng) {
    return save_migrate_round(fleet, cfg, rng, [&rng](double p) { return bernoulli(rng, p); });
}

}  // namespace vmc
