#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "vmc/placement.hpp"
#include "vmc/random.hpp"
#include "vmc/save_policy.hpp"
#include "vmc/types.hpp"

namespace vmc {

// ---------------------------------------------------------------------------
// EcoCloud
// ---------------------------------------------------------------------------

/// Shape parameters of the EcoCloud assignment and migration functions.
struct EcoCloudParams {
    double p = 3.0;    ///< Assignment exponent.
    double t = 0.9;    ///< Assignment upper bound; PMs above it refuse.
    double t_l = 0.3;
    double t_h = 0.8;
    double alpha = 2.0;
    double beta = 2.0;

    static EcoCloudParams from(const PolicyConfig& cfg) noexcept {
        return {cfg.p_shape, cfg.t_a, cfg.t_l, cfg.t_h, cfg.alpha, cfg.beta};
    }
    /// Normalizer p^p T^(p+1) / (p+1)^(p+1): the maximum of x^p (T - x).
    [[nodiscard]] double m_p() const noexcept {
        return std::pow(p, p) * std::pow(t, p + 1.0) / std::pow(p + 1.0, p + 1.0);
    }
    /// Utilization at which the assignment function peaks at 1.
    [[nodiscard]] double peak() const noexcept { return p * t / (p + 1.0); }
};

/// x^p (T - x) / M_p on [0, T]; 0 above T.
[[nodiscard]] inline double ecocloud_assign_prob(double x, const EcoCloudParams& params) {
    if (x < 0.0 || x > params.t) return 0.0;
    return std::clamp(std::pow(x, params.p) * (params.t - x) / params.m_p(), 0.0, 1.0);
}

/// (1 - x/T_l)^alpha below T_l, (1 + (x - 1)/(1 - T_h))^beta above T_h, 0 between.
[[nodiscard]] inline double ecocloud_migrate_prob(double x, const EcoCloudParams& params) {
    if (x <= params.t_l) return std::pow(1.0 - x / params.t_l, params.alpha);
    if (x >= params.t_h) return std::pow(1.0 + (x - 1.0) / (1.0 - params.t_h), params.beta);
    return 0.0;
}

/// @brief EcoCloud placement.
///
/// Every active PM with room and x <= T runs a Bernoulli trial with its
/// assignment probability, in id order. The highest-probability acceptor wins
/// (ties to the lowest id). When nobody accepts, a sleeping PM is woken; only
/// if none can be woken does the highest-probability eligible PM take the
/// request anyway. Returns nullopt when nothing fits.
[[nodiscard]] inline std::optional<Placement> ecocloud_allocate(const VmRequest& req, std::span<const PmState> fleet,
                                                                const EcoCloudParams& params, Rng& rng,
                                                                const PlacementLimits& limits = {}) {
    std::vector<std::size_t> eligible;
    std::vector<double> prob;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const PmState& pm = fleet[i];
        const double x = utilization(pm);
        if (pm.active() && x <= params.t && limits.admits(fleet, i, req.demand)) {
            eligible.push_back(i);
            prob.push_back(ecocloud_assign_prob(x, params));
        }
    }
    std::vector<std::size_t> accepted;
    std::vector<double> accepted_prob;
    for (std::size_t k = 0; k < eligible.size(); ++k) {
        if (bernoulli(rng, prob[k])) {
            accepted.push_back(eligible[k]);
            accepted_prob.push_back(prob[k]);
        }
    }
    if (!accepted.empty()) return Placement{*detail::argmax_ap(fleet, accepted, accepted_prob), false};
    if (auto woken = wake_candidate(fleet, req.demand, limits)) return woken;
    if (!eligible.empty()) return Placement{*detail::argmax_ap(fleet, eligible, prob), false};
    return std::nullopt;
}

/// @brief EcoCloud migration round.
///
/// Unlike SAVE, every active PM outside [T_l, T_h] decides independently, in
/// id order, so several PMs may shed VMs in the same round. Low migrations
/// empty the PM (all or nothing), high migrations move one VM.
template <typename Trial>
[[nodiscard]] MigrationPlan ecocloud_migrate_round(std::span<const PmState> fleet, const PolicyConfig& cfg, Rng& rng,
                                                   Trial&& trial) {
    const auto params = EcoCloudParams::from(cfg);
    MigrationPlan plan;
    std::vector<PmState> scratch(fleet.begin(), fleet.end());
    auto allocate = [&](const VmRequest& req, std::span<const PmState> f, const PlacementLimits& limits) {
        return ecocloud_allocate(req, f, params, rng, limits);
    };
    for (std::size_t i = 0; i < scratch.size(); ++i) {
        if (!scratch[i].active() || scratch[i].empty()) continue;
        const double x = utilization(scratch[i]);
        MigrationRegime regime = MigrationRegime::None;
        if (x <= params.t_l) regime = MigrationRegime::Under;
        else if (x >= params.t_h) regime = MigrationRegime::Over;
        else continue;
        if (!trial(ecocloud_migrate_prob(x, params))) continue;
        detail::migrate_from(scratch, i, regime, params.t_h, allocate, plan);
    }
    return plan;
}

[[nodiscard]] inline MigrationPlan ecocloud_migrate_round(std::span<const PmState> fleet, const PolicyConfig& cfg,
                                                          Rng& rng) {
    return ecocloud_migrate_round(fleet, cfg, rng, [&rng](double p) { return bernoulli(rng, p); });
}

// ---------------------------------------------------------------------------
// DrsLike: an open load-balancing heuristic, not the commercial product.
// ---------------------------------------------------------------------------

/// Least-loaded active PM that fits (ties to the lowest id); wakes the
/// lowest-id sleeping PM only when no active PM fits.
[[nodiscard]] inline std::optional<Placement> drs_allocate(const VmRequest& req, std::span<const PmState> fleet,
                                                           const PolicyConfig& /*cfg*/,
                                                           const PlacementLimits& limits = {}) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        if (!fleet[i].active() || !limits.admits(fleet, i, req.demand)) continue;
        if (!best || fleet[i].load() * fleet[*best].spec().capacity <
                         fleet[*best].load() * fleet[i].spec().capacity) {
            best = i;
        }
    }
    if (best) return Placement{*best, false};
    return wake_candidate(fleet, req.demand, limits);
}

/// Every PM above T_h, in id order, moves the smallest VM that restores
/// x <= T_h to the least-loaded PM that can take it without itself crossing
/// T_h. No under-load consolidation.
[[nodiscard]] inline MigrationPlan drs_migrate_round(std::span<const PmState> fleet, const PolicyConfig& cfg) {
    MigrationPlan plan;
    std::vector<PmState> scratch(fleet.begin(), fleet.end());
    for (std::size_t i = 0; i < scratch.size(); ++i) {
        if (!scratch[i].active() || !(utilization(scratch[i]) > cfg.t_h)) continue;
        const auto victim = select_overload_victim(scratch[i], cfg.t_h, false);
        if (!victim) continue;
        const CpuUnits d = scratch[i].hosted().at(*victim);
        // Strict bound just above T_h keeps "<= T_h" on the destination.
        const PlacementLimits limits{i, true, std::nextafter(cfg.t_h, 2.0)};
        const auto placed = drs_allocate(VmRequest{*victim, 0, 1, d}, scratch, cfg, limits);
        if (!placed) {
            plan.aborted.push_back(AbortedMove{*victim, scratch[i].id()});
            continue;
        }
        scratch[i].evict(*victim);
        PmState& dst = scratch[placed->pm_index];
        if (placed->woke) dst.wake();
        dst.host(*victim, d);
        plan.moves.push_back(Move{*victim, scratch[i].id(), dst.id(), d, placed->woke});
    }
    return plan;
}

}  // namespace vmc
