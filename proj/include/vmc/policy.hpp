#pragma once

#include <optional>
#include <span>

#include "vmc/baselines.hpp"
#include "vmc/placement.hpp"
#include "vmc/random.hpp"
#include "vmc/save_policy.hpp"
#include "vmc/types.hpp"

namespace vmc {

/// Routes a placement decision to the configured policy.
[[nodiscard]] inline std::optional<Placement> allocate(const VmRequest& req, std::span<const PmState> fleet,
                                                       const PolicyConfig& cfg, Rng& rng) {
    switch (cfg.policy) {
    case PolicyKind::Save: return save_allocate(req, fleet, cfg, rng);
    case PolicyKind::EcoCloud: return ecocloud_allocate(req, fleet, EcoCloudParams::from(cfg), rng);
    case PolicyKind::DrsLike: return drs_allocate(req, fleet, cfg);
    }
    return std::nullopt;
}

/// Routes a migration round to the configured policy.
[[nodiscard]] inline MigrationPlan migrate_round(std::span<const PmState> fleet, const PolicyConfig& cfg, Rng& rng) {
    switch (cfg.policy) {
    case PolicyKind::Save: return save_migrate_round(fleet, cfg, rng);
    case PolicyKind::EcoCloud: return ecocloud_migrate_round(fleet, cfg, rng);
    case PolicyKind::DrsLike: return drs_migrate_round(fleet, cfg);
    }
    return {};
}

}  // namespace vmc
