#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vmc {

using VmId = std::int64_t;
using PmId = std::int64_t;
using Slot = std::int64_t;
/// Abstract CPU unit shared by VM demands and PM capacities (ECU-like).
using CpuUnits = std::int64_t;

/// @brief Slotted time grid: the horizon [0, T] cut into `slot_count` slots of
/// `slot_seconds` each. Slot indices form the contiguous range [0, slot_count).
struct TimeGrid {
    Slot slot_count = 360;
    double slot_seconds = 60.0;

    [[nodiscard]] double horizon_seconds() const noexcept {
        return static_cast<double>(slot_count) * slot_seconds;
    }
    /// Number of whole slots in `hours`, rounded down.
    [[nodiscard]] Slot slots_in_hours(double hours) const noexcept {
        return static_cast<Slot>(hours * 3600.0 / slot_seconds + 1e-9);
    }
};

/// One VM demand: occupies slots [start, end) with a constant CPU demand.
struct VmRequest {
    VmId id = 0;
    Slot start = 0;
    Slot end = 0;
    CpuUnits demand = 0;

    [[nodiscard]] Slot duration() const noexcept { return end - start; }
    friend bool operator==(const VmRequest&, const VmRequest&) = default;
};

/// Static description of a physical machine.
struct PmSpec {
    PmId id = 0;
    CpuUnits capacity = 400;
    double p_min = 110.0;  ///< Idle power (W).
    double p_max = 205.0;  ///< Full-load power (W).
    double p_sleep = 0.0;  ///< Draw while parked (W).

    /// Fraction of peak power drawn when idle.
    [[nodiscard]] double idle_fraction() const noexcept { return p_min / p_max; }
};

enum class PowerMode { Active, Sleeping };

/// @brief Dynamic state of a PM inside a simulation.
///
/// Utilization is kept as an exact integer load and only converted to a
/// fraction on read, so capacity checks never drift.
class PmState {
public:
    PmState() = default;
    explicit PmState(PmSpec spec, PowerMode mode = PowerMode::Sleeping)
        : spec_(spec), mode_(mode) {}

    [[nodiscard]] const PmSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] PmId id() const noexcept { return spec_.id; }
    [[nodiscard]] PowerMode mode() const noexcept { return mode_; }
    [[nodiscard]] bool active() const noexcept { return mode_ == PowerMode::Active; }
    [[nodiscard]] bool empty() const noexcept { return hosted_.empty(); }
    [[nodiscard]] CpuUnits load() const noexcept { return load_; }
    [[nodiscard]] CpuUnits free_capacity() const noexcept { return spec_.capacity - load_; }
    [[nodiscard]] const std::map<VmId, CpuUnits>& hosted() const noexcept { return hosted_; }

    [[nodiscard]] bool fits(CpuUnits demand) const noexcept { return demand <= free_capacity(); }

    /// Utilization after adding `extra` units (may be negative).
    [[nodiscard]] double utilization_with(CpuUnits extra) const noexcept {
        return static_cast<double>(load_ + extra) / static_cast<double>(spec_.capacity);
    }

    void host(VmId vm, CpuUnits demand) {
        if (!fits(demand)) {
            throw std::logic_error("PM " + std::to_string(id()) + " cannot host VM " +
                                   std::to_string(vm) + ": capacity exceeded");
        }
        if (!hosted_.emplace(vm, demand).second) {
            throw std::logic_error("VM " + std::to_string(vm) + " already hosted on PM " +
                                   std::to_string(id()));
        }
        load_ += demand;
    }

    /// Removes `vm` and returns its demand.
    CpuUnits evict(VmId vm) {
        auto it = hosted_.find(vm);
        if (it == hosted_.end()) {
            throw std::logic_error("VM " + std::to_string(vm) + " not hosted on PM " +
                                   std::to_string(id()));
        }
        const CpuUnits d = it->second;
        hosted_.erase(it);
        load_ -= d;
        return d;
    }

    void wake() noexcept { mode_ = PowerMode::Active; }
    void park() {
        if (!hosted_.empty()) {
            throw std::logic_error("cannot park PM " + std::to_string(id()) + " while it hosts VMs");
        }
        mode_ = PowerMode::Sleeping;
    }

private:
    PmSpec spec_{};
    PowerMode mode_ = PowerMode::Sleeping;
    std::map<VmId, CpuUnits> hosted_;
    CpuUnits load_ = 0;
};

/// (sum of hosted demands) / capacity.
[[nodiscard]] inline double utilization(const PmState& pm) noexcept { return pm.utilization_with(0); }

enum class PolicyKind { Save, EcoCloud, DrsLike };

[[nodiscard]] inline std::string_view to_string(PolicyKind k) noexcept {
    switch (k) {
    case PolicyKind::Save: return "SAVE";
    case PolicyKind::EcoCloud: return "EcoCloud";
    case PolicyKind::DrsLike: return "DrsLike";
    }
    return "?";
}

enum class InitialMode { PolicyDefault, AllSleeping, AllActive };

/// Thresholds, shape parameters and knobs for one policy run.
struct PolicyConfig {
    PolicyKind policy = PolicyKind::Save;
    double t_a = 0.9;  ///< Allocation cut-off; also the EcoCloud assignment upper bound T.
    double t_l = 0.3;  ///< Under-load threshold.
    double t_h = 0.8;  ///< Over-load threshold.
    double alpha = 2.0;
    double beta = 2.0;
    double p_shape = 3.0;  ///< EcoCloud assignment exponent.
    std::uint64_t rng_seed = 1;
    Slot migration_check_period = 15;

    /// PMs polled per allocation; 0 polls the whole fleet.
    std::size_t sample_size = 0;
    /// Highest-MP PMs considered per SAVE migration round.
    std::size_t migration_batch = 1;
    /// Per-PM Bernoulli acceptance instead of deterministic argmax (SAVE only).
    bool bernoulli_allocation = false;
    InitialMode initial_mode = InitialMode::PolicyDefault;

    [[nodiscard]] bool starts_active() const noexcept {
        if (initial_mode == InitialMode::PolicyDefault) return policy == PolicyKind::DrsLike;
        return initial_mode == InitialMode::AllActive;
    }
    /// Whether emptied PMs are parked at the end of a slot.
    [[nodiscard]] bool parks_idle() const noexcept { return policy != PolicyKind::DrsLike; }
};

enum class ConfigErrorKind { ThresholdOrder, RangeError, ShapeError };

class ConfigError : public std::invalid_argument {
public:
    ConfigError(ConfigErrorKind kind, const std::string& what)
        : std::invalid_argument(what), kind_(kind) {}
    [[nodiscard]] ConfigErrorKind kind() const noexcept { return kind_; }

private:
    ConfigErrorKind kind_;
};

/// A PolicyConfig that has passed validate_config().
class ValidatedConfig {
public:
    [[nodiscard]] const PolicyConfig& get() const noexcept { return cfg_; }
    const PolicyConfig* operator->() const noexcept { return &cfg_; }

private:
    friend ValidatedConfig validate_config(const PolicyConfig&);
    explicit ValidatedConfig(PolicyConfig cfg) : cfg_(cfg) {}
    PolicyConfig cfg_;
};

/// Checks threshold ordering, fraction ranges and shape parameters.
/// Throws ConfigError on the first violated constraint.
inline ValidatedConfig validate_config(const PolicyConfig& cfg) {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    const std::pair<const char*, double> fractions[] = {{"T_a", cfg.t_a}, {"T_l", cfg.t_l}, {"T_h", cfg.t_h}};
    for (const auto& [name, v] : fractions) {
        if (!in_unit(v)) {
            throw ConfigError(ConfigErrorKind::RangeError,
                              std::string(name) + " = " + std::to_string(v) + " is outside (0, 1]");
        }
    }
    if (!(cfg.t_l < cfg.t_h)) {
        throw ConfigError(ConfigErrorKind::ThresholdOrder, "T_l must be below T_h");
    }
    if (cfg.policy == PolicyKind::Save && !(cfg.t_h <= cfg.t_a)) {
        throw ConfigError(ConfigErrorKind::ThresholdOrder, "T_h must not exceed T_a");
    }
    if (!(cfg.alpha >= 1.0) || !(cfg.beta >= 1.0)) {
        throw ConfigError(ConfigErrorKind::ShapeError, "alpha and beta must be >= 1");
    }
    if (!(cfg.p_shape > 0.0)) {
        throw ConfigError(ConfigErrorKind::ShapeError, "p_shape must be positive");
    }
    if (cfg.migration_check_period < 1) {
        throw ConfigError(ConfigErrorKind::RangeError, "migration_check_period must be at least one slot");
    }
    if (cfg.migration_batch < 1) {
        throw ConfigError(ConfigErrorKind::RangeError, "migration_batch must be at least 1");
    }
    return ValidatedConfig(cfg);
}

}  // namespace vmc
