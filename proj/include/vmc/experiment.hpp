#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "vmc/energy.hpp"
#include "vmc/fileio.hpp"
#include "vmc/kernel.hpp"
#include "vmc/metrics.hpp"
#include "vmc/trace_io.hpp"
#include "vmc/types.hpp"
#include "vmc/workload.hpp"

namespace vmc {

/// Experiment file is missing, unreadable or inconsistent.
class ExperimentConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A policy entry of an experiment, labelled for reports.
struct PolicyEntry {
    std::string label;
    PolicyConfig config;
};

struct FleetSpec {
    std::size_t count = 100;
    CpuUnits capacity = 400;
    double p_min = 110.0;
    double p_max = 205.0;
    double p_sleep = 0.0;

    [[nodiscard]] std::vector<PmSpec> build() const {
        std::vector<PmSpec> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(PmSpec{static_cast<PmId>(i), capacity, p_min, p_max, p_sleep});
        }
        return out;
    }
};

/// @brief Everything a comparison run needs.
///
/// Replication r uses seed + r for both the workload and every policy's
/// random stream, so all policies see the same requests (paired design).
struct ExperimentConfig {
    std::string name = "experiment";
    std::size_t replications = 20;
    std::uint64_t seed = 1;
    TimeGrid grid{};
    FleetSpec fleet{};
    WorkloadSpec workload{};
    std::optional<std::filesystem::path> request_trace;  ///< Replaces generation when set.
    std::vector<PolicyEntry> policies;
    std::size_t threads = 0;  ///< 0 picks the hardware concurrency.
};

namespace detail {

inline std::optional<PolicyKind> parse_policy_kind(const std::string& s) {
    if (s == "SAVE" || s == "save" || s == "Save") return PolicyKind::Save;
    if (s == "EcoCloud" || s == "ecocloud") return PolicyKind::EcoCloud;
    if (s == "DrsLike" || s == "drslike" || s == "drs") return PolicyKind::DrsLike;
    return std::nullopt;
}

/// Typed lookups over one INI section that reject unknown keys.
class SectionReader {
public:
    SectionReader(std::string name, const boost::property_tree::ptree& tree) : name_(std::move(name)), tree_(tree) {}

    template <typename T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        const auto child = tree_.get_child_optional(boost::property_tree::ptree::path_type(key, '\0'));
        if (!child) return fallback;
        try {
            return child->get_value<T>();
        } catch (const boost::property_tree::ptree_bad_data&) {
            throw ExperimentConfigError("[" + name_ + "] " + key + ": cannot parse '" + child->data() + "'");
        }
    }

    void finish() const {
        for (const auto& [key, value] : tree_) {
            if (!seen_.contains(key)) throw ExperimentConfigError("[" + name_ + "] unknown key '" + key + "'");
        }
    }

private:
    std::string name_;
    const boost::property_tree::ptree& tree_;
    std::set<std::string> seen_;
};

inline PolicyEntry parse_policy_section(const std::string& section, const boost::property_tree::ptree& tree) {
    SectionReader r(section, tree);
    PolicyEntry e;
    const std::string type = r.get<std::string>("type", "");
    const auto kind = parse_policy_kind(type);
    if (!kind) throw ExperimentConfigError("[" + section + "] type must be SAVE, EcoCloud or DrsLike");
    e.config.policy = *kind;
    e.label = r.get<std::string>("name", std::string(to_string(*kind)));
    PolicyConfig& c = e.config;
    c.t_a = r.get("t_a", c.t_a);
    c.t_l = r.get("t_l", c.t_l);
    c.t_h = r.get("t_h", c.t_h);
    c.alpha = r.get("alpha", c.alpha);
    c.beta = r.get("beta", c.beta);
    c.p_shape = r.get("p_shape", c.p_shape);
    c.migration_check_period = r.get("migration_check_period", c.migration_check_period);
    c.sample_size = r.get("sample_size", c.sample_size);
    c.migration_batch = r.get("migration_batch", c.migration_batch);
    c.bernoulli_allocation = r.get("bernoulli_allocation", c.bernoulli_allocation);
    const std::string initial = r.get<std::string>("initial_mode", "default");
    if (initial == "default") c.initial_mode = InitialMode::PolicyDefault;
    else if (initial == "sleeping") c.initial_mode = InitialMode::AllSleeping;
    else if (initial == "active") c.initial_mode = InitialMode::AllActive;
    else throw ExperimentConfigError("[" + section + "] initial_mode must be default, sleeping or active");
    r.finish();
    try {
        (void)validate_config(c);
    } catch (const ConfigError& err) {
        throw ExperimentConfigError("[" + section + "] " + err.what());
    }
    return e;
}

}  // namespace detail

/// @brief Parses the INI-style experiment format.
///
/// Sections: [experiment], [fleet], [workload] and one [policy.<label>] per
/// compared policy, in report order (the first is the baseline). Unknown
/// sections or keys are errors.
[[nodiscard]] inline ExperimentConfig parse_experiment_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    std::istringstream is(text);
    try {
        pt::read_ini(is, root);
    } catch (const pt::ini_parser_error& err) {
        throw ExperimentConfigError(std::string("malformed config: ") + err.what());
    }
    ExperimentConfig cfg;
    std::set<std::string> labels;
    double horizon_hours = 6.0;
    double min_hours = 1.0;
    double max_hours = 6.0;
    const pt::ptree empty;
    auto section = [&](const char* name) -> const pt::ptree& {
        auto child = root.get_child_optional(pt::ptree::path_type(name, '\0'));
        return child ? *child : empty;
    };
    for (const auto& [key, tree] : root) {
        if (key == "experiment" || key == "fleet" || key == "workload") continue;
        if (key.rfind("policy.", 0) == 0) {
            auto entry = detail::parse_policy_section(key, tree);
            if (!labels.insert(entry.label).second) throw ExperimentConfigError("duplicate policy name " + entry.label);
            cfg.policies.push_back(std::move(entry));
            continue;
        }
        if (tree.empty() && !tree.data().empty()) throw ExperimentConfigError("key '" + key + "' outside any section");
        throw ExperimentConfigError("unknown section [" + key + "]");
    }
    {
        detail::SectionReader r("experiment", section("experiment"));
        cfg.name = r.get<std::string>("name", cfg.name);
        cfg.replications = r.get("replications", cfg.replications);
        cfg.seed = r.get("seed", cfg.seed);
        cfg.grid.slot_seconds = r.get("slot_seconds", cfg.grid.slot_seconds);
        horizon_hours = r.get("horizon_hours", horizon_hours);
        cfg.threads = r.get("threads", cfg.threads);
        r.finish();
    }
    {
        detail::SectionReader r("fleet", section("fleet"));
        cfg.fleet.count = r.get("count", cfg.fleet.count);
        cfg.fleet.capacity = r.get("capacity", cfg.fleet.capacity);
        cfg.fleet.p_min = r.get("p_min", cfg.fleet.p_min);
        cfg.fleet.p_max = r.get("p_max", cfg.fleet.p_max);
        cfg.fleet.p_sleep = r.get("p_sleep", cfg.fleet.p_sleep);
        r.finish();
    }
    {
        detail::SectionReader r("workload", section("workload"));
        cfg.workload.n_vms = r.get("vms", cfg.workload.n_vms);
        min_hours = r.get("duration_min_hours", min_hours);
        max_hours = r.get("duration_max_hours", max_hours);
        cfg.workload.demand = r.get("demand", cfg.workload.demand);
        cfg.workload.demand_max = r.get("demand_max", cfg.workload.demand_max);
        const std::string arrival = r.get<std::string>("arrival", "uniform_over_horizon");
        if (arrival == "uniform_over_horizon") cfg.workload.arrival = ArrivalPattern::UniformOverHorizon;
        else if (arrival == "all_at_start") cfg.workload.arrival = ArrivalPattern::AllAtStart;
        else throw ExperimentConfigError("[workload] arrival must be all_at_start or uniform_over_horizon");
        const std::string trace = r.get<std::string>("trace", "");
        if (!trace.empty()) cfg.request_trace = trace;
        r.finish();
    }

    if (cfg.replications < 1) throw ExperimentConfigError("[experiment] replications must be >= 1");
    if (!(cfg.grid.slot_seconds > 0.0)) throw ExperimentConfigError("[experiment] slot_seconds must be positive");
    cfg.grid.slot_count = static_cast<Slot>(std::llround(horizon_hours * 3600.0 / cfg.grid.slot_seconds));
    if (cfg.grid.slot_count < 1) throw ExperimentConfigError("[experiment] horizon shorter than one slot");
    if (cfg.fleet.count < 1 || cfg.fleet.capacity < 1) throw ExperimentConfigError("[fleet] count and capacity must be >= 1");
    if (!(cfg.fleet.p_min > 0.0 && cfg.fleet.p_min < cfg.fleet.p_max)) {
        throw ExperimentConfigError("[fleet] need 0 < p_min < p_max");
    }
    cfg.workload.horizon = cfg.grid.slot_count;
    cfg.workload.duration_min = cfg.grid.slots_in_hours(min_hours);
    cfg.workload.duration_max = cfg.grid.slots_in_hours(max_hours);
    if (cfg.workload.duration_min > cfg.workload.horizon) {
        throw ExperimentConfigError("[workload] HorizonTooShort: minimum duration exceeds the horizon");
    }
    if (cfg.workload.duration_min < 1 || cfg.workload.duration_max < cfg.workload.duration_min) {
        throw ExperimentConfigError("[workload] need 0 < duration_min_hours <= duration_max_hours");
    }
    if (cfg.workload.demand < 1 || cfg.workload.demand > cfg.fleet.capacity ||
        std::max(cfg.workload.demand, cfg.workload.demand_max) > cfg.fleet.capacity) {
        throw ExperimentConfigError("[workload] demand must be in [1, capacity]");
    }
    if (cfg.policies.empty()) throw ExperimentConfigError("no [policy.<name>] sections");
    return cfg;
}

[[nodiscard]] inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& err) {
        throw ExperimentConfigError(err.what());
    }
    auto cfg = parse_experiment_config(text);
    if (cfg.request_trace && cfg.request_trace->is_relative()) {
        cfg.request_trace = path.parent_path() / *cfg.request_trace;
    }
    return cfg;
}

/// One (policy, replication) run.
struct RunRecord {
    std::string label;
    PolicyKind policy = PolicyKind::Save;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::uint64_t workload_hash = 0;
    MetricsReport metrics;
    double energy_joules = 0.0;
    std::string trace_text;   ///< Filled when artifacts are kept.
    std::string ledger_text;  ///< Filled when artifacts are kept.
};

/// Per-policy aggregate over replications.
struct PolicySummary {
    std::string label;
    double energy_kwh_mean = 0.0;
    double energy_kwh_std = 0.0;
    double migrations_mean = 0.0;
    double migrations_std = 0.0;
    double relative_cost_pct = 0.0;  ///< Mean of per-replication ratios to the baseline.
    double relative_cost_std = 0.0;
    double active_utilization_mean = 0.0;
    double active_pms_mean = 0.0;
    double rejected_mean = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<std::string> workloads;       ///< Serialized request list per replication.
    std::vector<std::uint64_t> workload_hashes;
    std::vector<RunRecord> runs;              ///< Replication-major, then policy order.
    std::vector<PolicySummary> summary;
};

namespace detail {

inline std::string ledger_csv(const SimTrace& trace, const EnergyLedger& ledger) {
    std::string out = "pm_id,on_hours,on_wh,increment_wh,sleep_wh,total_wh\n";
    for (const auto& pm : trace.fleet) {
        const auto on_it = ledger.on_seconds().find(pm.id);
        const double on_s = on_it == ledger.on_seconds().end() ? 0.0 : on_it->second;
        out += fmt::format("{},{:.4f},{:.6f},{:.6f},{:.6f},{:.6f}\n", pm.id, on_s / 3600.0,
                           ledger.pm_on_energy(pm.id) / kJoulesPerWh, ledger.pm_increment_energy(pm.id) / kJoulesPerWh,
                           ledger.pm_sleep_energy(pm.id) / kJoulesPerWh, ledger.pm_energy(pm.id) / kJoulesPerWh);
    }
    out += fmt::format("total,,,,,{:.6f}\n", datacenter_energy(ledger) / kJoulesPerWh);
    return out;
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

/// @brief Runs every policy on every replication.
///
/// Runs are independent and execute in parallel; the result is identical for
/// any thread count. With `keep_artifacts` each record carries its trace and
/// ledger text for write_reports().
[[nodiscard]] inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool keep_artifacts = true) {
    ExperimentResult res;
    res.config = cfg;
    const std::size_t reps = cfg.replications;
    const std::size_t npol = cfg.policies.size();
    const auto fleet = cfg.fleet.build();

    std::vector<std::vector<VmRequest>> workloads(reps);
    std::optional<std::vector<VmRequest>> fixed;
    if (cfg.request_trace) {
        try {
            fixed = ingest(*cfg.request_trace, IngestLimits{cfg.grid.slot_count, cfg.fleet.capacity});
        } catch (const IoError& err) {
            throw ExperimentConfigError(err.what());
        } catch (const std::runtime_error& err) {
            throw ExperimentConfigError(cfg.request_trace->string() + ": " + err.what());
        }
    }
    for (std::size_t r = 0; r < reps; ++r) {
        if (fixed) {
            workloads[r] = *fixed;
        } else {
            WorkloadSpec w = cfg.workload;
            w.seed = cfg.seed + r;
            workloads[r] = generate(w);
        }
        res.workloads.push_back(serialize_requests(workloads[r]));
        res.workload_hashes.push_back(workload_hash(workloads[r]));
    }

    std::vector<ValidatedConfig> validated;
    for (const auto& p : cfg.policies) validated.push_back(validate_config(p.config));

    res.runs.resize(reps * npol);
    detail::parallel_for(reps * npol, cfg.threads, [&](std::size_t job) {
        const std::size_t r = job / npol;
        const std::size_t p = job % npol;
        PolicyConfig pc = cfg.policies[p].config;
        pc.rng_seed = cfg.seed + r;
        const RunResult out = run(workloads[r], fleet, validate_config(pc), cfg.grid);
        RunRecord& rec = res.runs[job];
        rec.label = cfg.policies[p].label;
        rec.policy = pc.policy;
        rec.replication = r;
        rec.seed = pc.rng_seed;
        rec.workload_hash = res.workload_hashes[r];
        rec.metrics = metrics_of(out.trace, out.ledger);
        rec.energy_joules = datacenter_energy(out.ledger);
        if (keep_artifacts) {
            rec.trace_text = serialize_trace(out.trace);
            rec.ledger_text = detail::ledger_csv(out.trace, out.ledger);
        }
    });

    for (std::size_t p = 0; p < npol; ++p) {
        std::vector<double> kwh, migrations, ratio, util, active, rejected;
        for (std::size_t r = 0; r < reps; ++r) {
            const RunRecord& rec = res.runs[r * npol + p];
            const RunRecord& base = res.runs[r * npol];
            kwh.push_back(rec.metrics.total_kwh);
            migrations.push_back(static_cast<double>(rec.metrics.migrations));
            if (base.energy_joules > 0.0) {
                ratio.push_back(rec.energy_joules / base.energy_joules);
            } else {
                ratio.push_back(rec.energy_joules == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
            }
            util.push_back(rec.metrics.mean_active_utilization);
            active.push_back(rec.metrics.mean_active_pms);
            rejected.push_back(static_cast<double>(rec.metrics.rejected));
        }
        PolicySummary s;
        s.label = cfg.policies[p].label;
        std::tie(s.energy_kwh_mean, s.energy_kwh_std) = detail::mean_std(kwh);
        std::tie(s.migrations_mean, s.migrations_std) = detail::mean_std(migrations);
        auto [rm, rs] = detail::mean_std(ratio);
        s.relative_cost_pct = 100.0 * rm;
        s.relative_cost_std = 100.0 * rs;
        s.active_utilization_mean = detail::mean_std(util).first;
        s.active_pms_mean = detail::mean_std(active).first;
        s.rejected_mean = detail::mean_std(rejected).first;
        res.summary.push_back(s);
    }
    return res;
}

[[nodiscard]] inline std::string comparison_csv(const ExperimentResult& res) {
    std::string out =
        "policy,replications,energy_kwh_mean,energy_kwh_std,migrations_mean,migrations_std,"
        "relative_cost_pct,relative_cost_std,active_utilization_mean,active_pms_mean,rejected_mean\n";
    for (const auto& s : res.summary) {
        out += fmt::format("{},{},{:.4f},{:.4f},{:.2f},{:.2f},{:.2f},{:.2f},{:.4f},{:.3f},{:.2f}\n", s.label,
                           res.config.replications, s.energy_kwh_mean, s.energy_kwh_std, s.migrations_mean,
                           s.migrations_std, s.relative_cost_pct, s.relative_cost_std, s.active_utilization_mean,
                           s.active_pms_mean, s.rejected_mean);
    }
    return out;
}

[[nodiscard]] inline std::string runs_csv(const ExperimentResult& res) {
    std::string out =
        "policy,replication,seed,workload_hash,energy_kwh,migrations,aborted_migrations,rejected,wakes,"
        "mean_active_utilization,p50_active_utilization,p95_active_utilization,mean_active_pms,peak_active_pms\n";
    for (const auto& r : res.runs) {
        const auto& m = r.metrics;
        out += fmt::format("{},{},{},{:016x},{:.6f},{},{},{},{},{:.6f},{:.6f},{:.6f},{:.4f},{}\n", r.label,
                           r.replication, r.seed, r.workload_hash, m.total_kwh, m.migrations, m.aborted_migrations,
                           m.rejected, m.wakes, m.mean_active_utilization, m.p50_active_utilization,
                           m.p95_active_utilization, m.mean_active_pms, m.peak_active_pms);
    }
    return out;
}

/// Human-readable comparison in the shape of an energy/migrations/relative-cost table.
[[nodiscard]] inline std::string summary_text(const ExperimentResult& res) {
    const auto& c = res.config;
    std::string out = fmt::format("experiment: {}\n", c.name);
    out += fmt::format("fleet: {} PMs, capacity {}, p_min {} W, p_max {} W, p_sleep {} W\n", c.fleet.count,
                       c.fleet.capacity, c.fleet.p_min, c.fleet.p_max, c.fleet.p_sleep);
    if (c.request_trace) {
        out += fmt::format("workload: {} (fixed trace)\n", c.request_trace->filename().string());
    } else {
        out += fmt::format("workload: {} VMs, demand {}..{}, durations {}..{} slots, arrival {}\n", c.workload.n_vms,
                           c.workload.demand, std::max(c.workload.demand, c.workload.demand_max),
                           c.workload.duration_min, c.workload.duration_max, to_string(c.workload.arrival));
    }
    out += fmt::format("grid: {} slots of {} s; replications {} (seeds {}..{})\n\n", c.grid.slot_count,
                       c.grid.slot_seconds, c.replications, c.seed, c.seed + c.replications - 1);
    out += fmt::format("{:<16}{:>24}{:>20}{:>22}\n", "policy", "energy kWh", "migrations", "relative cost");
    for (const auto& s : res.summary) {
        out += fmt::format("{:<16}{:>24}{:>20}{:>22}\n", s.label,
                           fmt::format("{:.2f} +- {:.2f}", s.energy_kwh_mean, s.energy_kwh_std),
                           fmt::format("{:.1f} +- {:.1f}", s.migrations_mean, s.migrations_std),
                           fmt::format("{:.2f}% +- {:.2f}", s.relative_cost_pct, s.relative_cost_std));
    }
    out += "\nworkload hashes:\n";
    for (std::size_t r = 0; r < res.workload_hashes.size(); ++r) {
        out += fmt::format("  rep {:>3}: {:016x}\n", r, res.workload_hashes[r]);
    }
    return out;
}

/// @brief Writes every report file under `dir`.
///
/// Layout: comparison.csv, runs.csv, summary.txt, workloads/rep<r>.csv,
/// traces/<policy>_rep<r>.csv and ledgers/<policy>_rep<r>.csv.
inline void write_reports(const ExperimentResult& res, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    for (const char* sub : {"", "traces", "ledgers", "workloads"}) {
        fs::create_directories(dir / sub, ec);
        if (ec) throw IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
    }
    write_text_file(dir / "comparison.csv", comparison_csv(res));
    write_text_file(dir / "runs.csv", runs_csv(res));
    write_text_file(dir / "summary.txt", summary_text(res));
    for (std::size_t r = 0; r < res.workloads.size(); ++r) {
        write_text_file(dir / "workloads" / fmt::format("rep{:03}.csv", r), res.workloads[r]);
    }
    for (const auto& run : res.runs) {
        const std::string stem = fmt::format("{}_rep{:03}.csv", run.label, run.replication);
        if (!run.trace_text.empty()) write_text_file(dir / "traces" / stem, run.trace_text);
        if (!run.ledger_text.empty()) write_text_file(dir / "ledgers" / stem, run.ledger_text);
    }
}

/// Plot-ready series for one or more traces.
struct PlotData {
    std::string power_csv;        ///< slot,time_s,<label>_w...
    std::string utilization_csv;  ///< trace,slot,pm_id,utilization (active PMs only)
};

/// Builds aligned power and utilization series from parsed traces.
[[nodiscard]] inline PlotData plot_data(const std::vector<std::pair<std::string, ParsedTrace>>& traces) {
    PlotData out;
    std::vector<std::vector<double>> power;
    std::vector<Replay> replays;
    std::size_t slots = 0;
    double slot_seconds = traces.empty() ? 60.0 : traces.front().second.grid.slot_seconds;
    out.power_csv = "slot,time_s";
    for (const auto& [label, t] : traces) {
        replays.push_back(replay(t));
        power.push_back(power_series(t, replays.back()));
        slots = std::max(slots, power.back().size());
        out.power_csv += "," + label + "_w";
    }
    out.power_csv += "\n";
    for (std::size_t s = 0; s < slots; ++s) {
        out.power_csv += fmt::format("{},{}", s, static_cast<double>(s) * slot_seconds);
        for (const auto& series : power) {
            out.power_csv += s < series.size() ? fmt::format(",{:.4f}", series[s]) : std::string(",");
        }
        out.power_csv += "\n";
    }
    out.utilization_csv = "trace,slot,pm_id,utilization\n";
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto& t = traces[k].second;
        const auto& r = replays[k];
        for (std::size_t s = 0; s < r.utilization.size(); ++s) {
            for (std::size_t i = 0; i < t.fleet.size(); ++i) {
                if (!r.active[s][i]) continue;
                out.utilization_csv +=
                    fmt::format("{},{},{},{:.6f}\n", traces[k].first, s, t.fleet[i].id, r.utilization[s][i]);
            }
        }
    }
    return out;
}

}  // namespace vmc
