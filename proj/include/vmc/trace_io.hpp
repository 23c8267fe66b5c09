#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "vmc/energy.hpp"
#include "vmc/errors.hpp"
#include "vmc/text.hpp"
#include "vmc/kernel.hpp"
#include "vmc/types.hpp"

// Trace file layout:
//
//   # key=value                      run metadata (policy, seed, grid, config)
//   # pm=id,capacity,p_min,p_max,p_sleep
//   # vm=id,start_slot,end_slot,demand
//   slot,kind,vm_id,src_pm,dst_pm    header row
//   0,arrive,3,,0                    one event per line, empty inapplicable columns

namespace vmc {

inline constexpr std::string_view kTraceHeader = "slot,kind,vm_id,src_pm,dst_pm";

namespace detail {

inline std::string opt_str(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string{}; }

inline std::string_view initial_mode_name(InitialMode m) {
    switch (m) {
    case InitialMode::PolicyDefault: return "default";
    case InitialMode::AllSleeping: return "sleeping";
    case InitialMode::AllActive: return "active";
    }
    return "default";
}

}  // namespace detail

/// Writes `trace` in the documented line format.
inline void write_trace(std::ostream& os, const SimTrace& trace) {
    const PolicyConfig& c = trace.config;
    os << fmt::format("# policy={}\n", to_string(c.policy));
    os << fmt::format("# seed={}\n", trace.seed);
    os << fmt::format("# slot_count={}\n", trace.grid.slot_count);
    os << fmt::format("# slot_seconds={}\n", trace.grid.slot_seconds);
    os << fmt::format("# initial_active={}\n", c.starts_active() ? 1 : 0);
    os << fmt::format("# t_a={}\n# t_l={}\n# t_h={}\n# alpha={}\n# beta={}\n# p_shape={}\n", c.t_a, c.t_l, c.t_h,
                      c.alpha, c.beta, c.p_shape);
    os << fmt::format("# migration_check_period={}\n# sample_size={}\n# migration_batch={}\n",
                      c.migration_check_period, c.sample_size, c.migration_batch);
    os << fmt::format("# bernoulli_allocation={}\n# initial_mode={}\n", c.bernoulli_allocation ? 1 : 0,
                      detail::initial_mode_name(c.initial_mode));
    for (const auto& pm : trace.fleet) {
        os << fmt::format("# pm={},{},{},{},{}\n", pm.id, pm.capacity, pm.p_min, pm.p_max, pm.p_sleep);
    }
    for (const auto& vm : trace.requests) {
        os << fmt::format("# vm={},{},{},{}\n", vm.id, vm.start, vm.end, vm.demand);
    }
    os << kTraceHeader << '\n';
    for (const auto& e : trace.events) {
        os << e.slot << ',' << to_string(e.kind) << ',' << detail::opt_str(e.vm) << ',' << detail::opt_str(e.src)
           << ',' << detail::opt_str(e.dst) << '\n';
    }
}

[[nodiscard]] inline std::string serialize_trace(const SimTrace& trace) {
    std::ostringstream os;
    write_trace(os, trace);
    return os.str();
}

/// A trace file read back: enough metadata to replay the run.
struct ParsedTrace {
    std::string policy;
    std::uint64_t seed = 0;
    TimeGrid grid{};
    bool initial_active = false;
    std::vector<PmSpec> fleet;
    std::vector<VmRequest> requests;
    std::vector<SimEvent> events;
};

/// Parses a trace. Throws ParseError with the offending line number.
[[nodiscard]] inline ParsedTrace read_trace(std::istream& is) {
    ParsedTrace out;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool have_grid = false;
    auto need = [&](auto opt, const char* what) {
        if (!opt) throw ParseError(line_no, std::string("bad ") + what);
        return *opt;
    };
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string_view line = detail::trim_cr(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (header_seen) throw ParseError(line_no, "metadata after header row");
            std::string_view body = line.substr(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            const std::string_view key = body.substr(0, eq);
            const std::string_view value = body.substr(eq + 1);
            if (key == "policy") {
                out.policy = std::string(value);
            } else if (key == "seed") {
                out.seed = need(detail::parse_number<std::uint64_t>(value), "seed");
            } else if (key == "slot_count") {
                out.grid.slot_count = need(detail::parse_number<Slot>(value), "slot_count");
                have_grid = true;
            } else if (key == "slot_seconds") {
                out.grid.slot_seconds = need(detail::parse_number<double>(value), "slot_seconds");
            } else if (key == "initial_active") {
                out.initial_active = need(detail::parse_number<int>(value), "initial_active") != 0;
            } else if (key == "pm") {
                const auto f = detail::split_csv(value);
                if (f.size() != 5) throw ParseError(line_no, "pm record needs 5 fields");
                out.fleet.push_back(PmSpec{need(detail::parse_number<PmId>(f[0]), "pm id"),
                                           need(detail::parse_number<CpuUnits>(f[1]), "capacity"),
                                           need(detail::parse_number<double>(f[2]), "p_min"),
                                           need(detail::parse_number<double>(f[3]), "p_max"),
                                           need(detail::parse_number<double>(f[4]), "p_sleep")});
            } else if (key == "vm") {
                const auto f = detail::split_csv(value);
                if (f.size() != 4) throw ParseError(line_no, "vm record needs 4 fields");
                out.requests.push_back(VmRequest{need(detail::parse_number<VmId>(f[0]), "vm id"),
                                                 need(detail::parse_number<Slot>(f[1]), "start"),
                                                 need(detail::parse_number<Slot>(f[2]), "end"),
                                                 need(detail::parse_number<CpuUnits>(f[3]), "demand")});
            }
            continue;
        }
        if (!header_seen) {
            if (line != kTraceHeader) throw ParseError(line_no, "expected header '" + std::string(kTraceHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() != 5) throw ParseError(line_no, "expected 5 columns");
        SimEvent e;
        e.slot = need(detail::parse_number<Slot>(f[0]), "slot");
        e.kind = need(parse_event_kind(f[1]), "event kind");
        auto opt_id = [&](std::string_view s, const char* what) -> std::optional<std::int64_t> {
            if (s.empty()) return std::nullopt;
            return need(detail::parse_number<std::int64_t>(s), what);
        };
        e.vm = opt_id(f[2], "vm_id");
        e.src = opt_id(f[3], "src_pm");
        e.dst = opt_id(f[4], "dst_pm");
        out.events.push_back(e);
    }
    if (!header_seen) throw ParseError(line_no, "missing header row");
    if (!have_grid) throw ParseError(line_no, "missing slot_count metadata");
    return out;
}

/// Per-slot fleet state rebuilt from events alone.
struct Replay {
    std::vector<std::vector<double>> utilization;
    std::vector<std::vector<std::uint8_t>> active;
};

/// @brief Replays the event log from the initial state.
///
/// Throws std::runtime_error when an event contradicts the state (unknown
/// VM, wrong source PM, capacity overflow).
[[nodiscard]] inline Replay replay(const ParsedTrace& t) {
    std::vector<PmState> fleet;
    for (const auto& spec : t.fleet) fleet.emplace_back(spec, t.initial_active ? PowerMode::Active : PowerMode::Sleeping);
    std::map<VmId, CpuUnits> demand;
    for (const auto& r : t.requests) demand[r.id] = r.demand;
    auto pm = [&](const std::optional<PmId>& id) -> PmState& {
        if (!id) throw std::runtime_error("replay: event without PM");
        return fleet[index_of(fleet, *id)];
    };
    auto vm_demand = [&](const std::optional<VmId>& id) {
        if (!id || !demand.contains(*id)) throw std::runtime_error("replay: unknown VM");
        return demand.at(*id);
    };

    Replay out;
    std::size_t next = 0;
    for (Slot s = 0; s < t.grid.slot_count; ++s) {
        for (; next < t.events.size() && t.events[next].slot == s; ++next) {
            const SimEvent& e = t.events[next];
            switch (e.kind) {
            case EventKind::Arrive: pm(e.dst).host(*e.vm, vm_demand(e.vm)); break;
            case EventKind::Depart: pm(e.src).evict(*e.vm); break;
            case EventKind::Migrate: {
                const CpuUnits d = pm(e.src).evict(*e.vm);
                pm(e.dst).host(*e.vm, d);
                break;
            }
            case EventKind::Wake: pm(e.dst).wake(); break;
            case EventKind::Sleep: pm(e.src).park(); break;
            case EventKind::Abort:
            case EventKind::Reject: break;
            }
        }
        auto& u = out.utilization.emplace_back(fleet.size(), 0.0);
        auto& a = out.active.emplace_back(fleet.size(), std::uint8_t{0});
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            u[i] = utilization(fleet[i]);
            a[i] = fleet[i].active() ? 1 : 0;
        }
    }
    return out;
}

/// Total datacenter power (W) per slot of a replayed trace.
[[nodiscard]] inline std::vector<double> power_series(const ParsedTrace& t, const Replay& r) {
    std::vector<double> out;
    out.reserve(r.utilization.size());
    for (std::size_t s = 0; s < r.utilization.size(); ++s) {
        double watts = 0.0;
        for (std::size_t i = 0; i < t.fleet.size(); ++i) {
            watts += r.active[s][i] ? power(t.fleet[i], r.utilization[s][i]) : t.fleet[i].p_sleep;
        }
        out.push_back(watts);
    }
    return out;
}

}  // namespace vmc
