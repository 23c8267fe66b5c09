#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vmc/errors.hpp"
#include "vmc/fileio.hpp"
#include "vmc/random.hpp"
#include "vmc/text.hpp"
#include "vmc/types.hpp"

namespace vmc {

enum class ArrivalPattern { AllAtStart, UniformOverHorizon };

[[nodiscard]] inline std::string_view to_string(ArrivalPattern a) noexcept {
    return a == ArrivalPattern::AllAtStart ? "all_at_start" : "uniform_over_horizon";
}

/// Synthetic workload: `n_vms` requests with whole-slot durations drawn
/// uniformly from [duration_min, duration_max] and demands uniform over
/// [demand, demand_max] (a single value when demand_max is 0).
struct WorkloadSpec {
    std::size_t n_vms = 100;
    Slot horizon = 360;
    Slot duration_min = 60;
    Slot duration_max = 360;
    CpuUnits demand = 1;
    CpuUnits demand_max = 0;
    ArrivalPattern arrival = ArrivalPattern::UniformOverHorizon;
    std::uint64_t seed = 1;

    /// Six-hour horizon with one-to-six-hour durations on `grid`.
    static WorkloadSpec hours(std::size_t n_vms, const TimeGrid& grid, double min_hours = 1.0,
                              double max_hours = 6.0) {
        WorkloadSpec w;
        w.n_vms = n_vms;
        w.horizon = grid.slot_count;
        w.duration_min = grid.slots_in_hours(min_hours);
        w.duration_max = grid.slots_in_hours(max_hours);
        return w;
    }
};

class WorkloadError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// @brief Generates requests sorted by (start, id); deterministic in `spec.seed`.
///
/// Start slots are 0 for all_at_start, otherwise uniform over
/// [0, horizon - duration_min] so every realized duration is at least the
/// minimum. End slots are clipped to the horizon.
[[nodiscard]] inline std::vector<VmRequest> generate(const WorkloadSpec& spec) {
    if (spec.duration_min < 1 || spec.duration_max < spec.duration_min) {
        throw WorkloadError("duration range must satisfy 1 <= min <= max");
    }
    if (spec.duration_min > spec.horizon) throw WorkloadError("HorizonTooShort: minimum duration exceeds horizon");
    if (spec.demand < 1 || (spec.demand_max != 0 && spec.demand_max < spec.demand)) {
        throw WorkloadError("demand range must satisfy 1 <= demand <= demand_max");
    }
    Rng rng(spec.seed);
    std::uniform_int_distribution<Slot> duration(spec.duration_min, spec.duration_max);
    std::uniform_int_distribution<Slot> start(0, spec.horizon - spec.duration_min);
    std::uniform_int_distribution<CpuUnits> demand(spec.demand, std::max(spec.demand, spec.demand_max));

    std::vector<VmRequest> out;
    out.reserve(spec.n_vms);
    for (std::size_t i = 0; i < spec.n_vms; ++i) {
        VmRequest r;
        r.id = static_cast<VmId>(i);
        r.start = spec.arrival == ArrivalPattern::AllAtStart ? 0 : start(rng);
        r.end = std::min(r.start + duration(rng), spec.horizon);
        r.demand = demand(rng);
        out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(), [](const VmRequest& a, const VmRequest& b) { return a.start < b.start; });
    return out;
}

inline constexpr std::string_view kRequestHeader = "vm_id,start_slot,end_slot,demand";

[[nodiscard]] inline std::string serialize_requests(const std::vector<VmRequest>& requests) {
    std::ostringstream os;
    os << kRequestHeader << '\n';
    for (const auto& r : requests) os << r.id << ',' << r.start << ',' << r.end << ',' << r.demand << '\n';
    return os.str();
}

/// Optional bounds checked while ingesting: horizon k and largest PM capacity.
struct IngestLimits {
    std::optional<Slot> horizon;
    std::optional<CpuUnits> max_capacity;
};

/// Parses the request format. Throws ParseError for malformed lines and
/// InvariantError for well-formed lines that violate a request bound.
[[nodiscard]] inline std::vector<VmRequest> parse_requests(std::string_view text, const IngestLimits& limits = {}) {
    std::vector<VmRequest> out;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    std::vector<VmId> ids;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view line =
            detail::trim_cr(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kRequestHeader) throw ParseError(line_no, "expected header '" + std::string(kRequestHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() != 4) throw ParseError(line_no, "expected 4 comma-separated integers");
        std::int64_t v[4];
        for (std::size_t i = 0; i < 4; ++i) {
            auto n = detail::parse_number<std::int64_t>(f[i]);
            if (!n) throw ParseError(line_no, "field " + std::to_string(i + 1) + " is not an integer");
            v[i] = *n;
        }
        const VmRequest r{v[0], v[1], v[2], v[3]};
        if (r.start < 0) throw InvariantError(line_no, "start_slot must be >= 0");
        if (r.end <= r.start) throw InvariantError(line_no, "end_slot must exceed start_slot");
        if (limits.horizon && r.end > *limits.horizon) throw InvariantError(line_no, "end_slot exceeds the horizon");
        if (r.demand <= 0) throw InvariantError(line_no, "demand must be positive");
        if (limits.max_capacity && r.demand > *limits.max_capacity) {
            throw InvariantError(line_no, "demand exceeds the largest PM capacity");
        }
        ids.push_back(r.id);
        out.push_back(r);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InvariantError(line_no, "duplicate vm_id");
    std::sort(out.begin(), out.end(),
              [](const VmRequest& a, const VmRequest& b) { return std::tie(a.start, a.id) < std::tie(b.start, b.id); });
    return out;
}

/// Reads a request trace file (plain or `.gz`).
[[nodiscard]] inline std::vector<VmRequest> ingest(const std::filesystem::path& path, const IngestLimits& limits = {}) {
    return parse_requests(read_text_file(path), limits);
}

inline void write_requests(const std::filesystem::path& path, const std::vector<VmRequest>& requests) {
    write_text_file(path, serialize_requests(requests));
}

/// 64-bit FNV-1a of the serialized request list; identifies a workload in reports.
[[nodiscard]] inline std::uint64_t workload_hash(const std::vector<VmRequest>& requests) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_requests(requests)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace vmc
