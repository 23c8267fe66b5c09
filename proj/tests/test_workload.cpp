#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <unistd.h>

#include "vmc/workload.hpp"

using namespace vmc;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("vmc_workload_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Generate, DeterministicInSeed) {
    WorkloadSpec w = WorkloadSpec::hours(100, TimeGrid{});
    w.seed = 9;
    EXPECT_EQ(generate(w), generate(w));
    WorkloadSpec v = w;
    v.seed = 10;
    EXPECT_NE(generate(w), generate(v));
}

TEST(Generate, SixHourDurationsAtStartFillTheHorizon) {
    WorkloadSpec w = WorkloadSpec::hours(50, TimeGrid{}, 6.0, 6.0);
    w.arrival = ArrivalPattern::AllAtStart;
    for (const auto& r : generate(w)) {
        EXPECT_EQ(r.start, 0);
        EXPECT_EQ(r.end, 360);
    }
}

TEST(Generate, BoundsHold) {
    WorkloadSpec w = WorkloadSpec::hours(150, TimeGrid{});
    w.demand_max = 8;
    const auto reqs = generate(w);
    ASSERT_EQ(reqs.size(), 150u);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        const auto& r = reqs[i];
        EXPECT_GE(r.start, 0);
        EXPECT_LE(r.end, 360);
        EXPECT_GE(r.end - r.start, 60);
        EXPECT_GE(r.demand, 1);
        EXPECT_LE(r.demand, 8);
        if (i > 0) {
            EXPECT_LE(reqs[i - 1].start, r.start);
        }
    }
}

TEST(Generate, RejectsImpossibleSpecs) {
    WorkloadSpec w;
    w.duration_min = 400;
    w.duration_max = 400;
    EXPECT_THROW((void)generate(w), WorkloadError);
    w = WorkloadSpec{};
    w.duration_max = 10;
    EXPECT_THROW((void)generate(w), WorkloadError);
}

TEST(Ingest, ThreeLines) {
    const auto reqs = parse_requests("vm_id,start_slot,end_slot,demand\n2,5,9,3\n0,0,4,1\r\n1,0,2,2\n");
    ASSERT_EQ(reqs.size(), 3u);
    EXPECT_EQ(reqs[0], (VmRequest{0, 0, 4, 1}));
    EXPECT_EQ(reqs[1], (VmRequest{1, 0, 2, 2}));
    EXPECT_EQ(reqs[2], (VmRequest{2, 5, 9, 3}));
}

TEST(Ingest, EmptyInputHasNoRequests) {
    EXPECT_TRUE(parse_requests("").empty());
    EXPECT_TRUE(parse_requests("vm_id,start_slot,end_slot,demand\n").empty());
}

TEST(Ingest, ErrorsCarryTheLine) {
    try {
        (void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,4,1\n2,7,7,1\n");
        FAIL();
    } catch (const InvariantError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        (void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,x,1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW((void)parse_requests("id,s,e,d\n"), ParseError);
    EXPECT_THROW((void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,4\n"), ParseError);
    EXPECT_THROW((void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,4,1\n1,1,4,1\n"), InvariantError);
    EXPECT_THROW((void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,400,1\n", {360, 400}), InvariantError);
    EXPECT_THROW((void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,4,401\n", {360, 400}), InvariantError);
    EXPECT_THROW((void)parse_requests("vm_id,start_slot,end_slot,demand\n1,0,4,0\n"), InvariantError);
}

TEST(Ingest, PlainAndGzipFiles) {
    WorkloadSpec w = WorkloadSpec::hours(40, TimeGrid{});
    const auto reqs = generate(w);
    for (const char* name : {"reqs.csv", "reqs.csv.gz"}) {
        const auto path = temp_path(name);
        write_requests(path, reqs);
        EXPECT_EQ(ingest(path), reqs);
        std::filesystem::remove(path);
    }
    EXPECT_THROW((void)ingest(temp_path("missing.csv")), IoError);
}

TEST(Ingest, SerializeRoundTripProperty) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 200; ++trial) {
        WorkloadSpec w = WorkloadSpec::hours(gen() % 300, TimeGrid{});
        w.demand_max = static_cast<CpuUnits>(gen() % 50);
        w.arrival = gen() % 2 ? ArrivalPattern::AllAtStart : ArrivalPattern::UniformOverHorizon;
        w.seed = gen();
        const auto reqs = generate(w);
        EXPECT_EQ(parse_requests(serialize_requests(reqs), {360, 400}), reqs);
        EXPECT_EQ(workload_hash(reqs), workload_hash(parse_requests(serialize_requests(reqs))));
    }
}

TEST(WorkloadHash, DistinguishesWorkloads) {
    const std::vector<VmRequest> a{{0, 0, 4, 1}};
    const std::vector<VmRequest> b{{0, 0, 4, 2}};
    EXPECT_NE(workload_hash(a), workload_hash(b));
    EXPECT_EQ(workload_hash({}), workload_hash({}));
}
