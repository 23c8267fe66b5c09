#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "vmc/experiment.hpp"

using namespace vmc;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[experiment]
name = small
replications = 3
seed = 5
horizon_hours = 2

[fleet]
count = 10

[workload]
vms = 30
duration_min_hours = 0.5
duration_max_hours = 2

[policy.drs]
type = DrsLike

[policy.eco]
type = EcoCloud
name = eco

[policy.save]
type = SAVE
)";

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("vmc_exp_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(VMCSIM_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ParsedTrace parse(const std::string& text) {
    std::istringstream is(text);
    return read_trace(is);
}

}  // namespace

TEST(ExperimentConfig, ParsesSections) {
    const auto cfg = parse_experiment_config(kSmall);
    EXPECT_EQ(cfg.name, "small");
    EXPECT_EQ(cfg.replications, 3u);
    EXPECT_EQ(cfg.grid.slot_count, 120);
    EXPECT_EQ(cfg.fleet.count, 10u);
    EXPECT_EQ(cfg.workload.duration_min, 30);
    ASSERT_EQ(cfg.policies.size(), 3u);
    EXPECT_EQ(cfg.policies[0].label, "DrsLike");
    EXPECT_EQ(cfg.policies[1].label, "eco");
    EXPECT_EQ(cfg.policies[2].config.policy, PolicyKind::Save);
}

TEST(ExperimentConfig, Errors) {
    const std::string base = "[policy.a]\ntype = SAVE\n";
    EXPECT_THROW((void)parse_experiment_config("[experiment]\nname = x\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "t_l = 0.9\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "colour = red\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "alpha = lots\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "[bogus]\nx = 1\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config("[policy.a]\ntype = Magic\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "[policy.b]\ntype = SAVE\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "[workload]\nduration_min_hours = 7\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "[workload]\ndemand = 401\n"), ExperimentConfigError);
    EXPECT_THROW((void)parse_experiment_config(base + "[fleet]\np_min = 300\n"), ExperimentConfigError);
    EXPECT_THROW((void)load_experiment_config(scratch("nope.ini")), ExperimentConfigError);
}

TEST(Experiment, BaselineIsExactlyOneHundredPercent) {
    const auto res = run_experiment(parse_experiment_config(kSmall), false);
    ASSERT_EQ(res.summary.size(), 3u);
    EXPECT_EQ(res.summary[0].relative_cost_pct, 100.0);
    EXPECT_EQ(res.summary[0].relative_cost_std, 0.0);
    EXPECT_NE(comparison_csv(res).find("DrsLike,3,"), std::string::npos);
    for (const auto& run : res.runs) EXPECT_EQ(run.workload_hash, res.workload_hashes[run.replication]);
    EXPECT_EQ(res.runs[0].seed, 5u);
    EXPECT_EQ(res.runs.back().seed, 7u);
}

TEST(Experiment, IndependentOfThreadCount) {
    auto cfg = parse_experiment_config(kSmall);
    cfg.threads = 1;
    const auto a = run_experiment(cfg);
    cfg.threads = 4;
    const auto b = run_experiment(cfg);
    EXPECT_EQ(runs_csv(a), runs_csv(b));
    EXPECT_EQ(summary_text(a), summary_text(b));
    for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].trace_text, b.runs[i].trace_text);
}

TEST(Experiment, FixedRequestTrace) {
    const auto dir = scratch("fixed");
    fs::create_directories(dir);
    write_text_file(dir / "reqs.csv.gz", "vm_id,start_slot,end_slot,demand\n0,0,60,1\n1,10,50,2\n");
    write_text_file(dir / "exp.ini", "[experiment]\nreplications = 2\n[fleet]\ncount = 3\n"
                                     "[workload]\ntrace = reqs.csv.gz\n[policy.s]\ntype = SAVE\n");
    const auto res = run_experiment(load_experiment_config(dir / "exp.ini"));
    EXPECT_EQ(res.workload_hashes[0], res.workload_hashes[1]);
    EXPECT_EQ(res.workloads[0], "vm_id,start_slot,end_slot,demand\n0,0,60,1\n1,10,50,2\n");
    write_text_file(dir / "reqs.csv.gz", "vm_id,start_slot,end_slot,demand\n0,0,999,1\n");
    EXPECT_THROW((void)run_experiment(load_experiment_config(dir / "exp.ini")), ExperimentConfigError);
    fs::remove_all(dir);
}

TEST(PlotData, IdleOnlyTraceHasConstantPower) {
    ParsedTrace t;
    t.grid = TimeGrid{3, 60};
    t.initial_active = true;
    t.fleet = {PmSpec{0, 400, 110, 205, 0}, PmSpec{1, 400, 110, 205, 0}};
    const auto d = plot_data({{"idle", t}});
    EXPECT_EQ(d.power_csv, "slot,time_s,idle_w\n0,0,220.0000\n1,60,220.0000\n2,120,220.0000\n");
}

TEST(PlotData, FullLoadStepThenOff) {
    ParsedTrace t;
    t.grid = TimeGrid{120, 60};
    t.fleet = {PmSpec{0, 400, 110, 205, 0}};
    t.requests = {VmRequest{1, 0, 60, 400}};
    t.events = {{0, EventKind::Arrive, 1, std::nullopt, 0},
                {0, EventKind::Wake, std::nullopt, std::nullopt, 0},
                {60, EventKind::Depart, 1, 0, std::nullopt},
                {60, EventKind::Sleep, std::nullopt, 0, std::nullopt}};
    const auto d = plot_data({{"step", t}});
    std::istringstream is(d.power_csv);
    std::string line;
    std::getline(is, line);
    for (int s = 0; s < 120; ++s) {
        std::getline(is, line);
        EXPECT_EQ(line, fmt::format("{},{},{}", s, s * 60, s < 60 ? "205.0000" : "0.0000"));
    }
    EXPECT_NE(d.utilization_csv.find("step,59,0,1.000000\n"), std::string::npos);
    EXPECT_EQ(d.utilization_csv.find("step,60,"), std::string::npos);
}

TEST(PlotData, TwoTracesShareOneTimeAxis) {
    const auto res = run_experiment(parse_experiment_config(kSmall));
    const auto d = plot_data({{"drs", parse(res.runs[0].trace_text)}, {"save", parse(res.runs[2].trace_text)}});
    std::istringstream is(d.power_csv);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "slot,time_s,drs_w,save_w");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
    }
    EXPECT_EQ(rows, 120u);
}

TEST(Cli, ExitCodesAndReports) {
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    write_text_file(dir / "exp.ini", kSmall);
    EXPECT_EQ(run_cli("run --config " + (dir / "missing.ini").string() + " --out " + (dir / "o").string()), 2);
    write_text_file(dir / "bad.ini", "[policy.a]\ntype = SAVE\nt_l = 0.95\n");
    EXPECT_EQ(run_cli("run --config " + (dir / "bad.ini").string() + " --out " + (dir / "o").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);

    ASSERT_EQ(run_cli("run --config " + (dir / "exp.ini").string() + " --out " + (dir / "a").string() + " --reps 2"), 0);
    ASSERT_EQ(run_cli("run --config " + (dir / "exp.ini").string() + " --out " + (dir / "b").string() + " --reps 2"), 0);
    for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir / "a");
        EXPECT_EQ(read_text_file(entry.path()), read_text_file(dir / "b" / rel)) << rel;
    }
    EXPECT_NE(read_text_file(dir / "a" / "runs.csv").find("SAVE,1,6,"), std::string::npos);

    const auto trace = dir / "a" / "traces" / "SAVE_rep000.csv";
    ASSERT_EQ(run_cli("plotdata --trace " + trace.string() + " --out " + (dir / "power.csv").string()), 0);
    EXPECT_EQ(read_text_file(dir / "power.csv").substr(0, 21), "slot,time_s,SAVE_rep0");
    EXPECT_TRUE(fs::exists(dir / "power_util.csv"));
    write_text_file(dir / "junk.csv", "not a trace\n");
    EXPECT_EQ(run_cli("plotdata --trace " + (dir / "junk.csv").string() + " --out " + (dir / "p.csv").string()), 2);
    fs::remove_all(dir);
}
