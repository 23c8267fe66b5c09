// Command-line front end: policy comparisons and plot-ready series.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vmc/vmc.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed, std::optional<std::size_t> reps, std::optional<std::size_t> threads) {
    vmc::ExperimentConfig cfg;
    try {
        cfg = vmc::load_experiment_config(config_path);
        if (seed) cfg.seed = *seed;
        if (reps) {
            if (*reps < 1) throw vmc::ExperimentConfigError("--reps must be >= 1");
            cfg.replications = *reps;
        }
        if (threads) cfg.threads = *threads;
    } catch (const vmc::ExperimentConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    }
    try {
        const auto result = vmc::run_experiment(cfg);
        vmc::write_reports(result, out_dir);
        std::cout << vmc::summary_text(result);
    } catch (const vmc::ExperimentConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}

int cmd_plotdata(const std::vector<std::filesystem::path>& traces, const std::filesystem::path& out) {
    std::vector<std::pair<std::string, vmc::ParsedTrace>> parsed;
    try {
        for (const auto& path : traces) {
            std::istringstream is(vmc::read_text_file(path));
            std::string label = path.filename().string();
            label = label.substr(0, label.find('.'));
            parsed.emplace_back(label, vmc::read_trace(is));
        }
    } catch (const vmc::ParseError& err) {
        std::cerr << "parse error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const vmc::IoError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitConfig;
    }
    try {
        const auto data = vmc::plot_data(parsed);
        vmc::write_text_file(out, data.power_csv);
        auto util = out;
        util.replace_filename(out.stem().string() + "_util" + out.extension().string());
        vmc::write_text_file(util, data.utilization_csv);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VM consolidation simulator: SAVE, EcoCloud and DrsLike policy comparisons"};
    app.require_subcommand(1);

    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> threads;
    auto* run = app.add_subcommand("run", "Run every configured policy over all replications and write reports");
    run->add_option("--config", config_path, "Experiment file (INI-style)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seed", seed, "Base seed (replication r uses seed + r)");
    run->add_option("--reps", reps, "Number of replications");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)");

    std::vector<std::filesystem::path> traces;
    std::filesystem::path plot_out;
    auto* plot = app.add_subcommand("plotdata", "Per-slot power and per-PM utilization series from trace files");
    plot->add_option("--trace", traces, "Trace file (repeatable)")->required();
    plot->add_option("--out", plot_out, "Power series CSV; utilization goes to <stem>_util.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kExitConfig;
    }
    if (*run) return cmd_run(config_path, out_dir, seed, reps, threads);
    return cmd_plotdata(traces, plot_out);
}
