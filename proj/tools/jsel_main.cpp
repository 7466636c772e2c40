#include <charconv>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "jsel/csv.hpp"
#include "jsel/harness.hpp"
#include "jsel/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCheckFailed = 4;

struct CommonFlags {
    std::string config_path;
    std::string lambda_arg;  // number, "auto" or "auto-1se"
    std::string grid_arg;
    std::string out_dir;
    double alpha = -1.0;
    std::int64_t seed = -1;
    int workers = -1;
    int bags = -1;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_config) {
    if (with_config)
        cmd->add_option("--config", flags.config_path, "configuration file")->required();
    cmd->add_option("--seed", flags.seed, "master seed override");
    cmd->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
    cmd->add_option("--lambda", flags.lambda_arg, "penalty level, a number, auto or auto-1se");
    cmd->add_option("--alpha", flags.alpha, "elastic-net mixing weight in (0, 1]");
    cmd->add_option("--grid", flags.grid_arg, "jitter grid, lo:hi:count[:log]");
    cmd->add_option("--bags", flags.bags, "jitter bag count per grid level");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_flag("--force", flags.force, "overwrite existing results");
}

double parse_lambda_value(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !(v > 0.0))
        throw jsel::param_error("--lambda expects a positive number, auto or auto-1se, got '" + s +
                                "'");
    return v;
}

jsel::SimulationConfig load_config(const CommonFlags& flags) {
    jsel::SimulationConfig config = jsel::load_simulation_config(flags.config_path);
    if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.workers >= 0) config.workers = flags.workers;
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (flags.alpha > 0.0) config.alpha = flags.alpha;
    if (flags.bags > 0) config.jitter_bags = flags.bags;
    if (!flags.grid_arg.empty()) config.jitter_grid = jsel::parse_grid_spec(flags.grid_arg);
    if (!flags.lambda_arg.empty()) {
        if (flags.lambda_arg == "auto-1se")
            throw jsel::param_error("--lambda auto-1se applies to the analyze command only");
        config.lambda = flags.lambda_arg == "auto" ? 0.0 : parse_lambda_value(flags.lambda_arg);
    }
    jsel::validate(config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jsel: jitter-based feature selection toolkit"};
    app.require_subcommand(1);

    CommonFlags sim_flags, path_flags, analyze_flags, filter_flags, theory_flags;

    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo selection campaign");
    add_common(sim, sim_flags, true);

    auto* path = app.add_subcommand("path", "dump selection-frequency paths for one dataset");
    add_common(path, path_flags, true);

    std::string analyze_csv, analyze_response;
    int analyze_folds = 10;
    int analyze_ss_bags = 100;
    auto* analyze = app.add_subcommand("analyze", "select features from a CSV dataset");
    analyze->add_option("data", analyze_csv, "numeric CSV with a header row")->required();
    analyze->add_option("--response", analyze_response, "response column name")->required();
    analyze->add_option("--cv-folds", analyze_folds, "folds for --lambda auto-1se");
    analyze->add_option("--stabsel-bags", analyze_ss_bags, "stability-selection resamples");
    add_common(analyze, analyze_flags, false);

    std::string filter_csv;
    auto* filter = app.add_subcommand("filter-probes", "drop low-expression/low-range columns");
    filter->add_option("data", filter_csv, "expression CSV, rows = samples")->required();
    add_common(filter, filter_flags, false);

    double theory_ct = 4.0;
    auto* theory = app.add_subcommand("verify-theory", "run the theory verifier battery");
    theory->add_option("--ct", theory_ct, "absorbing constant C_t for the deviation budget");
    add_common(theory, theory_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sim) {
            const auto result = jsel::run_table1(load_config(sim_flags), sim_flags.force);
            std::printf("simulate: %zu cells, %d non-converged fits, %.1fs\n",
                        result.cells.size(), result.non_converged_fits, result.wall_clock_sec);
            for (const auto& cell : result.cells)
                std::printf("  delta_obs %-5g %-18s stability %-6s f1 %.4f\n", cell.delta_obs,
                            cell.method.c_str(),
                            cell.stability ? jsel::format_g6(*cell.stability).c_str() : "NA",
                            cell.f1);
            return kExitOk;
        }
        if (*path) {
            const auto result = jsel::run_path(load_config(path_flags), path_flags.force);
            std::printf("path: %lld levels x %lld features written\n",
                        static_cast<long long>(result.path.freqs.rows()),
                        static_cast<long long>(result.path.freqs.cols()));
            return kExitOk;
        }
        if (*analyze) {
            jsel::AnalyzeOptions options;
            options.alpha = analyze_flags.alpha > 0.0 ? analyze_flags.alpha : 1.0;
            options.cv_folds = analyze_folds;
            options.stabsel_bags = analyze_ss_bags;
            if (analyze_flags.bags > 0) options.bags = analyze_flags.bags;
            if (!analyze_flags.grid_arg.empty())
                options.grid = jsel::parse_grid_spec(analyze_flags.grid_arg);
            if (analyze_flags.seed >= 0)
                options.seed = static_cast<std::uint64_t>(analyze_flags.seed);
            if (!analyze_flags.lambda_arg.empty()) {
                if (analyze_flags.lambda_arg == "auto-1se")
                    options.lambda_1se = true;
                else if (analyze_flags.lambda_arg != "auto")
                    options.lambda = parse_lambda_value(analyze_flags.lambda_arg);
            }
            options.out_dir = analyze_flags.out_dir.empty() ? "out/analyze" : analyze_flags.out_dir;
            options.force = analyze_flags.force;
            jsel::set_workers(analyze_flags.workers);

            const auto result = jsel::analyze(analyze_csv, analyze_response, options);
            std::printf("analyze: lambda %.6g\n", result.lambda_used);
            if (result.jitter.degenerate)
                std::printf("jitter: degenerate path, no selection\n");
            else
                std::printf("jitter: tau_hat %.4g, selected %zu feature(s)\n",
                            result.jitter.tau_hat, result.jitter.selected.size());
            for (int j : result.jitter.selected)
                std::printf("  %s\n", result.feature_names[static_cast<std::size_t>(j)].c_str());
            for (const auto& [tau, sel] : result.stabsel)
                std::printf("stability selection tau %.2g: %zu feature(s)\n", tau,
                            sel.selected.size());
            return kExitOk;
        }
        if (*filter) {
            const auto result = jsel::filter_probes(
                filter_csv, filter_flags.out_dir.empty() ? "out/filter" : filter_flags.out_dir,
                filter_flags.force);
            std::printf("filter-probes: %d of %d probes survive (dropped %d low-max, %d low-range)\n",
                        result.surviving, result.total, result.dropped_low_max,
                        result.dropped_low_range);
            return kExitOk;
        }
        if (*theory) {
            jsel::set_workers(theory_flags.workers);
            const auto result = jsel::verify_theory(
                theory_flags.out_dir.empty() ? "out/theory" : theory_flags.out_dir,
                theory_flags.seed >= 0 ? static_cast<std::uint64_t>(theory_flags.seed) : 20260810ULL,
                theory_ct, theory_flags.force);
            std::printf("verify-theory: %s\n", result.all_pass ? "all checks pass" : "FAILURES");
            return result.all_pass ? kExitOk : kExitCheckFailed;
        }
    } catch (const jsel::param_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const jsel::data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitOk;
}
