#include "jsel/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jsel/csv.hpp"
#include "jsel/metrics.hpp"
#include "jsel/parallel.hpp"
#include "jsel/rng.hpp"

namespace fs = std::filesystem;

namespace jsel {

namespace {

// Seed-path tags. Top level separates commands; the per-replication tags
// separate the independent streams inside one replication.
enum : std::uint64_t {
    kTagTable1 = 1,
    kTagPath = 2,
    kTagAnalyzeJitter = 3,
    kTagAnalyzeStabsel = 4,
    kTagAnalyzeCv = 5,
    kRepDesign = 0,
    kRepResponse = 1,
    kRepObsNoise = 2,
    kRepStabselLasso = 3,
    kRepStabselEnet = 4,
    kRepJitter = 5,
};

void refuse_or_clear_manifest(const fs::path& dir, const std::string& command,
                              const std::string& hash, bool force) {
    const fs::path manifest = dir / "manifest.json";
    if (!fs::exists(manifest)) return;
    std::ifstream in(manifest);
    if (!in) return;
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (...) {
        return;  // unreadable manifest: treat the directory as free
    }
    if (doc.value("command", "") == command && doc.value("config_hash", "") == hash && !force)
        throw data_error("output directory '" + dir.string() +
                         "' already holds results for this exact configuration (hash " + hash +
                         "); pass --force to overwrite");
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& hash,
                    std::uint64_t seed, int workers, double wall_sec,
                    const std::vector<std::string>& files) {
    nlohmann::json doc;
    doc["artifact"] = kArtifactVersion;
    doc["command"] = command;
    doc["config_hash"] = hash;
    doc["seed"] = seed;
    doc["workers_requested"] = workers;
    doc["omp_max_threads"] = max_workers();
    doc["wall_clock_sec"] = wall_sec;
    doc["files"] = files;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw data_error("cannot write manifest in '" + dir.string() + "'");
    out << doc.dump(2) << '\n';
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string stability_cell(const std::optional<double>& phi) {
    return phi ? format_g6(*phi) : std::string("NA");
}

}  // namespace

LatentModel build_latent_model(const SimulationConfig& config) {
    CovarianceSpec cov;
    cov.p = config.p;
    cov.active_set = config.active_set;
    cov.rho_rel = config.rho_rel;
    cov.rho_irr = config.rho_irr;
    cov.rho_mix = config.rho_mix;

    LatentModel model;
    model.correlation =
        rescale_to_correlation(nearest_pd(build_block_covariance(cov), config.pd_floor));
    model.chol_lower = mvn_factor(model.correlation);
    model.truth =
        make_ground_truth(config.p, config.active_set, config.coefficients, config.sigma_eps);
    return model;
}

Dataset make_dataset(const LatentModel& model, int n, std::uint64_t rep_seed) {
    Dataset data;
    data.x0 = standardize(sample_mvn_factor(n, model.chol_lower, child_seed(rep_seed, kRepDesign)));
    data.y = generate_response(data.x0, model.truth, child_seed(rep_seed, kRepResponse));
    return data;
}

Table1Result run_table1(const SimulationConfig& config, bool force) {
    validate(config);
    const auto t_start = std::chrono::steady_clock::now();
    set_workers(config.workers);

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    const std::string hash = config_hash(config);
    refuse_or_clear_manifest(dir, "simulate", hash, force);

    const LatentModel model = build_latent_model(config);
    const int n_cells = static_cast<int>(config.delta_obs.size());
    const int n_methods = static_cast<int>(config.methods.size());
    const int n_rep = config.n_rep;

    bool want_jitter = false, want_ss_lasso = false, want_ss_enet = false;
    for (const auto& m : config.methods) {
        if (m.type == MethodType::jitter_oracle || m.type == MethodType::jitter_gap)
            want_jitter = true;
        if (m.type == MethodType::stabsel && m.selector == SelectorKind::lasso)
            want_ss_lasso = true;
        if (m.type == MethodType::stabsel && m.selector == SelectorKind::enet)
            want_ss_enet = true;
    }

    // selections[cell][method][rep]
    std::vector<std::vector<std::vector<IndexSet>>> selections(
        n_cells, std::vector<std::vector<IndexSet>>(n_methods, std::vector<IndexSet>(n_rep)));
    std::vector<int> non_converged(static_cast<std::size_t>(n_cells) * n_rep, 0);

    parallel_for(static_cast<std::int64_t>(n_cells) * n_rep, [&](std::int64_t task) {
        const int cell = static_cast<int>(task / n_rep);
        const int rep = static_cast<int>(task % n_rep);
        const double delta_obs = config.delta_obs[static_cast<std::size_t>(cell)];
        const std::uint64_t rep_seed =
            child_seed(config.seed, {kTagTable1, static_cast<std::uint64_t>(cell),
                                     static_cast<std::uint64_t>(rep)});

        const Dataset data = make_dataset(model, config.n, rep_seed);
        const DesignMatrix observed =
            add_observation_noise(data.x0, delta_obs, child_seed(rep_seed, kRepObsNoise));
        // Every method sees the column-standardized observed design; the
        // jittered fits re-standardize per bag (FitPolicy::standardized), so
        // the fixed penalty always acts relative to the column scale.
        const Matrix x = standardize(observed).values;

        FitDiagnostics diag;
        Vector ss_lasso_freqs, ss_enet_freqs, jitter_avg;
        if (want_ss_lasso)
            ss_lasso_freqs = stability_selection_frequencies(
                x, data.y, config.selector_spec(SelectorKind::lasso), config.stabsel_bags,
                child_seed(rep_seed, kRepStabselLasso), &diag);
        if (want_ss_enet)
            ss_enet_freqs = stability_selection_frequencies(
                x, data.y, config.selector_spec(SelectorKind::enet), config.stabsel_bags,
                child_seed(rep_seed, kRepStabselEnet), &diag);
        if (want_jitter) {
            const NoiseGrid grid = make_noise_grid(config.jitter_grid, config.jitter_bags,
                                                   child_seed(rep_seed, kRepJitter));
            const StabilityPath path =
                stability_path(x, data.y, config.selector_spec(config.jitter_selector), grid,
                               FitPolicy::standardized);
            diag.non_converged += path.diagnostics.non_converged;
            jitter_avg = delta_average(path);
        }

        for (int mi = 0; mi < n_methods; ++mi) {
            const MethodSpec& method = config.methods[static_cast<std::size_t>(mi)];
            IndexSet picked;
            switch (method.type) {
                case MethodType::single: {
                    const CoefficientVector coef =
                        fit(x, data.y, config.selector_spec(method.selector));
                    if (!coef.converged) ++diag.non_converged;
                    picked = support(coef, config.zero_tol);
                    break;
                }
                case MethodType::stabsel: {
                    const Vector& freqs = method.selector == SelectorKind::lasso
                                              ? ss_lasso_freqs
                                              : ss_enet_freqs;
                    picked = threshold_select(freqs, method.tau).selected;
                    break;
                }
                case MethodType::jitter_oracle:
                    picked = top_k_select(jitter_avg,
                                          static_cast<int>(config.active_set.size()))
                                 .selected;
                    break;
                case MethodType::jitter_gap:
                    picked = largest_gap_select(jitter_avg).selected;
                    break;
            }
            selections[static_cast<std::size_t>(cell)][static_cast<std::size_t>(mi)]
                      [static_cast<std::size_t>(rep)] = std::move(picked);
        }
        non_converged[static_cast<std::size_t>(task)] = diag.non_converged;
    });

    Table1Result result;
    for (int v : non_converged) result.non_converged_fits += v;

    for (int cell = 0; cell < n_cells; ++cell) {
        for (int mi = 0; mi < n_methods; ++mi) {
            const auto& reps = selections[static_cast<std::size_t>(cell)]
                                         [static_cast<std::size_t>(mi)];
            double f1_sum = 0.0;
            Matrix z = Matrix::Zero(n_rep, config.p);
            for (int r = 0; r < n_rep; ++r) {
                f1_sum += f1_score(reps[static_cast<std::size_t>(r)], config.active_set);
                for (int j : reps[static_cast<std::size_t>(r)]) z(r, j) = 1.0;
            }
            CellResult cr;
            cr.delta_obs = config.delta_obs[static_cast<std::size_t>(cell)];
            cr.method = config.methods[static_cast<std::size_t>(mi)].name;
            cr.f1 = f1_sum / n_rep;
            cr.stability = n_rep >= 2 ? nogueira_stability(z) : std::nullopt;
            result.cells.push_back(std::move(cr));
        }
    }

    {
        auto out = open_output(dir / "results.csv");
        out << "delta_obs,method,stability,f1\n";
        for (const auto& cr : result.cells)
            out << format_g6(cr.delta_obs) << ',' << cr.method << ','
                << stability_cell(cr.stability) << ',' << format_g6(cr.f1) << '\n';
    }
    {
        auto out = open_output(dir / "selections.csv");
        out << "delta_obs,method,rep,feature\n";
        for (int cell = 0; cell < n_cells; ++cell)
            for (int mi = 0; mi < n_methods; ++mi)
                for (int r = 0; r < n_rep; ++r)
                    for (int j : selections[static_cast<std::size_t>(cell)]
                                           [static_cast<std::size_t>(mi)]
                                           [static_cast<std::size_t>(r)])
                        out << format_g6(config.delta_obs[static_cast<std::size_t>(cell)]) << ','
                            << config.methods[static_cast<std::size_t>(mi)].name << ',' << (r + 1)
                            << ',' << (j + 1) << '\n';
    }
    result.files = {"results.csv", "selections.csv"};

    result.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_manifest(dir, "simulate", hash, config.seed, config.workers, result.wall_clock_sec,
                   result.files);
    return result;
}

PathRunResult run_path(const SimulationConfig& config, bool force) {
    validate(config);
    set_workers(config.workers);
    const auto t_start = std::chrono::steady_clock::now();

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    const std::string hash = config_hash(config);
    refuse_or_clear_manifest(dir, "path", hash, force);

    const LatentModel model = build_latent_model(config);
    const std::uint64_t run_seed = child_seed(config.seed, kTagPath);
    const Dataset data = make_dataset(model, config.n, run_seed);

    const NoiseGrid grid = make_noise_grid(config.jitter_grid, config.jitter_bags,
                                           child_seed(run_seed, kRepJitter));
    PathRunResult result;
    result.path = stability_path(data.x0.values, data.y,
                                 config.selector_spec(config.jitter_selector), grid,
                                 FitPolicy::standardized);
    result.relevant = config.active_set;

    {
        auto out = open_output(dir / "path.csv");
        out << "delta,feature,frequency,is_relevant\n";
        for (Eigen::Index d = 0; d < result.path.freqs.rows(); ++d)
            for (Eigen::Index j = 0; j < result.path.freqs.cols(); ++j)
                out << format_g6(grid.deltas[static_cast<std::size_t>(d)]) << ',' << (j + 1) << ','
                    << format_g6(result.path.freqs(d, j)) << ','
                    << (contains(config.active_set, static_cast<int>(j)) ? 1 : 0) << '\n';
    }
    result.files = {"path.csv"};

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_manifest(dir, "path", hash, config.seed, config.workers, wall, result.files);
    return result;
}

AnalyzeResult analyze_table(const Table& table, const std::string& response_column,
                            const AnalyzeOptions& options) {
    if (table.values.rows() < 2) throw data_error("analyze: need at least 2 data rows");

    Eigen::Index response_idx = -1;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        if (table.columns[c] == response_column) response_idx = static_cast<Eigen::Index>(c);
    if (response_idx < 0)
        throw data_error("analyze: response column '" + response_column + "' not found");
    if (table.values.cols() < 3)
        throw data_error("analyze: need at least two predictor columns");

    AnalyzeResult result;
    const Eigen::Index p = table.values.cols() - 1;
    Matrix x_raw(table.values.rows(), p);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
        if (c == response_idx) continue;
        x_raw.col(k) = table.values.col(c);
        result.feature_names.push_back(table.columns[static_cast<std::size_t>(c)]);
        ++k;
    }
    const Vector y = table.values.col(response_idx);

    DesignMatrix raw;
    raw.values = x_raw;
    const DesignMatrix x = standardize(raw);

    result.lambda_used =
        options.lambda_1se
            ? cv_lambda_1se(x.values, y, options.alpha, options.cv_folds,
                            child_seed(options.seed, kTagAnalyzeCv))
            : (options.lambda > 0.0
                   ? options.lambda
                   : default_lambda(static_cast<int>(x.values.rows()), static_cast<int>(p)));

    SelectorSpec spec;
    spec.kind = options.alpha == 1.0 ? SelectorKind::lasso : SelectorKind::enet;
    spec.alpha = options.alpha;
    spec.lambda = result.lambda_used;
    spec.max_iter = options.max_iter;
    spec.tol = options.tol;

    std::vector<double> grid = options.grid;
    if (grid.empty()) grid = parse_grid_spec("0.05:2.5:10");
    const NoiseGrid noise =
        make_noise_grid(grid, options.bags, child_seed(options.seed, kTagAnalyzeJitter));
    result.path = stability_path(x.values, y, spec, noise, FitPolicy::standardized);
    result.jitter = largest_gap_select(delta_average(result.path));

    const Vector ss_freqs = stability_selection_frequencies(
        x.values, y, spec, options.stabsel_bags, child_seed(options.seed, kTagAnalyzeStabsel));
    for (double tau : options.taus)
        result.stabsel.emplace_back(tau, threshold_select(ss_freqs, tau));
    return result;
}

AnalyzeResult analyze(const std::string& data_csv, const std::string& response_column,
                      const AnalyzeOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    AnalyzeResult result = analyze_table(read_table_file(data_csv), response_column, options);
    const std::vector<double>& grid = result.path.grid.deltas;

    if (!options.out_dir.empty()) {
        const fs::path dir(options.out_dir);
        fs::create_directories(dir);
        {
            auto out = open_output(dir / "jitter_selection.csv");
            write_selection_csv(out, result.jitter, result.feature_names);
        }
        {
            auto out = open_output(dir / "stability_path.csv");
            write_stability_path_csv(out, result.path);
        }
        result.files = {"jitter_selection.csv", "stability_path.csv"};
        for (const auto& [tau, sel] : result.stabsel) {
            const std::string name = "stabsel_tau" + format_g6(tau) + ".csv";
            auto out = open_output(dir / name);
            write_selection_csv(out, sel, result.feature_names);
            result.files.push_back(name);
        }
        {
            auto out = open_output(dir / "summary.txt");
            out << kArtifactVersion << " analyze\n";
            out << "input: " << data_csv << "\n";
            out << "response: " << response_column << "\n";
            out << "p: " << result.feature_names.size() << "\n";
            out << "lambda: " << format_g6(result.lambda_used)
                << (options.lambda_1se ? " (cv 1se)" : "") << "\n";
            out << "alpha: " << format_g6(options.alpha) << "\n";
            out << "jitter grid: " << grid.size() << " levels in [" << format_g6(grid.front())
                << ", " << format_g6(grid.back()) << "], bags: " << options.bags << "\n";
            out << "non-converged fits: " << result.path.diagnostics.non_converged << "\n";
            if (result.jitter.degenerate)
                out << "jitter: degenerate path (all averaged frequencies equal); no selection\n";
            else
                out << "jitter: tau_hat " << format_g6(result.jitter.tau_hat) << ", s_hat "
                    << result.jitter.s_hat << ", selected " << result.jitter.selected.size()
                    << "\n";
            for (int j : result.jitter.selected)
                out << "  " << result.feature_names[static_cast<std::size_t>(j)] << "\n";
            for (const auto& [tau, sel] : result.stabsel) {
                out << "stability selection tau " << format_g6(tau) << ": selected "
                    << sel.selected.size() << "\n";
                for (int j : sel.selected)
                    out << "  " << result.feature_names[static_cast<std::size_t>(j)] << "\n";
            }
        }
        result.files.push_back("summary.txt");
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        write_manifest(dir, "analyze", "analyze", options.seed, 0, wall, result.files);
    }
    return result;
}

ProbeFilterResult filter_probes(const std::string& expr_csv, const std::string& out_dir,
                                bool force) {
    const Table table = read_table_file(expr_csv);
    if (table.values.rows() == 0) throw data_error(expr_csv + ": no data rows");
    const Eigen::Index p = table.values.cols();

    Vector col_max(p), col_range(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        col_max[j] = table.values.col(j).maxCoeff();
        col_range[j] = col_max[j] - table.values.col(j).minCoeff();
    }

    // Type-7 quantile (linear interpolation between order statistics).
    std::vector<double> sorted(col_max.data(), col_max.data() + p);
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(p - 1) * 0.25;
    const auto lo = static_cast<std::size_t>(h);
    const double q25 = lo + 1 < sorted.size()
                           ? sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo])
                           : sorted[lo];

    ProbeFilterResult result;
    result.total = static_cast<int>(p);
    result.max_quantile = q25;
    std::vector<Eigen::Index> kept_idx;
    for (Eigen::Index j = 0; j < p; ++j) {
        const bool low_max = col_max[j] < q25;
        const bool low_range = col_range[j] < 2.0;
        if (low_max) ++result.dropped_low_max;
        if (low_range) ++result.dropped_low_range;
        if (!low_max && !low_range) {
            kept_idx.push_back(j);
            result.kept.push_back(table.columns[static_cast<std::size_t>(j)]);
        }
    }
    result.surviving = static_cast<int>(kept_idx.size());

    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        if (!force && fs::exists(dir / "filtered.csv"))
            throw data_error("output '" + (dir / "filtered.csv").string() +
                             "' already exists; pass --force to overwrite");
        Table filtered;
        filtered.columns = result.kept;
        filtered.values.resize(table.values.rows(), static_cast<Eigen::Index>(kept_idx.size()));
        for (std::size_t c = 0; c < kept_idx.size(); ++c)
            filtered.values.col(static_cast<Eigen::Index>(c)) = table.values.col(kept_idx[c]);
        write_table_file((dir / "filtered.csv").string(), filtered, 17);
        {
            auto out = open_output(dir / "report.txt");
            out << kArtifactVersion << " filter-probes\n";
            out << "input: " << expr_csv << "\n";
            out << "probes: " << result.total << "\n";
            out << "25th percentile of per-probe maxima (type-7): " << format_g6(q25) << "\n";
            out << "dropped, max below percentile: " << result.dropped_low_max << "\n";
            out << "dropped, range below 2: " << result.dropped_low_range << "\n";
            out << "surviving: " << result.surviving << "\n";
        }
        result.files = {"filtered.csv", "report.txt"};
    }
    return result;
}

TheoryBatteryResult verify_theory(const std::string& out_dir, std::uint64_t seed, double c_t,
                                  bool force) {
    TheoryBatteryResult battery;

    battery.coverage = theorem2_coverage_check(10, 1000, 100, 0.05, 200, child_seed(seed, 11));

    // Well-conditioned small design for the centered-Gram check: a modest
    // block correlation sampled at n >> p, standardized.
    {
        CovarianceSpec cov;
        cov.p = 8;
        cov.active_set = {0, 1};
        cov.rho_rel = 0.3;
        cov.rho_irr = 0.1;
        cov.rho_mix = 0.1;
        const Matrix sigma = rescale_to_correlation(nearest_pd(build_block_covariance(cov)));
        const DesignMatrix x =
            standardize(sample_mvn(400, sigma, child_seed(seed, 12)));
        const GramSummary summary = ic_margin(gram(x.values), cov.active_set);
        const Lemma1Constants lem =
            lemma1_delta0(gram(x.values), cov.active_set, 1.0, 1.0, summary.eta);
        const double budget = 2.0 * lem.delta0;

        // Largest delta whose deviation budget fits the envelope, by
        // bisection; run the Monte Carlo safely inside at 0.8 of it.
        double lo = 0.0, hi = 1.0;
        const double m_bound = design_column_bound(x.values);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const Theorem1Epsilon th = theorem1_epsilon(400, 8, mid, m_bound, 0.05, c_t);
            (th.eps <= budget ? lo : hi) = mid;
        }
        battery.centered_gram_small_delta = verify_theorem1_mc(
            x.values, cov.active_set, 0.8 * lo, 0.05, 500, child_seed(seed, 13), 1.0, 1.0, c_t);
        battery.centered_gram_large_delta = verify_theorem1_mc(
            x.values, cov.active_set, 2.0, 0.05, 500, child_seed(seed, 14), 1.0, 1.0, c_t);
    }

    {
        CovarianceSpec cov;
        cov.p = 6;
        cov.active_set = {0, 1};
        cov.rho_rel = 0.3;
        cov.rho_irr = 0.2;
        cov.rho_mix = 0.1;
        const Matrix sigma = rescale_to_correlation(nearest_pd(build_block_covariance(cov)));
        battery.envelope_search =
            lemma1_falsification_search(sigma, cov.active_set, 1.0, 1.0, 10000, 100,
                                        child_seed(seed, 15));
    }

    {
        IndexSet s = {199, 399, 599, 799, 999};
        const GroundTruth truth = make_ground_truth(1000, s, {5, 4, 3, 2, 1}, 1.0);
        for (double delta : {0.0, 1.0, 2.0})
            battery.variance_checks.push_back(remark2_variance_check(
                truth.beta, 1.0, delta, 100, 1000,
                child_seed(seed, {16, static_cast<std::uint64_t>(delta * 8)})));
    }

    battery.all_pass = battery.coverage.pass && battery.centered_gram_small_delta.pass &&
                       battery.centered_gram_large_delta.pass && battery.envelope_search.pass;
    for (const auto& r : battery.variance_checks) battery.all_pass = battery.all_pass && r.pass;

    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        if (!force && fs::exists(dir / "theory_report.txt"))
            throw data_error("output '" + (dir / "theory_report.txt").string() +
                             "' already exists; pass --force to overwrite");
        auto txt = open_output(dir / "theory_report.txt");
        auto csv = open_output(dir / "theory_report.csv");
        csv << "check,value,threshold,pass\n";

        const auto& cov = battery.coverage;
        txt << "hoeffding coverage (m=10, p=1000, B=100, alpha=0.05):\n"
            << "  eps " << format_g6(cov.eps) << ", exceedances " << cov.exceed_count << "/"
            << cov.n_reps << " (critical " << cov.critical_count << ") -> "
            << (cov.pass ? "pass" : "FAIL") << "\n";
        csv << "hoeffding_coverage," << cov.exceed_count << ',' << cov.critical_count << ','
            << (cov.pass ? 1 : 0) << '\n';

        auto report_t1 = [&](const char* name, const Theorem1McReport& r) {
            txt << name << " (C_t " << format_g6(r.c_t) << "):\n";
            if (r.vacuous) {
                txt << "  vacuous: " << r.reason << "\n";
                csv << name << ",vacuous,," << (r.pass ? 1 : 0) << '\n';
            } else {
                txt << "  eta " << format_g6(r.eta) << ", eps " << format_g6(r.eps)
                    << " within budget " << format_g6(r.eps_budget) << "\n"
                    << "  coverage " << format_g6(r.coverage) << " of " << r.reps
                    << " draws (needs >= " << format_g6(r.min_coverage) << ") -> "
                    << (r.pass ? "pass" : "FAIL") << "\n";
                csv << name << ',' << format_g6(r.coverage) << ',' << format_g6(r.min_coverage)
                    << ',' << (r.pass ? 1 : 0) << '\n';
            }
        };
        report_t1("centered_gram_small_delta", battery.centered_gram_small_delta);
        report_t1("centered_gram_large_delta", battery.centered_gram_large_delta);

        const auto& env = battery.envelope_search;
        txt << "envelope falsification search:\n"
            << "  probes " << env.n_probes << ", budget " << format_g6(env.budget)
            << ", worst ic norm " << format_g6(env.worst_ic_norm) << " vs bound "
            << format_g6(env.bound) << ", violations " << env.violations << ", singular "
            << env.singular << " -> " << (env.pass ? "pass" : "FAIL") << "\n";
        csv << "envelope_search," << format_g6(env.worst_ic_norm) << ',' << format_g6(env.bound)
            << ',' << (env.pass ? 1 : 0) << '\n';

        for (const auto& r : battery.variance_checks) {
            txt << "effective-noise variance: sample " << format_g6(r.sample_var) << " vs "
                << format_g6(r.expected) << " (rel err " << format_g6(r.rel_err) << ") -> "
                << (r.pass ? "pass" : "FAIL") << "\n";
            csv << "effective_noise_variance," << format_g6(r.sample_var) << ','
                << format_g6(r.expected) << ',' << (r.pass ? 1 : 0) << '\n';
        }
        txt << (battery.all_pass ? "ALL CHECKS PASS\n" : "CHECK FAILURES PRESENT\n");
        battery.files = {"theory_report.txt", "theory_report.csv"};
    }
    return battery;
}

}  // namespace jsel
