#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jsel/baselines.hpp"
#include "jsel/config.hpp"
#include "jsel/csv.hpp"
#include "jsel/datagen.hpp"
#include "jsel/jitter.hpp"
#include "jsel/theory.hpp"

namespace jsel {

inline constexpr const char* kArtifactVersion = "jsel 0.1.0";

// Correlation model shared by every replication of a campaign: block
// covariance, PD projection, unit-diagonal rescale, Cholesky factor.
struct LatentModel {
    Matrix correlation;
    Matrix chol_lower;
    GroundTruth truth;
};

LatentModel build_latent_model(const SimulationConfig& config);

struct Dataset {
    DesignMatrix x0;  // standardized latent design
    Vector y;
};

// Latent design, standardization, response. Seeds: child(rep_seed, 0) for
// the design, child(rep_seed, 1) for the response noise.
Dataset make_dataset(const LatentModel& model, int n, std::uint64_t rep_seed);

struct CellResult {
    double delta_obs = 0.0;
    std::string method;
    std::optional<double> stability;
    double f1 = 0.0;
};

struct Table1Result {
    std::vector<CellResult> cells;
    std::vector<std::string> files;
    int non_converged_fits = 0;
    double wall_clock_sec = 0.0;
};

// The Monte Carlo campaign: per delta_obs and replication, generate the
// latent standardized design, the response from it, the noisy observed
// design, then run every configured method on the same (X, y). Emits
// results.csv (delta_obs,method,stability,f1), selections.csv
// (delta_obs,method,rep,feature) and manifest.json under config.out_dir.
Table1Result run_table1(const SimulationConfig& config, bool force = false);

struct PathRunResult {
    StabilityPath path;
    IndexSet relevant;
    std::vector<std::string> files;
};

// One dataset realization, frequencies over the jitter grid. Emits
// path.csv (delta,feature,frequency,is_relevant) and manifest.json.
PathRunResult run_path(const SimulationConfig& config, bool force = false);

struct AnalyzeOptions {
    double lambda = 0.0;     // 0 = sqrt(log p / n)
    bool lambda_1se = false;  // cross-validated one-standard-error rule
    double alpha = 1.0;
    std::vector<double> grid;  // default 10 equispaced in [0.05, 2.5]
    int bags = 100;
    int stabsel_bags = 100;
    std::vector<double> taus = {0.6, 0.7, 0.8, 0.9};
    int cv_folds = 10;
    std::uint64_t seed = 1;
    int max_iter = 100000;
    double tol = 1e-7;
    std::string out_dir;
    bool force = false;
};

struct AnalyzeResult {
    double lambda_used = 0.0;
    std::vector<std::string> feature_names;
    SelectionResult jitter;
    StabilityPath path;
    std::vector<std::pair<double, SelectionResult>> stabsel;
    std::vector<std::string> files;
};

// Real-data front end: strict numeric CSV in, predictors standardized,
// data-driven jitter selection plus half-sample stability selection
// baselines at the same lambda. analyze_table is the in-memory core;
// analyze reads the file and writes result CSVs when out_dir is set.
AnalyzeResult analyze_table(const Table& table, const std::string& response_column,
                            const AnalyzeOptions& options);
AnalyzeResult analyze(const std::string& data_csv, const std::string& response_column,
                      const AnalyzeOptions& options);

struct ProbeFilterResult {
    int total = 0;
    int dropped_low_max = 0;    // max expression below the 25th percentile
    int dropped_low_range = 0;  // expression range below 2
    int surviving = 0;
    double max_quantile = 0.0;
    std::vector<std::string> kept;
    std::vector<std::string> files;
};

// Column filter for expression matrices (rows = samples, columns = probes):
// drop a probe when its max value falls below the 25th percentile of all
// per-probe maxima (type-7 quantile) or its range is below 2.
ProbeFilterResult filter_probes(const std::string& expr_csv, const std::string& out_dir,
                                bool force = false);

struct TheoryBatteryResult {
    Theorem2CoverageReport coverage;
    Theorem1McReport centered_gram_small_delta;
    Theorem1McReport centered_gram_large_delta;  // expected vacuous
    Lemma1SearchReport envelope_search;
    std::vector<Remark2Report> variance_checks;
    std::vector<std::string> files;
    bool all_pass = false;
};

// The verifier battery behind `verify-theory`: Hoeffding coverage on the
// synthetic Bernoulli model, the centered-Gram Monte Carlo at a gated and
// at a vacuous noise level, the envelope falsification search, and the
// effective-noise variance identity.
TheoryBatteryResult verify_theory(const std::string& out_dir, std::uint64_t seed, double c_t,
                                  bool force = false);

}  // namespace jsel
