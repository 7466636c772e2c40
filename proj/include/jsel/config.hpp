#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jsel/common.hpp"
#include "jsel/selectors.hpp"

namespace jsel {

// `lo:hi:count[:log]`; count = 1 requires lo == hi.
std::vector<double> parse_grid_spec(const std::string& spec);

enum class MethodType { single, stabsel, jitter_oracle, jitter_gap };

struct MethodSpec {
    std::string name;  // label used in result CSVs
    MethodType type = MethodType::single;
    SelectorKind selector = SelectorKind::lasso;
    double tau = 0.0;  // stabsel only
};

// Accepted tokens: lasso, enet, stabsel_lasso_<tau>, stabsel_enet_<tau>,
// jitter_oracle, jitter_gap.
MethodSpec parse_method(const std::string& token);

struct SimulationConfig {
    // [problem]
    int n = 100;
    int p = 1000;
    IndexSet active_set;               // 0-based internally; file uses 1-based ids
    std::vector<double> coefficients;  // aligned with active_set
    double rho_rel = 0.5;
    double rho_irr = 0.05;
    double rho_mix = 0.4;
    double sigma_eps = 1.0;
    double pd_floor = 1e-8;

    // [campaign]
    std::vector<double> delta_obs;
    int n_rep = 25;
    std::vector<MethodSpec> methods;

    // [selector]
    double lambda = 0.0;  // 0 means auto: sqrt(log p / n)
    double alpha = 0.5;   // mixing weight for enet methods
    int max_iter = 100000;
    double tol = 1e-7;
    double zero_tol = 0.0;

    // [jitter]
    std::vector<double> jitter_grid;
    int jitter_bags = 100;
    SelectorKind jitter_selector = SelectorKind::lasso;

    // [stability_selection]
    int stabsel_bags = 100;

    // [run]
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = OpenMP default
    std::string out_dir = "out";

    double effective_lambda() const;
    SelectorSpec selector_spec(SelectorKind kind) const;
};

// Strict sectioned key=value parser: unknown sections or keys are hard
// errors, and validation reports every violation at once.
SimulationConfig parse_simulation_config(const std::string& text,
                                         const std::string& source_name = "<config>");
SimulationConfig load_simulation_config(const std::string& path);

void validate(const SimulationConfig& config);

// FNV-1a over the sorted canonical `section.key=value` lines, so the hash
// does not depend on the order fields appear in the file.
std::string config_hash(const SimulationConfig& config);

}  // namespace jsel
