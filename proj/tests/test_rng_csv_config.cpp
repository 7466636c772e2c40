#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jsel/config.hpp"
#include "jsel/csv.hpp"
#include "jsel/rng.hpp"

using namespace jsel;

TEST_SUITE_BEGIN("unit");

TEST_CASE("rng streams are deterministic and seeds split cleanly") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(a.next_u64() != c.next_u64());

    CHECK(child_seed(1, 0) != child_seed(1, 1));
    CHECK(child_seed(1, 0) != child_seed(2, 0));
    CHECK(child_seed(1, {0, 1}) != child_seed(1, {1, 0}));
    CHECK(child_seed(5, {3, 7}) == child_seed(child_seed(5, 3), 7));
}

TEST_CASE("gaussian stream has the right moments") {
    Rng rng(7);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.005);
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("next_below is in range and hits all residues") {
    Rng rng(11);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.next_below(7);
        REQUIRE(v < 7);
        ++seen[static_cast<std::size_t>(v)];
    }
    for (int count : seen) CHECK(count > 800);
}

TEST_CASE("float formatting is locale-free and round-trips at 17 digits") {
    CHECK(format_g6(0.1234567) == "0.123457");
    CHECK(format_g6(1.0) == "1");
    const double v = 0.1 + 0.2;
    std::istringstream in("x\n" + format_g17(v) + "\n");
    const Table t = read_table(in);
    CHECK(t.values(0, 0) == v);
}

TEST_CASE("csv table round trip and error coordinates") {
    Table t;
    t.columns = {"a", "b"};
    t.values.resize(2, 2);
    t.values << 1.5, -2.25, 3.0, 1e-17;
    std::ostringstream out;
    write_table(out, t, 17);
    std::istringstream in(out.str());
    const Table back = read_table(in);
    CHECK(back.columns == t.columns);
    CHECK((back.values - t.values).cwiseAbs().maxCoeff() == 0.0);

    std::istringstream bad("a,b\n1,oops\n");
    CHECK_THROWS_WITH_AS(read_table(bad, "f.csv"), doctest::Contains("row 1, column 2"),
                         data_error);
    std::istringstream missing("a,b\n1,\n");
    CHECK_THROWS_AS(read_table(missing), data_error);
    std::istringstream ragged("a,b\n1,2,3\n");
    CHECK_THROWS_AS(read_table(ragged), data_error);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_table(empty), data_error);
}

TEST_CASE("grid spec parsing") {
    const auto lin = parse_grid_spec("0.05:2.5:10");
    REQUIRE(lin.size() == 10);
    CHECK(lin.front() == 0.05);
    CHECK(lin.back() == 2.5);
    CHECK(lin[1] - lin[0] == doctest::Approx((2.5 - 0.05) / 9).epsilon(1e-12));

    const auto lg = parse_grid_spec("0.01:5:25:log");
    REQUIRE(lg.size() == 25);
    CHECK(lg.front() == 0.01);
    CHECK(lg.back() == 5.0);
    CHECK(lg[1] / lg[0] == doctest::Approx(lg[2] / lg[1]).epsilon(1e-9));

    CHECK(parse_grid_spec("2:2:1") == std::vector<double>{2.0});
    CHECK_THROWS_AS(parse_grid_spec("1:2:1"), param_error);
    CHECK_THROWS_AS(parse_grid_spec("3:1:5"), param_error);
    CHECK_THROWS_AS(parse_grid_spec("0:1:5:log"), param_error);
    CHECK_THROWS_AS(parse_grid_spec("1:2"), param_error);
}

TEST_CASE("method token parsing") {
    CHECK(parse_method("lasso").type == MethodType::single);
    CHECK(parse_method("enet").selector == SelectorKind::enet);
    CHECK(parse_method("jitter_oracle").type == MethodType::jitter_oracle);
    CHECK(parse_method("jitter_gap").type == MethodType::jitter_gap);
    const auto ss = parse_method("stabsel_lasso_0.7");
    CHECK(ss.type == MethodType::stabsel);
    CHECK(ss.tau == 0.7);
    CHECK(parse_method("stabsel_enet_0.9").selector == SelectorKind::enet);
    CHECK_THROWS_AS(parse_method("ridge"), param_error);
}

namespace {

const char* kConfigText = R"(# sample campaign
[problem]
n = 40
p = 30
active_set = 5, 10, 15
coefficients = 3, 2, 1
rho_rel = 0.5
rho_irr = 0.05
rho_mix = 0.4
sigma_eps = 1.0

[campaign]
delta_obs = 0, 0.5
n_rep = 3
methods = lasso, stabsel_lasso_0.6, jitter_oracle, jitter_gap

[selector]
lambda = auto
alpha = 0.5

[jitter]
grid = 0.05:2.5:4
bags = 8

[run]
seed = 99
out = out/test
)";

}  // namespace

TEST_CASE("config parsing, strictness, and hashing") {
    const SimulationConfig config = parse_simulation_config(kConfigText);
    CHECK(config.n == 40);
    CHECK(config.active_set == IndexSet{4, 9, 14});  // 1-based file, 0-based here
    CHECK(config.methods.size() == 4);
    CHECK(config.effective_lambda() == doctest::Approx(std::sqrt(std::log(30.0) / 40.0)));
    CHECK(config.seed == 99);

    CHECK_THROWS_WITH_AS(parse_simulation_config("[problem]\nbogus = 1\n"),
                         doctest::Contains("unknown key 'bogus'"), param_error);
    CHECK_THROWS_WITH_AS(parse_simulation_config("[nope]\nn = 1\n"),
                         doctest::Contains("unknown section"), param_error);

    // All violations reported at once.
    try {
        parse_simulation_config("[problem]\nbogus = 1\nworse = 2\n");
        FAIL("expected throw");
    } catch (const param_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bogus") != std::string::npos);
        CHECK(msg.find("worse") != std::string::npos);
    }

    // Hash is invariant to key order but sensitive to values.
    const SimulationConfig again = parse_simulation_config(
        "[run]\nseed = 99\nout = out/test\n[jitter]\nbags = 8\ngrid = 0.05:2.5:4\n"
        "[selector]\nalpha = 0.5\nlambda = auto\n"
        "[campaign]\nmethods = lasso, stabsel_lasso_0.6, jitter_oracle, jitter_gap\n"
        "n_rep = 3\ndelta_obs = 0, 0.5\n"
        "[problem]\nsigma_eps = 1.0\nrho_mix = 0.4\nrho_irr = 0.05\nrho_rel = 0.5\n"
        "coefficients = 3, 2, 1\nactive_set = 5, 10, 15\np = 30\nn = 40\n");
    CHECK(config_hash(config) == config_hash(again));

    SimulationConfig changed = config;
    changed.n_rep = 4;
    CHECK(config_hash(config) != config_hash(changed));

    // Worker count must not affect the hash: results are worker-independent.
    SimulationConfig w = config;
    w.workers = 7;
    CHECK(config_hash(config) == config_hash(w));
}

TEST_CASE("config validation lists every violation") {
    SimulationConfig config = parse_simulation_config(kConfigText);
    config.n_rep = 0;
    config.rho_mix = 1.5;
    try {
        validate(config);
        FAIL("expected throw");
    } catch (const param_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("n_rep") != std::string::npos);
        CHECK(msg.find("correlations") != std::string::npos);
    }
}

TEST_SUITE_END();
