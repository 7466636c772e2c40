#include "jsel/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "jsel/csv.hpp"

namespace jsel {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw param_error("config: " + what + ": expected a number, got '" + s + "'");
    return v;
}

long long to_int(const std::string& s, const std::string& what) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw param_error("config: " + what + ": expected an integer, got '" + s + "'");
    return v;
}

std::vector<double> to_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(to_double(tok, what));
    return out;
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    auto parts = split(spec, ':');
    if (parts.size() < 3 || parts.size() > 4)
        throw param_error("grid spec must be lo:hi:count[:log], got '" + spec + "'");
    const double lo = to_double(parts[0], "grid lo");
    const double hi = to_double(parts[1], "grid hi");
    const long long count = to_int(parts[2], "grid count");
    bool log_spaced = false;
    if (parts.size() == 4) {
        if (parts[3] != "log") throw param_error("grid spec: trailing token must be 'log'");
        log_spaced = true;
    }
    if (count < 1) throw param_error("grid spec: count must be >= 1");
    if (count == 1) {
        if (lo != hi) throw param_error("grid spec: count = 1 requires lo == hi");
        return {lo};
    }
    if (!(hi > lo)) throw param_error("grid spec: hi must exceed lo");
    if (log_spaced && !(lo > 0.0)) throw param_error("grid spec: log spacing requires lo > 0");

    std::vector<double> grid(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid[static_cast<std::size_t>(i)] =
            log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                       : lo + t * (hi - lo);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

MethodSpec parse_method(const std::string& token) {
    MethodSpec m;
    m.name = token;
    if (token == "lasso") {
        m.type = MethodType::single;
        m.selector = SelectorKind::lasso;
        return m;
    }
    if (token == "enet") {
        m.type = MethodType::single;
        m.selector = SelectorKind::enet;
        return m;
    }
    if (token == "jitter_oracle") {
        m.type = MethodType::jitter_oracle;
        return m;
    }
    if (token == "jitter_gap") {
        m.type = MethodType::jitter_gap;
        return m;
    }
    for (const auto& [prefix, kind] :
         {std::pair<std::string, SelectorKind>{"stabsel_lasso_", SelectorKind::lasso},
          std::pair<std::string, SelectorKind>{"stabsel_enet_", SelectorKind::enet}}) {
        if (token.rfind(prefix, 0) == 0) {
            m.type = MethodType::stabsel;
            m.selector = kind;
            m.tau = to_double(token.substr(prefix.size()), "method '" + token + "' threshold");
            return m;
        }
    }
    throw param_error("config: unknown method '" + token + "'");
}

double SimulationConfig::effective_lambda() const {
    return lambda > 0.0 ? lambda : default_lambda(n, p);
}

SelectorSpec SimulationConfig::selector_spec(SelectorKind kind) const {
    SelectorSpec spec;
    spec.kind = kind;
    spec.lambda = effective_lambda();
    spec.alpha = kind == SelectorKind::lasso ? 1.0 : alpha;
    spec.max_iter = max_iter;
    spec.tol = tol;
    spec.zero_tol = zero_tol;
    return spec;
}

SimulationConfig parse_simulation_config(const std::string& text,
                                         const std::string& source_name) {
    SimulationConfig config;
    std::vector<std::string> errors;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    auto fail = [&](const std::string& msg) {
        errors.push_back(source_name + ":" + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                fail("malformed section header '" + line + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            static const std::vector<std::string> known = {
                "problem", "campaign", "selector", "jitter", "stability_selection", "run"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                fail("unknown section [" + section + "]");
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("expected key = value, got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string where = "[" + section + "] " + key;

        try {
            if (section == "problem") {
                if (key == "n")
                    config.n = static_cast<int>(to_int(value, where));
                else if (key == "p")
                    config.p = static_cast<int>(to_int(value, where));
                else if (key == "active_set") {
                    config.active_set.clear();
                    for (const auto& tok : split(value, ','))
                        config.active_set.push_back(static_cast<int>(to_int(tok, where)) - 1);
                } else if (key == "coefficients")
                    config.coefficients = to_doubles(value, where);
                else if (key == "rho_rel")
                    config.rho_rel = to_double(value, where);
                else if (key == "rho_irr")
                    config.rho_irr = to_double(value, where);
                else if (key == "rho_mix")
                    config.rho_mix = to_double(value, where);
                else if (key == "sigma_eps")
                    config.sigma_eps = to_double(value, where);
                else if (key == "pd_floor")
                    config.pd_floor = to_double(value, where);
                else
                    fail("unknown key '" + key + "' in [problem]");
            } else if (section == "campaign") {
                if (key == "delta_obs")
                    config.delta_obs = to_doubles(value, where);
                else if (key == "n_rep")
                    config.n_rep = static_cast<int>(to_int(value, where));
                else if (key == "methods") {
                    config.methods.clear();
                    for (const auto& tok : split(value, ','))
                        config.methods.push_back(parse_method(tok));
                } else
                    fail("unknown key '" + key + "' in [campaign]");
            } else if (section == "selector") {
                if (key == "lambda")
                    config.lambda = value == "auto" ? 0.0 : to_double(value, where);
                else if (key == "alpha")
                    config.alpha = to_double(value, where);
                else if (key == "max_iter")
                    config.max_iter = static_cast<int>(to_int(value, where));
                else if (key == "tol")
                    config.tol = to_double(value, where);
                else if (key == "zero_tol")
                    config.zero_tol = to_double(value, where);
                else
                    fail("unknown key '" + key + "' in [selector]");
            } else if (section == "jitter") {
                if (key == "grid")
                    config.jitter_grid = parse_grid_spec(value);
                else if (key == "bags")
                    config.jitter_bags = static_cast<int>(to_int(value, where));
                else if (key == "selector") {
                    if (value == "lasso")
                        config.jitter_selector = SelectorKind::lasso;
                    else if (value == "enet")
                        config.jitter_selector = SelectorKind::enet;
                    else
                        fail("jitter selector must be lasso or enet");
                } else
                    fail("unknown key '" + key + "' in [jitter]");
            } else if (section == "stability_selection") {
                if (key == "bags")
                    config.stabsel_bags = static_cast<int>(to_int(value, where));
                else
                    fail("unknown key '" + key + "' in [stability_selection]");
            } else if (section == "run") {
                if (key == "seed")
                    config.seed = static_cast<std::uint64_t>(to_int(value, where));
                else if (key == "workers")
                    config.workers = static_cast<int>(to_int(value, where));
                else if (key == "out")
                    config.out_dir = value;
                else
                    fail("unknown key '" + key + "' in [run]");
            } else {
                fail("key '" + key + "' outside any known section");
            }
        } catch (const param_error& e) {
            fail(e.what());
        }
    }

    if (!errors.empty()) {
        std::string all = "invalid configuration:";
        for (const auto& e : errors) all += "\n  " + e;
        throw param_error(all);
    }
    validate(config);
    return config;
}

SimulationConfig load_simulation_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw param_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_simulation_config(buf.str(), path);
}

void validate(const SimulationConfig& config) {
    std::vector<std::string> errors;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    require(config.n >= 2, "[problem] n must be >= 2");
    require(config.p >= 2, "[problem] p must be >= 2");
    require(!config.active_set.empty(), "[problem] active_set must be nonempty");
    require(config.active_set.size() == config.coefficients.size(),
            "[problem] active_set and coefficients must have equal length");
    {
        IndexSet s = config.active_set;
        std::sort(s.begin(), s.end());
        require(std::adjacent_find(s.begin(), s.end()) == s.end(),
                "[problem] active_set has duplicates");
        require(s == config.active_set, "[problem] active_set must be sorted ascending");
        require(s.empty() || (s.front() >= 0 && s.back() < config.p),
                "[problem] active_set indices must lie in 1..p");
    }
    for (double rho : {config.rho_rel, config.rho_irr, config.rho_mix})
        require(rho > -1.0 && rho < 1.0, "[problem] correlations must lie in (-1, 1)");
    require(config.sigma_eps >= 0.0, "[problem] sigma_eps must be >= 0");
    require(config.pd_floor > 0.0, "[problem] pd_floor must be > 0");

    require(!config.delta_obs.empty(), "[campaign] delta_obs must be nonempty");
    for (double d : config.delta_obs) require(d >= 0.0, "[campaign] delta_obs must be >= 0");
    require(config.n_rep >= 1, "[campaign] n_rep must be >= 1");
    require(!config.methods.empty(), "[campaign] methods must be nonempty");
    for (const auto& m : config.methods)
        if (m.type == MethodType::stabsel)
            require(m.tau > 0.5 && m.tau <= 1.0,
                    "[campaign] stability-selection threshold must lie in (0.5, 1]: " + m.name);

    require(config.lambda >= 0.0, "[selector] lambda must be > 0 or auto");
    require(config.alpha > 0.0 && config.alpha <= 1.0, "[selector] alpha must lie in (0, 1]");
    require(config.max_iter >= 1, "[selector] max_iter must be >= 1");
    require(config.tol > 0.0, "[selector] tol must be > 0");
    require(config.zero_tol >= 0.0, "[selector] zero_tol must be >= 0");

    require(!config.jitter_grid.empty(), "[jitter] grid must be nonempty");
    for (std::size_t i = 0; i < config.jitter_grid.size(); ++i) {
        require(config.jitter_grid[i] >= 0.0, "[jitter] grid values must be >= 0");
        if (i > 0)
            require(config.jitter_grid[i] > config.jitter_grid[i - 1],
                    "[jitter] grid must be strictly increasing");
    }
    require(config.jitter_bags >= 1, "[jitter] bags must be >= 1");
    require(config.stabsel_bags >= 2, "[stability_selection] bags must be >= 2");
    require(config.n_rep < 2 || config.n >= 4,
            "[problem] n too small for half-sample stability selection");
    require(config.workers >= 0, "[run] workers must be >= 0");
    require(!config.out_dir.empty(), "[run] out must be nonempty");

    if (!errors.empty()) {
        std::string all = "invalid configuration:";
        for (const auto& e : errors) all += "\n  " + e;
        throw param_error(all);
    }
}

std::string config_hash(const SimulationConfig& config) {
    std::map<std::string, std::string> kv;
    kv["problem.n"] = std::to_string(config.n);
    kv["problem.p"] = std::to_string(config.p);
    {
        std::string s;
        for (int j : config.active_set) s += std::to_string(j + 1) + ";";
        kv["problem.active_set"] = s;
    }
    {
        std::string s;
        for (double c : config.coefficients) s += format_g17(c) + ";";
        kv["problem.coefficients"] = s;
    }
    kv["problem.rho_rel"] = format_g17(config.rho_rel);
    kv["problem.rho_irr"] = format_g17(config.rho_irr);
    kv["problem.rho_mix"] = format_g17(config.rho_mix);
    kv["problem.sigma_eps"] = format_g17(config.sigma_eps);
    kv["problem.pd_floor"] = format_g17(config.pd_floor);
    {
        std::string s;
        for (double d : config.delta_obs) s += format_g17(d) + ";";
        kv["campaign.delta_obs"] = s;
    }
    kv["campaign.n_rep"] = std::to_string(config.n_rep);
    {
        std::string s;
        for (const auto& m : config.methods) s += m.name + ";";
        kv["campaign.methods"] = s;
    }
    kv["selector.lambda"] = format_g17(config.lambda);
    kv["selector.alpha"] = format_g17(config.alpha);
    kv["selector.max_iter"] = std::to_string(config.max_iter);
    kv["selector.tol"] = format_g17(config.tol);
    kv["selector.zero_tol"] = format_g17(config.zero_tol);
    {
        std::string s;
        for (double d : config.jitter_grid) s += format_g17(d) + ";";
        kv["jitter.grid"] = s;
    }
    kv["jitter.bags"] = std::to_string(config.jitter_bags);
    kv["jitter.selector"] = config.jitter_selector == SelectorKind::lasso ? "lasso" : "enet";
    kv["stability_selection.bags"] = std::to_string(config.stabsel_bags);
    kv["run.seed"] = std::to_string(config.seed);

    // FNV-1a 64 over the sorted canonical lines (std::map iterates sorted).
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : kv) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace jsel
