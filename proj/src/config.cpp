#include "mfg/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace mfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_real(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "invalid number for " + key + ": '" + v + "'");
    }
}

long parse_int(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "invalid integer for " + key + ": '" + v + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool have_dim = false, have_n = false, have_name = false;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected key=value, got '" + trim(raw) + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (value.empty()) throw ConfigError(lineno, "empty value for " + key);
        if (!seen.insert(key).second) throw ConfigError(lineno, "duplicate key " + key);

        if (key == "dim") {
            const long d = parse_int(value, lineno, key);
            if (d != 1 && d != 2) throw ConfigError(lineno, "dim must be 1 or 2");
            cfg.dim = static_cast<int>(d);
            have_dim = true;
        } else if (key == "n") {
            const long n = parse_int(value, lineno, key);
            if (n < 8 || n % 2 != 0) throw ConfigError(lineno, "n must be even and >= 8");
            cfg.n = static_cast<int>(n);
            have_n = true;
        } else if (key == "seed") {
            const long s = parse_int(value, lineno, key);
            if (s < 0) throw ConfigError(lineno, "seed must be nonnegative");
            cfg.seed = static_cast<unsigned>(s);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "problem.name") {
            cfg.problem_name = value;
            have_name = true;
        } else if (key == "problem.coupling") {
            cfg.coupling_name = value;
        } else if (key == "solver.eps0") {
            const double x = parse_real(value, lineno, key);
            if (!(x > 0.0)) throw ConfigError(lineno, "eps0 must be positive");
            cfg.schedule.eps0 = x;
        } else if (key == "solver.eps_factor") {
            const double x = parse_real(value, lineno, key);
            if (!(x > 0.0 && x < 1.0)) throw ConfigError(lineno, "factor must lie in (0,1)");
            cfg.schedule.factor = x;
        } else if (key == "solver.eps_min") {
            const double x = parse_real(value, lineno, key);
            if (!(x >= 0.0)) throw ConfigError(lineno, "eps_min must be nonnegative");
            cfg.schedule.eps_min = x;
        } else if (key == "solver.newton_tol") {
            const double x = parse_real(value, lineno, key);
            if (!(x > 0.0)) throw ConfigError(lineno, "newton_tol must be positive");
            cfg.newton.tol = x;
        } else if (key == "solver.newton_max_iter") {
            const long it = parse_int(value, lineno, key);
            if (it < 1) throw ConfigError(lineno, "newton_max_iter must be >= 1");
            cfg.newton.max_iter = static_cast<int>(it);
        } else if (key == "solver.armijo_c") {
            const double x = parse_real(value, lineno, key);
            if (!(x > 0.0 && x < 1.0)) throw ConfigError(lineno, "armijo_c must lie in (0,1)");
            cfg.newton.armijo_c = x;
        } else if (key == "solver.min_step") {
            const double x = parse_real(value, lineno, key);
            if (!(x > 0.0)) throw ConfigError(lineno, "min_step must be positive");
            cfg.newton.min_step = x;
        } else if (key == "solver.bisect_tol") {
            const double x = parse_real(value, lineno, key);
            if (!(x > 0.0)) throw ConfigError(lineno, "bisect_tol must be positive");
            cfg.bisect_tol = x;
        } else {
            throw ConfigError(lineno, "unknown key " + key);
        }
    }

    if (!have_dim) throw ConfigError(0, "missing required key dim");
    if (!have_n) throw ConfigError(0, "missing required key n");
    if (!have_name) throw ConfigError(0, "missing required key problem.name");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace mfg
