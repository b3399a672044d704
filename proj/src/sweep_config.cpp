// sweep_config.cpp: key/value configuration for sweeps

#include "nlent/errors.hpp"
#include "nlent/quadratures.hpp"
#include "nlent/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace nlent {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(value.substr(used)) != "") {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
    return out;
}

int to_int(const std::string& key, const std::string& value)
{
    const double v = to_double(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value)
{
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

} // namespace

std::vector<double> SweepConfig::grid() const
{
    if (!xi_grid.empty()) return xi_grid;
    return uniform_xi_grid(xi_max, xi_step);
}

ModeLayout SweepConfig::layout() const { return ModeLayout::three_mode(dims[0], dims[1], dims[2]); }

void SweepConfig::validate() const
{
    if (k < 1 || l < 1 || k + l < 3) throw ConfigError("config keys 'k', 'l': need k, l >= 1 and k + l >= 3");
    if (hierarchy.empty()) throw ConfigError("config key 'hierarchy': at least one n is required");
    for (int n : hierarchy) {
        if (n < 1) throw ConfigError("config key 'hierarchy': n must be >= 1");
        if (n * std::max(k, l) > kMaxQuadratureOrder) {
            throw ConfigError("config key 'hierarchy': n = " + std::to_string(n) + " gives order "
                              + std::to_string(n * std::max(k, l)) + " > 9");
        }
    }
    if (!(alpha_p > 0.0)) throw ConfigError("config key 'alpha_p': must be positive");
    if (!(kappa > 0.0)) throw ConfigError("config key 'kappa': must be positive");
    if (xi_grid.empty() && (!(xi_step > 0.0) || !(xi_max >= 0.0))) {
        throw ConfigError("config keys 'xi_max', 'xi_step': need xi_max >= 0 and xi_step > 0");
    }
    const auto g = grid();
    if (g.empty() || g.front() != 0.0) throw ConfigError("config key 'xi_grid': must start at 0");
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) throw ConfigError("config key 'xi_grid': must be strictly increasing");
    }
    for (int d : dims) {
        if (d < 2) throw ConfigError("config key 'dims': every dimension must be >= 2");
    }
    const int n_max = *std::max_element(hierarchy.begin(), hierarchy.end());
    if (dims[1] <= k * n_max || dims[2] <= l * n_max) throw ConfigError("config key 'dims': A, B too small for the hierarchy");
    if (thermal_a < 0.0 || thermal_b < 0.0) throw ConfigError("config keys 'thermal_a', 'thermal_b': must be >= 0");
    if (convergence_step < 1) throw ConfigError("config key 'convergence_step': must be >= 1");
    if (convergence_stride < 1) throw ConfigError("config key 'convergence_stride': must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("config key 'tolerance': must be positive");
    if (krylov_dim < 2) throw ConfigError("config key 'krylov_dim': must be >= 2");
}

void apply_setting(SweepConfig& c, const std::string& raw_key, const std::string& raw_value)
{
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "k") c.k = to_int(key, value);
    else if (key == "l") c.l = to_int(key, value);
    else if (key == "hierarchy") {
        c.hierarchy.clear();
        for (const auto& item : split_list(value)) c.hierarchy.push_back(to_int(key, item));
        std::sort(c.hierarchy.begin(), c.hierarchy.end());
        c.hierarchy.erase(std::unique(c.hierarchy.begin(), c.hierarchy.end()), c.hierarchy.end());
    } else if (key == "alpha_p") c.alpha_p = to_double(key, value);
    else if (key == "alpha_p_squared") c.alpha_p = std::sqrt(to_double(key, value));
    else if (key == "kappa") c.kappa = to_double(key, value);
    else if (key == "xi_max") {
        c.xi_max = to_double(key, value);
        c.xi_grid.clear();
    } else if (key == "xi_step") {
        c.xi_step = to_double(key, value);
        c.xi_grid.clear();
    } else if (key == "xi_grid") {
        c.xi_grid.clear();
        for (const auto& item : split_list(value)) c.xi_grid.push_back(to_double(key, item));
    } else if (key == "dims") {
        const auto items = split_list(value);
        if (items.size() != 3) throw ConfigError("config key 'dims': expected P,A,B");
        for (std::size_t i = 0; i < 3; ++i) c.dims[i] = to_int(key, items[i]);
    } else if (key == "thermal_a") c.thermal_a = to_double(key, value);
    else if (key == "thermal_b") c.thermal_b = to_double(key, value);
    else if (key == "with_nz") c.with_nz = to_bool(key, value);
    else if (key == "output") c.output = value;
    else if (key == "convergence_step") c.convergence_step = to_int(key, value);
    else if (key == "convergence_stride") c.convergence_stride = to_int(key, value);
    else if (key == "convergence_threshold") c.convergence_threshold = to_double(key, value);
    else if (key == "tolerance") c.tolerance = to_double(key, value);
    else if (key == "krylov_dim") c.krylov_dim = to_int(key, value);
    else if (key == "truncation_guard") c.truncation_guard = to_double(key, value);
    else if (key == "workers") c.workers = static_cast<unsigned>(to_int(key, value));
    else throw ConfigError("unknown config key '" + key + "'");
}

SweepConfig parse_config(std::istream& in, SweepConfig base)
{
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

SweepConfig load_config(const std::string& path, SweepConfig base)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, std::move(base));
}

std::vector<std::string> describe(const SweepConfig& c)
{
    std::vector<std::string> hier;
    for (int n : c.hierarchy) hier.push_back(std::to_string(n));
    std::vector<std::string> grid;
    for (double x : c.grid()) grid.push_back(format_number(x));
    return {
        "k = " + std::to_string(c.k),
        "l = " + std::to_string(c.l),
        "hierarchy = " + join(hier),
        "alpha_p = " + format_number(c.alpha_p),
        "kappa = " + format_number(c.kappa),
        "xi_grid = " + join(grid),
        "dims = " + std::to_string(c.dims[0]) + "," + std::to_string(c.dims[1]) + "," + std::to_string(c.dims[2]),
        "thermal_a = " + format_number(c.thermal_a),
        "thermal_b = " + format_number(c.thermal_b),
        "with_nz = " + std::string(c.with_nz ? "true" : "false"),
        "tolerance = " + format_number(c.tolerance),
        "krylov_dim = " + std::to_string(c.krylov_dim),
        "truncation_guard = " + format_number(c.truncation_guard),
    };
}

} // namespace nlent
