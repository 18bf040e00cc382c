#include "quench/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace quench {

namespace {

std::string trim(const std::string& s) {
    size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return s.substr(lo, hi - lo);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            ini.sections_[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        }
        ini.sections_[section][key] = trim(line.substr(eq + 1));
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(section);
    return sit != sections_.end() && sit->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError("missing config key [" + section + "] " + key);
    return sections_.at(section).at(key);
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? sections_.at(section).at(key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string raw = get(section, key);
    try {
        size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key [" + section + "] " + key + ": not a number: " + raw);
    }
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int IniFile::get_int(const std::string& section, const std::string& key) const {
    const double v = get_double(section, key);
    if (v != std::floor(v)) {
        throw ConfigError("config key [" + section + "] " + key + ": expected an integer");
    }
    return int(v);
}

int IniFile::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool IniFile::get_bool_or(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string raw = get(section, key);
    std::transform(raw.begin(), raw.end(), raw.begin(), ::tolower);
    if (raw == "true" || raw == "1" || raw == "on" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "off" || raw == "no") return false;
    throw ConfigError("config key [" + section + "] " + key + ": not a boolean: " + raw);
}

std::vector<double> IniFile::get_doubles(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(get(section, key))) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key [" + section + "] " + key +
                              ": not a number in list: " + item);
        }
    }
    return out;
}

std::vector<std::string> IniFile::get_list_or(const std::string& section, const std::string& key,
                                              const std::vector<std::string>& fallback) const {
    if (!has(section, key)) return fallback;
    return split_list(get(section, key));
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig c;
    c.name = ini.get_or("experiment", "name", c.name);

    c.dim = ini.get_int_or("grid", "d", c.dim);
    c.a = ini.get_double_or("grid", "a", c.a);
    c.b = ini.get_double_or("grid", "b", c.b);
    c.nodes_per_axis = ini.get_int_or("grid", "N", c.nodes_per_axis);
    c.T = ini.get_double_or("grid", "T", c.T);

    c.variant = ini.get_or("operator", "variant", c.variant);
    c.lambda = ini.get_double_or("operator", "lambda", c.lambda);
    c.Lambda = ini.get_double_or("operator", "Lambda", c.Lambda);
    c.coefficient = ini.get_or("operator", "coefficient", c.coefficient);
    c.coefficient_amplitude =
        ini.get_double_or("operator", "coefficient_amplitude", c.coefficient_amplitude);
    c.modulus = ini.get_or("operator", "modulus", c.modulus);
    c.modulus_slope = ini.get_double_or("operator", "modulus_slope", c.modulus_slope);

    c.gamma = ini.get_double_or("penalization", "gamma", c.gamma);
    c.sigma0 = ini.get_double_or("penalization", "sigma0", c.sigma0);
    if (ini.has("penalization", "eps")) c.eps_list = ini.get_doubles("penalization", "eps");

    c.boundary_preset = ini.get_or("boundary", "preset", c.boundary_preset);
    c.x0 = ini.get_double_or("boundary", "x0", c.x0);
    c.shift = ini.get_bool_or("boundary", "shift", c.shift);

    c.measurements = ini.get_list_or("estimator", "measurements", c.measurements);
    c.radii_count = ini.get_int_or("estimator", "radii_count", c.radii_count);
    c.radii_m_start = ini.get_int_or("estimator", "radii_m_start", c.radii_m_start);
    c.mu = ini.get_double_or("estimator", "mu", c.mu);
    c.theta = ini.get_double_or("estimator", "theta", c.theta);
    c.beta_reference = ini.get_or("estimator", "beta_reference", c.beta_reference);
    c.slope_tol = ini.get_double_or("estimator", "slope_tol", c.slope_tol);
    c.profile_tol = ini.get_double_or("estimator", "profile_tol", c.profile_tol);

    c.cfl_safety = ini.get_double_or("solver", "cfl_safety", c.cfl_safety);
    c.source_safety = ini.get_double_or("solver", "source_safety", c.source_safety);
    c.max_stored_levels = ini.get_int_or("solver", "max_stored_levels", c.max_stored_levels);

    c.out_dir = ini.get_or("output", "directory", c.out_dir);
    c.csv_levels = ini.get_int_or("output", "csv_levels", c.csv_levels);

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_ini(IniFile::load(path));
}

void ExperimentConfig::validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("config key [grid] d: must be 1 or 2");
    if (!(a < b)) throw ConfigError("config key [grid] a/b: requires a < b");
    if (nodes_per_axis < 3) throw ConfigError("config key [grid] N: requires N >= 3");
    if (!(T > 0.0)) throw ConfigError("config key [grid] T: requires T > 0");
    if (variant != "linear" && variant != "pucci_minus" && variant != "pucci_plus") {
        throw ConfigError("config key [operator] variant: unknown variant '" + variant + "'");
    }
    if (!(lambda > 0.0) || Lambda < lambda) {
        throw ConfigError("config key [operator] lambda/Lambda: requires 0 < lambda <= Lambda");
    }
    if (coefficient != "identity" && coefficient != "sine" && coefficient != "anisotropic") {
        throw ConfigError("config key [operator] coefficient: unknown preset '" + coefficient +
                          "'");
    }
    if (modulus != "zero" && modulus != "linear") {
        throw ConfigError("config key [operator] modulus: unknown preset '" + modulus + "'");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw ConfigError("config key [penalization] gamma: must lie in (0,1)");
    }
    if (!(sigma0 > 0.0) || !(sigma0 < 1.0)) {
        throw ConfigError("config key [penalization] sigma0: must lie in (0,1)");
    }
    if (eps_list.empty()) throw ConfigError("config key [penalization] eps: list must be nonempty");
    for (double e : eps_list) {
        if (!(e > 0.0)) throw ConfigError("config key [penalization] eps: entries must be > 0");
    }
    if (boundary_preset != "positive_constant" && boundary_preset != "bump" &&
        boundary_preset != "exact_profile") {
        throw ConfigError("config key [boundary] preset: unknown preset '" + boundary_preset +
                          "'");
    }
    if (!(mu > 0.0) || !(mu < 1.0)) throw ConfigError("config key [estimator] mu: must lie in (0,1)");
    if (!(theta > 0.0) || theta >= gamma) {
        throw ConfigError("config key [estimator] theta: must lie in (0, gamma)");
    }
    if (radii_count < 3) throw ConfigError("config key [estimator] radii_count: requires >= 3");
    if (beta_reference != "auto") {
        try {
            (void)std::stod(beta_reference);
        } catch (const std::exception&) {
            throw ConfigError("config key [estimator] beta_reference: 'auto' or a number");
        }
    }
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0) {
        throw ConfigError("config key [solver] cfl_safety: must lie in (0,1]");
    }
    if (max_stored_levels < 2) {
        throw ConfigError("config key [solver] max_stored_levels: requires >= 2");
    }
    if (csv_levels < 2) throw ConfigError("config key [output] csv_levels: requires >= 2");
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream out;
    out.precision(17);
    out << "[experiment]\nname = " << name << "\n\n";
    out << "[grid]\nd = " << dim << "\na = " << a << "\nb = " << b << "\nN = " << nodes_per_axis
        << "\nT = " << T << "\n\n";
    out << "[operator]\nvariant = " << variant << "\nlambda = " << lambda
        << "\nLambda = " << Lambda << "\ncoefficient = " << coefficient
        << "\ncoefficient_amplitude = " << coefficient_amplitude << "\nmodulus = " << modulus
        << "\nmodulus_slope = " << modulus_slope << "\n\n";
    out << "[penalization]\ngamma = " << gamma << "\nsigma0 = " << sigma0 << "\neps = ";
    for (size_t i = 0; i < eps_list.size(); ++i) out << (i ? ", " : "") << eps_list[i];
    out << "\n\n";
    out << "[boundary]\npreset = " << boundary_preset << "\nx0 = " << x0
        << "\nshift = " << (shift ? "true" : "false") << "\n\n";
    out << "[estimator]\nmeasurements = ";
    for (size_t i = 0; i < measurements.size(); ++i) out << (i ? ", " : "") << measurements[i];
    out << "\nradii_count = " << radii_count << "\nradii_m_start = " << radii_m_start
        << "\nmu = " << mu << "\ntheta = " << theta << "\nbeta_reference = " << beta_reference
        << "\nslope_tol = " << slope_tol << "\nprofile_tol = " << profile_tol << "\n\n";
    out << "[solver]\ncfl_safety = " << cfl_safety << "\nsource_safety = " << source_safety
        << "\nmax_stored_levels = " << max_stored_levels << "\n\n";
    out << "[output]\ndirectory = " << out_dir << "\ncsv_levels = " << csv_levels << "\n";
    return out.str();
}

}  // namespace quench
