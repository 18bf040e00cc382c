#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quench {

/// Raised for malformed or out-of-range configuration; the message names the
/// offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat sectioned key-value text format:
///   [section]
///   key = value        # comment
/// Values are scalars or comma-separated lists; no expression language.
class IniFile {
public:
    static IniFile parse(const std::string& text);
    static IniFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<std::string> get_list_or(const std::string& section, const std::string& key,
                                         const std::vector<std::string>& fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Everything a single experiment needs; every field is either read from the
/// file or defaulted, and the canonical serialization records both.
struct ExperimentConfig {
    std::string name = "experiment";

    // grid
    int dim = 1;
    double a = -1.0;
    double b = 1.0;
    int nodes_per_axis = 129;
    double T = 0.25;

    // operator
    std::string variant = "linear";  // pucci_minus | pucci_plus | linear
    double lambda = 1.0;
    double Lambda = 1.0;
    std::string coefficient = "identity";  // identity | sine | anisotropic
    double coefficient_amplitude = 0.5;
    std::string modulus = "zero";  // zero | linear
    double modulus_slope = 1.0;

    // penalization
    double gamma = 0.5;
    double sigma0 = 0.1;
    std::vector<double> eps_list{0.1};

    // boundary
    std::string boundary_preset = "positive_constant";
    double x0 = 0.0;
    bool shift = false;

    // estimator battery
    std::vector<std::string> measurements{"sandwich", "positivity", "uniform_bound"};
    int radii_count = 4;
    int radii_m_start = 2;
    double mu = 0.75;
    double theta = 0.25;
    std::string beta_reference = "auto";  // "auto" -> 1 + alpha, or a number
    double slope_tol = 0.07;
    double profile_tol = 0.02;

    // solver
    double cfl_safety = 0.5;
    double source_safety = 0.5;
    int max_stored_levels = 4096;

    // output
    std::string out_dir = "out";
    int csv_levels = 9;  // stored levels exported to fields.csv (evenly spaced)

    static ExperimentConfig from_ini(const IniFile& ini);
    static ExperimentConfig load(const std::string& path);

    /// Canonical round-trippable serialization with every default made explicit.
    std::string to_ini() const;

    void validate() const;
};

}  // namespace quench
