// config.cpp - parsing and validation of run configurations

#include "polaritonix/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <vector>

#include "polaritonix/analysis.hpp"

namespace polaritonix {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigurationError("config: " + key + " = '" + text + "' is not a finite number");
    return v;
}

long parse_integer(const std::string& key, const std::string& text) {
    long v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigurationError("config: " + key + " = '" + text + "' is not an integer");
    return v;
}

// Reads keys from the entries and remembers which ones were consumed.
class Reader {
public:
    explicit Reader(const ConfigEntries& entries) : entries_(entries) {}

    std::optional<std::string> text(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }
    std::optional<double> number(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        return parse_double(key, *t);
    }
    double required(const std::string& key) {
        auto v = number(key);
        if (!v) throw ConfigurationError("config: missing required key " + key);
        return *v;
    }
    std::optional<long> integer(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        return parse_integer(key, *t);
    }
    void reject_unused() const {
        for (const auto& [key, value] : entries_)
            if (!used_.count(key)) throw ConfigurationError("config: unknown key " + key);
    }

private:
    const ConfigEntries& entries_;
    std::set<std::string> used_;
};

const char* const kCommands[] = {"spectrum", "absorption", "features", "sweep", "baseline", "validate"};

} // namespace

std::pair<double, double> RunConfig::detuning_range() const {
    auto range = default_detuning_range(cavity, molecule);
    if (numerics.detuning_min) range.first = *numerics.detuning_min;
    if (numerics.detuning_max) range.second = *numerics.detuning_max;
    return range;
}

ResponseModel RunConfig::model() const {
    return ResponseModel(cavity, molecule, environment, numerics.series);
}

std::string RunConfig::output_path(const std::string& command) const {
    auto it = output.find(command);
    return it == output.end() ? std::string{} : it->second;
}

ConfigEntries read_entries(std::istream& in) {
    ConfigEntries entries;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigurationError("config line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigurationError("config line " + std::to_string(number) + ": empty key or value");
        if (!entries.emplace(key, value).second)
            throw ConfigurationError("config line " + std::to_string(number) + ": duplicate key " + key);
    }
    return entries;
}

ConfigEntries read_entries_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    return read_entries(in);
}

RunConfig build_config(const ConfigEntries& entries, bool require_modes) {
    Reader r(entries);
    RunConfig cfg;
    cfg.entries = entries;
    if (auto u = r.text("units")) cfg.units = *u;

    // cavity
    const auto omega_c = r.number("cavity.omega_c");
    const auto length = r.number("cavity.geometry.L");
    const auto alpha = r.number("cavity.geometry.alpha_deg");
    const auto n_eff = r.number("cavity.geometry.n_eff");
    const auto c = r.number("cavity.geometry.c");
    const bool any_geometry = length || alpha || n_eff || c;
    if (omega_c && any_geometry)
        throw ConfigurationError("config: give either cavity.omega_c or cavity.geometry.*, not both");
    if (omega_c) {
        cfg.cavity.omega_c = *omega_c;
    } else if (length) {
        CavityGeometry g{*length, alpha.value_or(0.0), n_eff.value_or(1.0), c.value_or(1.0)};
        try {
            cfg.cavity.omega_c = cavity_frequency_from_geometry(g.length, g.alpha_deg * kPi / 180.0,
                                                                g.n_eff, g.speed_of_light);
        } catch (const std::domain_error& e) {
            throw ConfigurationError(e.what());
        }
        cfg.geometry = g;
    } else {
        throw ConfigurationError("config: missing cavity.omega_c (or cavity.geometry.L)");
    }
    cfg.cavity.kappa_c = r.required("cavity.kappa_c");
    cfg.cavity.g_N = r.required("cavity.g_N");
    cfg.cavity.validate();

    // molecule
    cfg.molecule.omega_m = r.required("molecule.omega_m");
    cfg.molecule.kappa_tilde = r.number("molecule.kappa_tilde").value_or(0.0);
    std::set<long> labels;
    const std::string prefix = "molecule.mode.";
    for (const auto& [key, value] : entries) {
        if (key.rfind(prefix, 0) != 0) continue;
        const auto dot = key.find('.', prefix.size());
        if (dot == std::string::npos) throw ConfigurationError("config: malformed key " + key);
        labels.insert(parse_integer(key, key.substr(prefix.size(), dot - prefix.size())));
    }
    for (long label : labels) {
        const std::string base = prefix + std::to_string(label) + ".";
        VibrationalMode m;
        m.omega_v = r.required(base + "omega_v");
        m.huang_rhys = r.required(base + "S");
        m.quality = r.required(base + "Q");
        m.multiplicity = static_cast<int>(r.integer(base + "multiplicity").value_or(1));
        cfg.molecule.modes.push_back(m);
    }
    if (require_modes && cfg.molecule.modes.empty())
        throw ConfigurationError("config: at least one molecule.mode.<i> is required");
    cfg.molecule.validate();
    for (const auto& m : cfg.molecule.modes) {
        try {
            classify_regime(m);
        } catch (const CriticalDampingError& e) {
            throw ConfigurationError(e.what());
        }
    }

    // environment
    const double temperature = r.required("environment.k_B_T");
    cfg.environment = ThermalEnv::with_default_cutoff(temperature, cfg.molecule.modes);
    if (auto wl = r.number("environment.omega_L")) cfg.environment.cutoff = *wl;
    try {
        cfg.environment.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigurationError(e.what());
    }

    // numerics
    cfg.numerics.grid_half_span = r.number("numerics.grid_half_span").value_or(0.0);
    if (cfg.numerics.grid_half_span < 0.0)
        throw ConfigurationError("config: numerics.grid_half_span must be >= 0");
    const long points = r.integer("numerics.grid_points").value_or(32768);
    if (points < 2) throw ConfigurationError("config: numerics.grid_points must be >= 2");
    cfg.numerics.grid_points = static_cast<std::size_t>(points);
    cfg.numerics.series.tolerance = r.number("numerics.series_tolerance").value_or(1e-12);
    if (!(cfg.numerics.series.tolerance > 0.0))
        throw ConfigurationError("config: numerics.series_tolerance must be > 0");
    const long terms = r.integer("numerics.max_series_terms").value_or(512);
    if (terms < 0) throw ConfigurationError("config: numerics.max_series_terms must be >= 0");
    cfg.numerics.series.max_terms = static_cast<int>(terms);
    cfg.numerics.detuning_min = r.number("numerics.detuning_min");
    cfg.numerics.detuning_max = r.number("numerics.detuning_max");
    const auto range = cfg.detuning_range();
    if (!(range.second > range.first))
        throw ConfigurationError("config: detuning range must satisfy min < max");

    // output
    for (const char* command : kCommands)
        if (auto p = r.text(std::string("output.") + command)) cfg.output[command] = *p;

    r.reject_unused();
    return cfg;
}

} // namespace polaritonix
