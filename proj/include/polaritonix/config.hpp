// config.hpp - flat key = value run configuration with dotted section names
//
// Schema (frequencies in the unit named by `units`, which is informational):
//   units                          free text, default "omega_v"
//   cavity.omega_c                 or cavity.geometry.{L, alpha_deg, n_eff, c}
//   cavity.kappa_c, cavity.g_N
//   molecule.omega_m, molecule.kappa_tilde
//   molecule.mode.<i>.{omega_v, S, Q, multiplicity}   i is any integer label
//   environment.k_B_T, environment.omega_L (default 25 * largest omega_v)
//   numerics.grid_half_span (0 = automatic), numerics.grid_points,
//   numerics.series_tolerance, numerics.max_series_terms,
//   numerics.detuning_min, numerics.detuning_max (default -+2 g_N)
//   output.<command>               default output path per command
// Lines starting with '#' and blank lines are ignored; '#' after a value starts a comment.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "polaritonix/pe_theory.hpp"
#include "polaritonix/response.hpp"

namespace polaritonix {

using ConfigEntries = std::map<std::string, std::string>;

struct CavityGeometry {
    double length{0.0};
    double alpha_deg{0.0};
    double n_eff{1.0};
    double speed_of_light{1.0};
};

struct NumericsConfig {
    double grid_half_span{0.0};
    std::size_t grid_points{32768};
    SeriesOptions series{};
    std::optional<double> detuning_min;
    std::optional<double> detuning_max;
};

struct RunConfig {
    std::string units{"omega_v"};
    CavityParams cavity{};
    std::optional<CavityGeometry> geometry;  // when set, cavity.omega_c was derived from it
    MoleculeParams molecule{};
    ThermalEnv environment{};
    NumericsConfig numerics{};
    std::map<std::string, std::string> output;  // command -> path
    ConfigEntries entries;                      // the parsed keys, for CSV headers

    std::pair<double, double> detuning_range() const;
    ResponseModel model() const;
    std::string output_path(const std::string& command) const;  // empty when not configured
};

// Parses "key = value" lines. Throws ConfigurationError on malformed lines or duplicate keys.
ConfigEntries read_entries(std::istream& in);
ConfigEntries read_entries_file(const std::string& path);  // throws IoError if unreadable

// Validates the entries against the schema. Modes may be absent only when
// require_modes is false (the coupled-oscillator baseline).
RunConfig build_config(const ConfigEntries& entries, bool require_modes = true);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace polaritonix
