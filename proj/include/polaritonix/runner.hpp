// runner.hpp - the batch computations behind the command-line tool
//
// Every function writes CSV to a stream: a '#'-prefixed header carrying the
// tool version, the command and the full configuration, then one column-name
// line, then data rows with numbers in %.16e form (round-trips exactly).

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polaritonix/analysis.hpp"
#include "polaritonix/config.hpp"

namespace polaritonix {

const char* version();

// %.16e: 17 significant digits, enough to read back the same double.
std::string format_number(double value);

void write_header(std::ostream& out, const RunConfig& cfg, const std::string& command,
                  const std::vector<std::string>& extra = {});

// omega_d, transmission, absorption_re, absorption_im on the configured grid.
// The absorption columns are A at the shifted argument that enters the response.
void run_spectrum(const RunConfig& cfg, std::ostream& out);

// Bare-molecule absorption on the spectrum grid: omega_d, profile = Re(-A),
// absorption_re, absorption_im, with A taken at the argument used by the
// response. The header records the FWHM of the profile.
void run_absorption(const RunConfig& cfg, std::ostream& out);

// One PolaritonFeatures record. Analysis errors propagate (AmbiguousSplitting et al.).
void run_features(const RunConfig& cfg, std::ostream& out);

// Column names of a features record, in output order.
const std::vector<std::string>& feature_columns();
std::vector<std::string> feature_cells(const PolaritonFeatures& f);

// Reads the first data row of a run_features file back.
PolaritonFeatures parse_features(std::istream& in);

struct SweepRange {
    double start{0.0};
    double stop{0.0};
    std::size_t count{0};
    std::vector<double> values() const;
};

// "start:stop:count" with count >= 2; throws ConfigurationError otherwise.
SweepRange parse_range(const std::string& text);

enum class SweepParameter { Detuning, Temperature };
SweepParameter parse_sweep_parameter(const std::string& name);  // throws ConfigurationError

struct SweepRow {
    double value{0.0};
    std::optional<PolaritonFeatures> features;
    std::string reason;  // set when features is empty
};

// Rows in sweep order. Detuning sets omega_c = omega_m + value; temperature sets k_B T.
std::vector<SweepRow> sweep(const RunConfig& cfg, SweepParameter parameter, const SweepRange& range);
void run_sweep(const RunConfig& cfg, SweepParameter parameter, const SweepRange& range,
               std::ostream& out);

// Coupled-oscillator transmission with the Lorentzian linewidth effective_kappa_m.
void run_baseline(const RunConfig& cfg, std::ostream& out);

struct CheckResult {
    std::string name;
    double error{0.0};
    double tolerance{0.0};
    bool passed{false};
    std::string detail;
};

// Normalization, detailed balance, closed form vs oracle, and the convolution table.
std::vector<CheckResult> validation_checks(const RunConfig& cfg);
bool run_validate(const RunConfig& cfg, std::ostream& out);  // true iff every check passed

} // namespace polaritonix
