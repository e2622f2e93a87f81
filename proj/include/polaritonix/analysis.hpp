// analysis.hpp - peak positions, FWHM linewidths, Rabi splitting and intensity ratios

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polaritonix/response.hpp"

namespace polaritonix {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoPeaks : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class OverlappingPeaks : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class NoSplitting : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class NotBracketed : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class AmbiguousSplitting : public AnalysisError {
public:
    AmbiguousSplitting(const std::string& what, std::size_t peak_count)
        : AnalysisError(what), peak_count_(peak_count) {}
    std::size_t peak_count() const noexcept { return peak_count_; }

private:
    std::size_t peak_count_;
};

struct Peak {
    double position{0.0};
    double height{0.0};
};

using Evaluator = std::function<double(double)>;

struct PeakOptions {
    double scan_step{0.0};       // coarse scan spacing; <= 0 selects (hi - lo) / 4096
    double tolerance{1e-6};      // absolute, for positions and half-height crossings
    double dominance{0.05};      // fraction of the global maximum a peak must reach
};

// All local maxima of f on [lo, hi], ascending. Throws NoPeaks if there are none.
std::vector<Peak> find_peaks(const Evaluator& f, double lo, double hi,
                             const PeakOptions& options = {});

// Distance between the half-height crossings nearest the peak, searched within
// [lo, hi]. Throws OverlappingPeaks when a crossing is missing on either side.
double fwhm(const Evaluator& f, const Peak& peak, double lo, double hi,
            const PeakOptions& options = {});

// Peaks reaching fraction * (largest height).
std::vector<Peak> dominant_peaks(std::span<const Peak> peaks, double fraction);

struct AnalysisOptions {
    double detuning_step{0.0};       // coarse detuning scan; <= 0 selects omega_v / 4
    double rabi_tolerance{0.0};      // <= 0 selects 1e-4 omega_v
    double linewidth_tolerance{0.0}; // <= 0 selects 1e-3 omega_v
    double peak_tolerance{0.0};      // <= 0 selects 1e-6 omega_v
    double dominance{0.05};
    std::size_t max_scan_points{65536};
};

struct PolaritonPair {
    Peak lower;
    Peak upper;
    double linewidth_lower{0.0};  // FWHM, 0 when not requested
    double linewidth_upper{0.0};
};

// Transmission spectra of one molecule in cavities of varying frequency. A(w)
// does not depend on omega_c, so it is sampled once on the scan grid and every
// detuning reuses the samples for the coarse search. Refinements always call
// the exact evaluator.
class TransmissionScanner {
public:
    TransmissionScanner(const ResponseModel& model, double detuning_lo, double detuning_hi,
                        const AnalysisOptions& options = {});

    std::vector<Peak> peaks(double detuning) const;
    // The two dominant peaks; throws AmbiguousSplitting (> 2) or NoSplitting (< 2).
    PolaritonPair polaritons(double detuning, bool with_linewidths = false) const;
    double splitting(double detuning) const;

    const ResponseModel& model() const noexcept { return model_; }
    double unit() const noexcept { return unit_; }
    const AnalysisOptions& options() const noexcept { return options_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    std::vector<double> sampled(double detuning) const;
    Evaluator exact(double detuning) const;

    ResponseModel model_;
    AnalysisOptions options_;
    double unit_{1.0};
    double lo_{0.0};
    double hi_{0.0};
    double step_{0.0};
    std::vector<cplx> absorption_;  // g_N^2 A(w_i - w_m + shift) on the scan grid
};

struct RabiResult {
    double splitting{0.0};  // R
    double detuning{0.0};   // delta_R
};

// [-2 g_N, 2 g_N], or [-omega_v, omega_v] when g_N = 0.
std::pair<double, double> default_detuning_range(const CavityParams& cav,
                                                 const MoleculeParams& mol);

RabiResult rabi_splitting(const TransmissionScanner& scanner, double lo, double hi);
RabiResult rabi_splitting(const CavityParams& cav, const MoleculeParams& mol,
                          const ThermalEnv& env, double lo, double hi,
                          const AnalysisOptions& options = {});

// Root of Gamma_+(delta) - Gamma_-(delta); the sign change nearest delta = 0 is refined.
double equal_linewidth_detuning(const TransmissionScanner& scanner, double lo, double hi);
double equal_linewidth_detuning(const CavityParams& cav, const MoleculeParams& mol,
                                const ThermalEnv& env, double lo, double hi,
                                const AnalysisOptions& options = {});

// height(upper) / height(lower) at the given detuning.
double intensity_ratio(const TransmissionScanner& scanner, double detuning);
double intensity_ratio(const CavityParams& cav, const MoleculeParams& mol, const ThermalEnv& env,
                       double detuning, const AnalysisOptions& options = {});

struct PolaritonFeatures {
    double detuning{0.0};  // omega_c - omega_m at which the local fields were taken
    double omega_plus{0.0};
    double omega_minus{0.0};
    double rabi_splitting{0.0};
    double delta_R{0.0};
    double linewidth_plus{0.0};
    double linewidth_minus{0.0};
    double intensity_ratio{0.0};
    std::optional<double> delta_Gamma;
    std::string delta_Gamma_note;  // reason when delta_Gamma is absent
};

// R, delta_R and delta_Gamma over [lo, hi]; the peak positions, linewidths and
// intensity ratio at the model's own detuning.
PolaritonFeatures extract_features(const ResponseModel& model, double lo, double hi,
                                   const AnalysisOptions& options = {});

// FWHM of the bare-molecule absorption profile Re(-A).
double absorption_fwhm(const Absorption& absorption, double unit = 1.0,
                       const AnalysisOptions& options = {});

} // namespace polaritonix
