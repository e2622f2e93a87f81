// pe_theory.hpp - closed-form P(E) of Brownian-damped vibrational modes
//
// J~(t) = J(t) - J(0) is a finite sum of damped exponentials (two vibrational
// poles plus Matsubara poles up to the cutoff), so exp(J~) factorizes and each
// factor transforms to a Lorentzian series (exp_correlator_transform).
// Units: hbar = k_B = 1, every frequency in one common unit.

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "polaritonix/lineshape.hpp"

namespace polaritonix {

struct VibrationalMode {
    double omega_v{1.0};     // bare vibrational frequency
    double huang_rhys{1.0};  // S >= 0
    double quality{4.0};     // Q = omega_v / gamma > 0, Q != 1/2
    int multiplicity{1};     // M identical copies act as S -> M S

    double gamma() const noexcept { return omega_v / quality; }
    double effective_huang_rhys() const noexcept { return multiplicity * huang_rhys; }
    void validate() const;  // throws std::invalid_argument
};

struct ThermalEnv {
    double temperature{1.0};  // k_B T > 0
    double cutoff{25.0};      // omega_L > 0

    double beta() const noexcept { return 1.0 / temperature; }
    int k_max() const;  // floor(omega_L / (2 pi T))
    double matsubara_frequency(int k) const noexcept;
    void validate() const;

    // omega_L = 25 * (largest omega_v); 25 when the list is empty.
    static ThermalEnv with_default_cutoff(double temperature,
                                          std::span<const VibrationalMode> modes);
};

enum class DampingRegime { Underdamped, Overdamped };

class CriticalDampingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct RegimeInfo {
    DampingRegime regime{DampingRegime::Underdamped};
    double renormalized_frequency{0.0};  // omega~_v, underdamped only
    double rate_plus{0.0};               // gamma/2 or Gamma_+
    double rate_minus{0.0};              // gamma/2 or Gamma_-
};

// Q > 1/2: underdamped, omega~_v = omega_v sqrt(1 - 1/(4Q^2)), both rates gamma/2.
// Q < 1/2: overdamped, Gamma_pm = (gamma +- sqrt(gamma^2 - 4 omega_v^2)) / 2.
RegimeInfo classify_regime(const VibrationalMode& mode);

struct ResidueCoefficients {
    DampingRegime regime{DampingRegime::Underdamped};
    double renormalized_frequency{0.0};
    double rate_plus{0.0};
    double rate_minus{0.0};
    cplx d_plus{0.0, 0.0};
    cplx d_minus{0.0, 0.0};
    cplx bose_complex{0.0, 0.0};  // N = 1/(exp(beta(omega~ + i gamma/2)) - 1), underdamped only
    double quality_used{0.0};     // Q after any pole-coincidence perturbation
};

ResidueCoefficients residue_coefficients(const VibrationalMode& mode, const ThermalEnv& env);

// Returns the mode with Q nudged by a relative 1e-9 (and emits a warning) when a
// vibrational rate coincides with a Matsubara frequency; otherwise the mode itself.
VibrationalMode resolve_pole_coincidence(const VibrationalMode& mode, const ThermalEnv& env);

struct SeriesOptions {
    double tolerance{1e-12};  // remainder bound for each exponential series
    int max_terms{512};       // hard cap on n_max
    CompactionOptions compaction{};
};

// Smallest n with exp(-a) |z|^{n+1}/(n+1)! exp(|z|) < tolerance, capped at max_terms.
int series_terms(cplx z, const SeriesOptions& options = {});

// Fourier transform (1/2pi) Int dt e^{iEt} exp[(a + i b sgn t)(e^{i w0 t - Gamma|t|} - 1)]
// as the Lorentzian series e^{-a} e^{ib} Sum_n (z*)^n/n! [f + i g](E; -n w0, n Gamma).
Mixture exp_correlator_transform(double a, double b, double omega_0, double half_width,
                                 int n_max);

// P_+ * P_- with emission atoms at E = +n omega~ (underdamped) or all at E = 0 (overdamped).
Mixture vibronic_expansion(const ResidueCoefficients& coeffs, const SeriesOptions& options = {});

struct MatsubaraTerm {
    double frequency{0.0};  // omega_k = 2 pi k T
    double weight{0.0};     // C_k, may be negative for an overdamped mode
};

std::vector<MatsubaraTerm> matsubara_coefficients(const VibrationalMode& mode,
                                                  const ThermalEnv& env);

// Convolution over k of e^{-C_k} Sum_n C_k^n/n! f_L(E; 0, n omega_k).
Mixture matsubara_expansion(std::span<const MatsubaraTerm> terms,
                            const SeriesOptions& options = {});

// P(E) of a single mode: vibronic_expansion * matsubara_expansion.
Mixture mode_pe(const VibrationalMode& mode, const ThermalEnv& env,
                const SeriesOptions& options = {});

// P(E) of several independent modes. Matsubara weights of all modes share the
// frequencies omega_k, so they are summed before expanding.
Mixture total_pe(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                 const SeriesOptions& options = {});

} // namespace polaritonix
