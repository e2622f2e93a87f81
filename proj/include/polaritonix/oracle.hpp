// oracle.hpp - brute-force P(E): quadrature of the J(t) integral, time-domain
// exponentiation and FFT, plus sampled-curve helpers for cross-validation.
//
// Nothing here uses the residue formulas of pe_theory. The spectral function
// G(w) = (S/(pi Q)) g(w) [coth(beta w/2) + 1] with g(w) = w^3/((w^2 - w_v^2)^2 + w^2 gamma^2)
// is integrated numerically; J~(t) = Int G(w)(e^{-iwt} - 1) dw (+ the sgn(t)
// constant that makes the Matsubara-truncated form continuous at t = 0).

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polaritonix/lineshape.hpp"
#include "polaritonix/pe_theory.hpp"

namespace polaritonix {

// Matsubara: the Matsubara poles beyond k_max are removed from G exactly as in
//   the closed form, so both sides describe the same J~(t).
// Sharp: G is set to zero for |w| > omega_L. This keeps G(-w) = e^{-beta w} G(w)
//   pointwise, so the resulting P(E) obeys detailed balance exactly.
enum class CutoffScheme { Matsubara, Sharp };

struct TimeGrid {
    double t_max{100.0};
    std::size_t n_points{65536};  // power of two

    double dt() const noexcept { return 2.0 * t_max / static_cast<double>(n_points); }
    double energy_step() const noexcept { return kPi / t_max; }
    double nyquist() const noexcept { return kPi / dt(); }
    void validate() const;

    // t_max = 50 / (slowest vibrational decay rate), n_points = 2^16, raised to
    // the next power of two if needed so that pi/dt covers omega_L.
    static TimeGrid for_modes(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                              std::size_t n_points = 65536);
};

struct Regularizer {
    enum class Kind { Lorentzian, DetailedBalanceGaussian };
    Kind kind{Kind::Lorentzian};
    // Lorentzian: half-width Gamma_reg (window e^{-Gamma_reg |t|}); a value <= 0
    //   selects 4 * energy_step.
    // DetailedBalanceGaussian: standard deviation sigma of the kernel
    //   K(x) ~ exp(-x^2/(2 sigma^2) + beta x / 2), which maps a density obeying
    //   detailed balance onto another one; <= 0 selects a width that brings the
    //   window to 1e-12 at t_max.
    double width{0.0};
};

struct OracleOptions {
    CutoffScheme cutoff{CutoffScheme::Matsubara};
    Regularizer regularizer{};
    double quadrature_tolerance{1e-10};  // relative, j_numeric only
};

// Single-time J~(t) by adaptive Gauss-Kronrod quadrature. J~(0) = 0 and J~(-t) = conj(J~(t)).
cplx j_numeric(std::span<const VibrationalMode> modes, const ThermalEnv& env, double t,
               const OracleOptions& options = {});
cplx j_numeric(const VibrationalMode& mode, const ThermalEnv& env, double t,
               const OracleOptions& options = {});

// J~ sampled at t_n = n dt for n = 0 .. n_points/2 (FFT of the spectral function).
std::vector<cplx> j_on_grid(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                            const TimeGrid& grid, const OracleOptions& options = {});

struct SampledDensity {
    std::vector<double> energy;  // ascending, spacing energy_step, contains 0
    std::vector<double> values;
    double max_imag_ratio{0.0};  // max |Im| / max |Re| before discarding Im
    double tail_residual{0.0};   // |e^{J~(t_max)} - e^{J~(inf)}|
    double period{0.0};          // 2 pi / dt, the aliasing period of the DFT
    Regularizer regularizer{};   // with the width actually applied
};

// (1/2pi) Int dt e^{iEt} e^{J~(t)} w(t) on the grid, w the regularizing window.
SampledDensity p_numeric(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                         const TimeGrid& grid, const OracleOptions& options = {});
SampledDensity p_numeric(const VibrationalMode& mode, const ThermalEnv& env,
                         const TimeGrid& grid, const OracleOptions& options = {});

// Same transform for an arbitrary correlator C(t) (C(-t) = conj(C(t)) assumed).
SampledDensity density_from_correlator(const std::function<cplx(double)>& correlator,
                                       const TimeGrid& grid, const Regularizer& regularizer,
                                       double beta = 0.0);

// A Mixture evaluated with the same regularization and periodization that the
// DFT applies: widths grow by Gamma_reg and the curve is summed over images
// E + m * period. Only Lorentzian regularizers are supported.
std::vector<double> periodized_mixture(const Mixture& mixture, const SampledDensity& reference);

// Sum |a - b| / Sum |b|.
double relative_l1(std::span<const double> a, std::span<const double> b);

struct DetailedBalanceReport {
    double fitted_sign{0.0};      // mean of ln(P(E)/P(-E)) / (beta E) over valid points
    double max_relative_error{0.0};  // max | |ln(P(E)/P(-E))| - beta|E| | / (beta|E|)
    std::size_t points{0};
};

DetailedBalanceReport detailed_balance(const SampledDensity& density, double beta,
                                       double floor = 1e-6);

// Uniformly sampled function x_i = x0 + i dx.
struct SampledFunction {
    double x0{0.0};
    double dx{1.0};
    std::vector<double> values;
    double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
};

SampledFunction sample(const std::function<double(double)>& f, double x0, double dx,
                       std::size_t n);

// Discrete linear convolution scaled by dx (computed through a zero-padded FFT).
// The result starts at a.x0 + b.x0 and has a.size + b.size - 1 samples.
SampledFunction convolve_numeric(const SampledFunction& a, const SampledFunction& b);

// Relative L1 distance between convolve(a, b) and the sampled convolution of
// a and b. All three curves are periodized with the given period, so the slow
// g_L tails need no truncation; a is sampled on one period, b on two, and the
// linear convolution then equals the circular one on the central period. The
// constant (zero-frequency) part of the difference is not counted: a
// periodized g_L has no mean, so that mode is undefined for g * g.
double convolution_rule_error(const Mixture& a, const Mixture& b, double period = 200.0,
                              std::size_t points = 32768);

// (1/2 pi i) of the contour integral of f around a circle (trapezoid rule).
cplx numeric_residue(const std::function<cplx(cplx)>& f, cplx pole, double radius,
                     int nodes = 512);

// The untruncated spectral function G(w) continued to complex w.
cplx spectral_function(const VibrationalMode& mode, const ThermalEnv& env, cplx omega);

// Regular part of a single Matsubara factor, the inverse transform of
// exp[C (e^{-w_k|t|} - 1)] minus its e^{-C} delta(E), from the incomplete-Gamma
// integral written as e^{-C}/(pi w_k) Re Int_0^inf e^{i s E/w_k} (exp(C e^{-s}) - 1) ds.
double matsubara_factor_numeric(double weight, double frequency, double energy);

} // namespace polaritonix
