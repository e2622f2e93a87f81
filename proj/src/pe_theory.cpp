// pe_theory.cpp - residues, Lorentzian series and the P(E) convolution chain

#include "polaritonix/pe_theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polaritonix/diagnostics.hpp"

namespace polaritonix {

namespace {

constexpr double kCriticalTolerance = 1e-12;
constexpr double kCoincidenceTolerance = 1e-12;
constexpr double kCoincidenceNudge = 1e-9;
constexpr double kEpsilon = 1.1e-16;
constexpr double kIllConditioned = 1e5;  // rounding then reaches ~1e-11

// exp(w) - 1 without cancellation for small |w|.
cplx expm1_complex(cplx w) {
    const double x = w.real(), y = w.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// True when rate is within relative tolerance of some Matsubara frequency.
bool hits_matsubara(double rate, double temperature) {
    const double step = 2.0 * kPi * temperature;
    const double k = std::round(rate / step);
    return k >= 1.0 && std::abs(rate - k * step) <= kCoincidenceTolerance * rate;
}

// cot(rate / 2T) reduced by the nearest Matsubara frequency (period pi). Near a
// double pole this uses the same difference rate - omega_k as the Matsubara weight,
// so the two diverging coefficients cancel to rounding.
double cot_half(double rate, const ThermalEnv& env) {
    const int k = static_cast<int>(std::round(rate / env.matsubara_frequency(1)));
    const double eps = k >= 1 ? rate - env.matsubara_frequency(k) : rate;
    return 1.0 / std::tan(eps / (2.0 * env.temperature));
}

} // namespace

void VibrationalMode::validate() const {
    if (!(omega_v > 0.0)) throw std::invalid_argument("VibrationalMode: omega_v must be > 0");
    if (!(huang_rhys >= 0.0)) throw std::invalid_argument("VibrationalMode: S must be >= 0");
    if (!(quality > 0.0)) throw std::invalid_argument("VibrationalMode: Q must be > 0");
    if (multiplicity < 1) throw std::invalid_argument("VibrationalMode: multiplicity must be >= 1");
}

int ThermalEnv::k_max() const {
    return static_cast<int>(std::floor(cutoff / (2.0 * kPi * temperature)));
}

double ThermalEnv::matsubara_frequency(int k) const noexcept {
    return 2.0 * kPi * k * temperature;
}

void ThermalEnv::validate() const {
    if (!(temperature > 0.0)) throw std::invalid_argument("ThermalEnv: temperature must be > 0");
    if (!(cutoff > 0.0)) throw std::invalid_argument("ThermalEnv: cutoff must be > 0");
}

ThermalEnv ThermalEnv::with_default_cutoff(double temperature,
                                           std::span<const VibrationalMode> modes) {
    double w = 0.0;
    for (const auto& m : modes) w = std::max(w, m.omega_v);
    return ThermalEnv{temperature, 25.0 * (w > 0.0 ? w : 1.0)};
}

RegimeInfo classify_regime(const VibrationalMode& mode) {
    mode.validate();
    const double q = mode.quality;
    if (std::abs(q - 0.5) <= kCriticalTolerance * 0.5)
        throw CriticalDampingError("classify_regime: Q = 1/2 (critical damping) is excluded");
    const double gamma = mode.gamma();
    RegimeInfo info;
    if (q > 0.5) {
        info.regime = DampingRegime::Underdamped;
        info.renormalized_frequency = mode.omega_v * std::sqrt(1.0 - 1.0 / (4.0 * q * q));
        info.rate_plus = info.rate_minus = 0.5 * gamma;
    } else {
        info.regime = DampingRegime::Overdamped;
        // Gamma_- from Vieta (Gamma_+ Gamma_- = omega_v^2) avoids cancellation.
        const double root = gamma * std::sqrt(1.0 - 4.0 * q * q);
        info.rate_plus = 0.5 * (gamma + root);
        info.rate_minus = mode.omega_v * mode.omega_v / info.rate_plus;
    }
    return info;
}

VibrationalMode resolve_pole_coincidence(const VibrationalMode& mode, const ThermalEnv& env) {
    const RegimeInfo info = classify_regime(mode);
    if (info.regime != DampingRegime::Overdamped) return mode;
    if (!hits_matsubara(info.rate_plus, env.temperature) &&
        !hits_matsubara(info.rate_minus, env.temperature))
        return mode;
    VibrationalMode nudged = mode;
    nudged.quality *= 1.0 + kCoincidenceNudge;
    std::ostringstream msg;
    msg.precision(12);
    msg << "double pole: damping rate coincides with a Matsubara frequency at Q = "
        << mode.quality << "; using Q = " << nudged.quality;
    warn(msg.str());
    return nudged;
}

ResidueCoefficients residue_coefficients(const VibrationalMode& input, const ThermalEnv& env) {
    env.validate();
    const VibrationalMode mode = resolve_pole_coincidence(input, env);
    const RegimeInfo info = classify_regime(mode);
    const double s = mode.effective_huang_rhys();
    const double q = mode.quality;
    const double beta = env.beta();

    ResidueCoefficients rc;
    rc.regime = info.regime;
    rc.renormalized_frequency = info.renormalized_frequency;
    rc.rate_plus = info.rate_plus;
    rc.rate_minus = info.rate_minus;
    rc.quality_used = q;

    if (info.regime == DampingRegime::Underdamped) {
        const double wt = info.renormalized_frequency;
        const cplx n = 1.0 / expm1_complex(beta * cplx(wt, 0.5 * mode.gamma()));
        const double real_part = (mode.omega_v / wt) * (1.0 / (2.0 * q * q) - 1.0);
        rc.bose_complex = n;
        rc.d_minus = s * n * cplx(-real_part, 1.0 / q);
        rc.d_plus = s * (std::conj(n) + 1.0) * cplx(-real_part, -1.0 / q);
    } else {
        // Residues of the spectral function at -i Gamma_pm; the factor
        // (1 -+ 2Q^2)/sqrt(1 - 4Q^2) splits 1/Q between the two rates.
        const double split = (1.0 - 2.0 * q * q) / std::sqrt(1.0 - 4.0 * q * q);
        const double pre = s / (2.0 * q);
        const double cot_p = cot_half(info.rate_plus, env);
        const double cot_m = cot_half(info.rate_minus, env);
        rc.d_plus = pre * cplx(cot_p, -1.0) * (1.0 + split);
        rc.d_minus = pre * cplx(cot_m, -1.0) * (1.0 - split);
    }
    return rc;
}

int series_terms(cplx z, const SeriesOptions& options) {
    if (options.max_terms < 0) throw std::domain_error("series_terms: negative cap");
    const double r = std::abs(z);
    if (r == 0.0) return 0;
    const double log_tol = std::log(options.tolerance);
    const double log_r = std::log(r);
    // log of exp(-a) |z|^{m}/m! exp(|z|) with m = n + 1
    for (int n = 0; n < options.max_terms; ++n) {
        const double m = n + 1.0;
        const double log_bound = -z.real() + m * log_r - std::lgamma(m + 1.0) + r;
        if (log_bound < log_tol && m > r) return n;
    }
    std::ostringstream msg;
    msg << "series truncated at the cap n_max = " << options.max_terms << " for |z| = " << r;
    warn(msg.str());
    return options.max_terms;
}

Mixture exp_correlator_transform(double a, double b, double omega_0, double half_width,
                                 int n_max) {
    if (n_max < 0) throw std::domain_error("exp_correlator_transform: n_max < 0");
    if (!(half_width >= 0.0))
        throw std::domain_error("exp_correlator_transform: negative half_width");
    const cplx zc(a, -b);  // z* with z = a + ib
    std::vector<PoleAtom> atoms;
    atoms.reserve(static_cast<std::size_t>(n_max) + 1);
    // Build e^{-a} (z*)^n / n! in log-magnitude form so large |z| cannot overflow.
    const double log_r = std::log(std::abs(zc));
    const double theta = std::arg(zc);
    for (int n = 0; n <= n_max; ++n) {
        cplx amp;
        if (n == 0) {
            amp = std::polar(std::exp(-a), b);
        } else {
            if (std::abs(zc) == 0.0) break;
            const double mag = std::exp(-a + n * log_r - std::lgamma(n + 1.0));
            amp = std::polar(mag, b + n * theta);
        }
        atoms.push_back(PoleAtom{amp, -n * omega_0, n * half_width});
    }
    return Mixture(std::move(atoms));
}

Mixture vibronic_expansion(const ResidueCoefficients& rc, const SeriesOptions& options) {
    const bool under = rc.regime == DampingRegime::Underdamped;
    const double w_plus = under ? -rc.renormalized_frequency : 0.0;
    const double w_minus = under ? rc.renormalized_frequency : 0.0;
    const Mixture p_plus = exp_correlator_transform(
        rc.d_plus.real(), rc.d_plus.imag(), w_plus, rc.rate_plus, series_terms(rc.d_plus, options));
    const Mixture p_minus =
        exp_correlator_transform(rc.d_minus.real(), rc.d_minus.imag(), w_minus, rc.rate_minus,
                                 series_terms(rc.d_minus, options));
    return convolve(p_plus, p_minus, options.compaction);
}

std::vector<MatsubaraTerm> matsubara_coefficients(const VibrationalMode& input,
                                                  const ThermalEnv& env) {
    env.validate();
    const VibrationalMode mode = resolve_pole_coincidence(input, env);
    const RegimeInfo info = classify_regime(mode);
    const int kmax = env.k_max();
    const double s = mode.effective_huang_rhys();
    const double q = mode.quality;
    const double gamma = mode.gamma();
    const double wv2 = mode.omega_v * mode.omega_v;
    std::vector<MatsubaraTerm> terms;
    terms.reserve(static_cast<std::size_t>(std::max(kmax, 0)));
    for (int k = 1; k <= kmax; ++k) {
        const double wk = env.matsubara_frequency(k);
        const double wk2 = wk * wk;
        // Overdamped: wk^2 - gamma wk + wv^2 = (wk - Gamma_+)(wk - Gamma_-), which vanishes at a double pole.
        const double den = info.regime == DampingRegime::Overdamped
                               ? (wk - info.rate_plus) * (wk - info.rate_minus) * (wk2 + wv2 + gamma * wk)
                               : (wk2 + wv2) * (wk2 + wv2) - gamma * gamma * wk2;
        const double weight = 4.0 * s * env.temperature / q * wk2 * wk / den;
        terms.push_back(MatsubaraTerm{wk, weight});
    }
    return terms;
}

Mixture matsubara_expansion(std::span<const MatsubaraTerm> terms, const SeriesOptions& options) {
    Mixture result = Mixture::delta();
    for (const auto& t : terms) {
        if (t.weight == 0.0) continue;
        const int n = series_terms(cplx(t.weight, 0.0), options);
        result = convolve(result, exp_correlator_transform(t.weight, 0.0, 0.0, t.frequency, n),
                          options.compaction);
    }
    return result;
}

Mixture mode_pe(const VibrationalMode& mode, const ThermalEnv& env, const SeriesOptions& options) {
    const auto terms = matsubara_coefficients(mode, env);
    return convolve(vibronic_expansion(residue_coefficients(mode, env), options),
                    matsubara_expansion(terms, options), options.compaction);
}

Mixture total_pe(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                 const SeriesOptions& options) {
    Mixture vib = Mixture::delta();
    std::vector<MatsubaraTerm> summed;
    for (const auto& mode : modes) {
        if (mode.effective_huang_rhys() == 0.0) {
            mode.validate();
            continue;
        }
        vib = convolve(vib, vibronic_expansion(residue_coefficients(mode, env), options),
                       options.compaction);
        const auto terms = matsubara_coefficients(mode, env);
        if (summed.empty()) {
            summed = terms;
        } else {
            for (std::size_t k = 0; k < terms.size(); ++k) summed[k].weight += terms[k].weight;
        }
    }
    Mixture result = convolve(vib, matsubara_expansion(summed, options), options.compaction);
    const double cond = result.condition_number();
    if (cond > kIllConditioned) {
        std::ostringstream msg;
        msg << "closed-form P(E) is ill-conditioned: sum |alpha| / |sum alpha| = " << cond
            << ", so amplitude rounding alone gives errors near " << cond * kEpsilon;
        warn(msg.str());
    }
    return result;
}

} // namespace polaritonix
