// oracle.cpp - numerical J~(t), FFT to P(E), and sampled-curve utilities

#include "polaritonix/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "polaritonix/diagnostics.hpp"

namespace polaritonix {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Extra Matsubara terms summed explicitly beyond k_max before the integral tail.
constexpr int kExplicitTail = 400;

// FFTW plan creation is not thread-safe; execution is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer fftw_buffer(std::size_t n) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!p) throw std::bad_alloc();
    return FftwBuffer(p);
}

// In-place complex DFT, sign = FFTW_FORWARD (e^{-i}) or FFTW_BACKWARD (e^{+i}).
void fft_inplace(std::vector<cplx>& data, int sign) {
    const int n = static_cast<int>(data.size());
    FftwBuffer buf = fftw_buffer(data.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(n, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
    }
    std::copy(data.begin(), data.end(), reinterpret_cast<cplx*>(buf.get()));
    fftw_execute(plan);
    std::copy(reinterpret_cast<cplx*>(buf.get()), reinterpret_cast<cplx*>(buf.get()) + n,
              data.begin());
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
}

std::size_t next_pow2(double x) {
    std::size_t n = 1;
    while (static_cast<double>(n) < x) n <<= 1;
    return n;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// coth(x) - 1/x, accurate near 0.
double coth_minus_inverse(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 +
                                                                              x2 * 2.0 / 93555.0))));
    }
    return 1.0 / std::tanh(x) - 1.0 / x;
}

// Integral of dw / (w^2 (w^2 + u^2)) from w0 to infinity.
double tail_integral(double u, double w0) {
    if (u < 0.1 * w0) {
        const double r = u * u / (w0 * w0);
        return (1.0 / 3.0 - r / 5.0 + r * r / 7.0) / (w0 * w0 * w0);
    }
    return (1.0 / w0 - (0.5 * kPi - std::atan(w0 / u)) / u) / (u * u);
}

// Spectral function of one mode split into an even part (pairs with
// cos(wt) - 1) and an odd part (pairs with -i sin(wt)). In the Matsubara scheme
// the large-w behaviour a/w^2 (even) and 1/w (odd) is subtracted through
// a/(w^2 + lambda^2) and w/(w^2 + lambda^2), whose transforms are added back
// analytically; the remainders fall off like 1/|w|^3.
class ModeSpectrum {
public:
    ModeSpectrum(const VibrationalMode& mode, const ThermalEnv& env, CutoffScheme scheme)
        : scheme_(scheme) {
        mode.validate();
        env.validate();
        const double s = mode.effective_huang_rhys();
        pref_ = s / (kPi * mode.quality);
        wv2_ = mode.omega_v * mode.omega_v;
        gamma2_ = mode.gamma() * mode.gamma();
        beta_ = env.beta();
        step_ = 2.0 * kPi * env.temperature;
        kmax_ = env.k_max();
        cutoff_ = env.cutoff;
        lambda_ = mode.omega_v;
        omega_peak_ = mode.quality > 0.5 ? mode.omega_v * std::sqrt(1.0 - 0.25 / (mode.quality * mode.quality))
                                         : 0.0;
        half_width_ = 0.5 * mode.gamma();

        // 1 - h_k for k_max < k <= k_max + kExplicitTail, h_k = w_k^4 / den_k.
        double excess = 0.0;
        for (int k = kmax_ + 1; k <= kmax_ + kExplicitTail; ++k) {
            const double wk2 = step_ * step_ * k * k;
            const double den = (wk2 + wv2_) * (wk2 + wv2_) - gamma2_ * wk2;
            const double one_minus_h = (wk2 * (2.0 * wv2_ - gamma2_) + wv2_ * wv2_) / den;
            tail_wk2_.push_back(wk2);
            tail_coef_.push_back(one_minus_h);
            excess += one_minus_h;
        }
        tail_c_ = 2.0 * wv2_ - gamma2_;
        tail_w0_ = step_ * (kmax_ + kExplicitTail + 0.5);
        excess += tail_c_ / (step_ * tail_w0_);
        a_ = (2.0 / beta_) * (1.0 + 2.0 * kmax_ + 2.0 * excess);
    }

    double pref() const noexcept { return pref_; }
    double lambda() const noexcept { return lambda_; }
    double omega_peak() const noexcept { return omega_peak_; }
    double half_width() const noexcept { return half_width_; }

    // Analytic contributions for t >= 0 (per unit pref): even-part subtraction
    // and odd-part subtraction combined with the continuity constant.
    cplx analytic(double t) const {
        if (scheme_ == CutoffScheme::Sharp) return {0.0, 0.0};
        const double e = std::exp(-lambda_ * t);
        return {a_ * (kPi / lambda_) * (e - 1.0), t > 0.0 ? kPi * (1.0 - e) : 0.0};
    }
    cplx analytic_limit() const {
        if (scheme_ == CutoffScheme::Sharp) return {0.0, 0.0};
        return {-a_ * kPi / lambda_, kPi};
    }

    double g(double w) const {
        const double w2 = w * w;
        const double d = w2 - wv2_;
        return w2 * w / (d * d + w2 * gamma2_);
    }

    // g(w) coth(beta w / 2)
    double g_coth(double w) const {
        const double w2 = w * w;
        const double d = w2 - wv2_;
        const double x = 0.5 * beta_ * w;
        const double w_over_tanh = std::abs(x) < 1e-8 ? 2.0 / beta_ : w / std::tanh(x);
        return w2 * w_over_tanh / (d * d + w2 * gamma2_);
    }

    // Matsubara poles beyond k_max, Sum_{k > kmax} (4/beta) h_k / (w^2 + w_k^2).
    double dropped_poles(double w) const {
        const double w2 = w * w;
        double kept = 0.0;
        for (int k = 1; k <= kmax_; ++k) kept += 1.0 / (w2 + step_ * step_ * k * k);
        double excess = 0.0;
        for (std::size_t i = 0; i < tail_wk2_.size(); ++i) excess += tail_coef_[i] / (w2 + tail_wk2_[i]);
        excess += tail_c_ / step_ * tail_integral(std::abs(w), tail_w0_);
        const double x = 0.5 * beta_ * w;
        const double head = w == 0.0 ? beta_ / 6.0 : coth_minus_inverse(x) / w;
        return head - (4.0 / beta_) * (kept + excess);
    }

    double even(double w) const {
        if (scheme_ == CutoffScheme::Sharp) return std::abs(w) <= cutoff_ ? g_coth(w) : 0.0;
        return g_coth(w) - dropped_poles(w) - a_ / (w * w + lambda_ * lambda_);
    }

    double odd(double w) const {
        if (scheme_ == CutoffScheme::Sharp) return std::abs(w) <= cutoff_ ? g(w) : 0.0;
        return g(w) - w / (w * w + lambda_ * lambda_);
    }

    bool sharp() const noexcept { return scheme_ == CutoffScheme::Sharp; }
    double cutoff() const noexcept { return cutoff_; }

private:
    CutoffScheme scheme_;
    double pref_{0.0}, wv2_{0.0}, gamma2_{0.0}, beta_{1.0}, step_{1.0};
    int kmax_{0};
    double cutoff_{0.0}, lambda_{1.0}, omega_peak_{0.0}, half_width_{0.0};
    double a_{0.0}, tail_c_{0.0}, tail_w0_{1.0};
    std::vector<double> tail_wk2_, tail_coef_;
};

double slowest_rate(std::span<const VibrationalMode> modes, const ThermalEnv& env) {
    double rate = std::numeric_limits<double>::infinity();
    for (const auto& m : modes) {
        if (m.effective_huang_rhys() == 0.0) continue;
        const RegimeInfo info = classify_regime(m);
        rate = std::min({rate, info.rate_plus, info.rate_minus, m.omega_v});
    }
    if (env.k_max() >= 1) rate = std::min(rate, env.matsubara_frequency(1));
    return rate;
}

double quad(const std::function<double(double)>& f, double a, double b, double tol) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(f, a, b, 18, tol, &err);
    if (!std::isfinite(v)) throw std::runtime_error("j_numeric: non-finite quadrature result");
    return v;
}

} // namespace

// --------------------------- time grid ---------------------------------------

void TimeGrid::validate() const {
    if (!(t_max > 0.0)) throw std::domain_error("TimeGrid: t_max must be positive");
    if (!is_pow2(n_points) || n_points < 16)
        throw std::domain_error("TimeGrid: n_points must be a power of two >= 16");
}

TimeGrid TimeGrid::for_modes(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                             std::size_t n_points) {
    double rate = std::numeric_limits<double>::infinity();
    for (const auto& m : modes) {
        const RegimeInfo info = classify_regime(m);
        rate = std::min({rate, info.rate_plus, info.rate_minus});
    }
    if (!std::isfinite(rate)) rate = 1.0;
    TimeGrid grid{50.0 / rate, n_points};
    while (grid.nyquist() < env.cutoff) grid.n_points *= 2;
    return grid;
}

// --------------------------- J~(t) -------------------------------------------

cplx j_numeric(std::span<const VibrationalMode> modes, const ThermalEnv& env, double t,
               const OracleOptions& options) {
    if (t == 0.0) return {0.0, 0.0};
    const double at = std::abs(t);
    cplx total{0.0, 0.0};
    for (const auto& mode : modes) {
        if (mode.effective_huang_rhys() == 0.0) continue;
        const ModeSpectrum spec(mode, env, options.cutoff);
        const double tol = options.quadrature_tolerance;

        // Breakpoints: the resonance region of g, then panels short enough to
        // hold a few oscillations of cos(wt) each.
        const double upper = spec.sharp() ? spec.cutoff()
                                          : std::max({8.0 * env.cutoff, 200.0 * mode.omega_v});
        std::vector<double> cuts{0.0};
        if (spec.omega_peak() > 0.0) {
            for (double m : {-20.0, -4.0, -1.0, 0.0, 1.0, 4.0, 20.0}) {
                const double w = spec.omega_peak() + m * spec.half_width();
                if (w > 0.0 && w < upper) cuts.push_back(w);
            }
        }
        const double panel = std::max(8.0 * kPi / at, mode.omega_v);
        for (double w = panel; w < upper; w += panel) cuts.push_back(w);
        cuts.push_back(upper);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double lo = cuts[i], hi = cuts[i + 1];
            re += quad([&](double w) { return spec.even(w) * (std::cos(w * at) - 1.0); }, lo, hi, tol);
            im += quad([&](double w) { return spec.odd(w) * std::sin(w * at); }, lo, hi, tol);
        }
        if (!spec.sharp()) {
            re += quad([&](double w) { return spec.even(w) * (std::cos(w * at) - 1.0); }, upper,
                       std::numeric_limits<double>::infinity(), tol);
            im += quad([&](double w) { return spec.odd(w) * std::sin(w * at); }, upper,
                       std::numeric_limits<double>::infinity(), tol);
        }
        // Both parts were integrated over w > 0 only; even/odd symmetry doubles them.
        const cplx value = cplx(2.0 * re, -2.0 * im) + spec.analytic(at);
        total += spec.pref() * value;
    }
    return t > 0.0 ? total : std::conj(total);
}

cplx j_numeric(const VibrationalMode& mode, const ThermalEnv& env, double t,
               const OracleOptions& options) {
    return j_numeric(std::span<const VibrationalMode>(&mode, 1), env, t, options);
}

namespace {

struct GridExponent {
    std::vector<cplx> values;  // J~(n dt), n = 0 .. N/2
    cplx limit{0.0, 0.0};      // J~(t -> +inf)
};

GridExponent exponent_on_grid(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                              const TimeGrid& grid, const OracleOptions& options) {
    grid.validate();
    const std::size_t half = grid.n_points / 2;
    GridExponent out;
    out.values.assign(half + 1, cplx(0.0, 0.0));

    std::vector<ModeSpectrum> specs;
    for (const auto& m : modes)
        if (m.effective_huang_rhys() != 0.0) specs.emplace_back(m, env, options.cutoff);
    if (specs.empty()) return out;

    // Frequency range: at least the P-grid Nyquist and 8 omega_L (Matsubara
    // scheme, where the remainder decays like 1/w^3). Frequency spacing: the
    // implied time period must exceed t_max by 40 slowest decay times.
    const double dt = grid.dt();
    std::size_t refine = 1;
    if (options.cutoff == CutoffScheme::Matsubara)
        while (kPi * refine / dt < 8.0 * env.cutoff) refine *= 2;
    const double dt_fine = dt / static_cast<double>(refine);
    const double period = grid.t_max + 40.0 / slowest_rate(modes, env);
    const std::size_t n_fine =
        std::max(next_pow2(period / dt_fine) * 2, grid.n_points * refine);
    const double dw = 2.0 * kPi / (static_cast<double>(n_fine) * dt_fine);

    std::vector<cplx> samples(n_fine);
    constexpr std::size_t chunk = 4096;
    parallel_for((n_fine + chunk - 1) / chunk, [&](std::size_t b) {
        const std::size_t end = std::min(n_fine, (b + 1) * chunk);
        for (std::size_t j = b * chunk; j < end; ++j) {
            const double idx = j < n_fine / 2 ? static_cast<double>(j)
                                              : static_cast<double>(j) - static_cast<double>(n_fine);
            const double w = idx * dw;
            double f = 0.0;
            for (const auto& s : specs) f += s.pref() * (s.even(w) + s.odd(w));
            samples[j] = f * dw;
        }
    });
    // The Nyquist sample has no mirror partner; dropping it keeps J~ Hermitian.
    samples[n_fine / 2] = 0.0;

    // J_rem(t) = Sum F(w) (e^{-iwt} - 1) dw; the odd part contributes -i Sum F_o sin(wt).
    fft_inplace(samples, FFTW_FORWARD);
    const double zero = samples[0].real();

    cplx analytic_limit{0.0, 0.0};
    for (const auto& s : specs) analytic_limit += s.pref() * s.analytic_limit();
    for (std::size_t n = 1; n <= half; ++n) {
        const double t = static_cast<double>(n) * dt;
        cplx value = samples[n * refine] - zero;
        for (const auto& s : specs) value += s.pref() * s.analytic(t);
        out.values[n] = value;
    }
    out.limit = cplx(-zero, 0.0) + analytic_limit;
    return out;
}

} // namespace

std::vector<cplx> j_on_grid(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                            const TimeGrid& grid, const OracleOptions& options) {
    return exponent_on_grid(modes, env, grid, options).values;
}

// --------------------------- P(E) --------------------------------------------

SampledDensity density_from_correlator(const std::function<cplx(double)>& correlator,
                                       const TimeGrid& grid, const Regularizer& regularizer,
                                       double beta) {
    grid.validate();
    const std::size_t n = grid.n_points;
    const double dt = grid.dt();
    const double de = grid.energy_step();

    Regularizer applied = regularizer;
    double mu = 0.0;
    if (applied.kind == Regularizer::Kind::Lorentzian) {
        if (!(applied.width > 0.0)) applied.width = 4.0 * de;
    } else {
        if (!(applied.width > 0.0)) applied.width = std::sqrt(2.0 * std::log(1e12)) / grid.t_max;
        mu = 0.5 * beta * applied.width * applied.width;
    }
    auto window = [&](double t) -> cplx {
        if (applied.kind == Regularizer::Kind::Lorentzian)
            return std::exp(-applied.width * std::abs(t));
        const double s = applied.width * t;
        return std::exp(cplx(-0.5 * s * s, -mu * t));
    };

    std::vector<cplx> buf(n);
    const long half = static_cast<long>(n / 2);
    for (long k = -half; k < half; ++k) {
        const double t = static_cast<double>(k) * dt;
        const std::size_t slot = static_cast<std::size_t>(k < 0 ? k + static_cast<long>(n) : k);
        buf[slot] = correlator(t) * window(t) * (dt / (2.0 * kPi));
    }
    fft_inplace(buf, FFTW_BACKWARD);

    SampledDensity out;
    out.energy.resize(n);
    out.values.resize(n);
    double max_re = 0.0, max_im = 0.0;
    for (long m = -half; m < half; ++m) {
        const std::size_t slot = static_cast<std::size_t>(m < 0 ? m + static_cast<long>(n) : m);
        const std::size_t pos = static_cast<std::size_t>(m + half);
        out.energy[pos] = static_cast<double>(m) * de;
        out.values[pos] = buf[slot].real();
        max_re = std::max(max_re, std::abs(buf[slot].real()));
        max_im = std::max(max_im, std::abs(buf[slot].imag()));
    }
    out.max_imag_ratio = max_re > 0.0 ? max_im / max_re : 0.0;
    out.period = 2.0 * kPi / dt;
    out.regularizer = applied;
    return out;
}

SampledDensity p_numeric(std::span<const VibrationalMode> modes, const ThermalEnv& env,
                         const TimeGrid& grid, const OracleOptions& options) {
    grid.validate();
    env.validate();
    if (grid.nyquist() < env.cutoff) {
        std::ostringstream msg;
        msg << "p_numeric: Nyquist violation, pi/dt = " << grid.nyquist()
            << " is below the cutoff " << env.cutoff;
        throw std::domain_error(msg.str());
    }
    const GridExponent j = exponent_on_grid(modes, env, grid, options);
    const double dt = grid.dt();
    const std::size_t half = grid.n_points / 2;
    auto correlator = [&](double t) -> cplx {
        const long idx = std::lround(std::abs(t) / dt);
        const cplx c = std::exp(j.values[static_cast<std::size_t>(std::min<long>(idx, static_cast<long>(half)))]);
        return t >= 0.0 ? c : std::conj(c);
    };
    SampledDensity out = density_from_correlator(correlator, grid, options.regularizer, env.beta());
    out.tail_residual = std::abs(std::exp(j.values[half]) - std::exp(j.limit));
    return out;
}

SampledDensity p_numeric(const VibrationalMode& mode, const ThermalEnv& env, const TimeGrid& grid,
                         const OracleOptions& options) {
    return p_numeric(std::span<const VibrationalMode>(&mode, 1), env, grid, options);
}

std::vector<double> periodized_mixture(const Mixture& mixture, const SampledDensity& reference) {
    if (reference.regularizer.kind != Regularizer::Kind::Lorentzian)
        throw std::domain_error("periodized_mixture: only Lorentzian regularization is supported");
    const std::size_t n = reference.energy.size();
    if (n < 2) throw std::domain_error("periodized_mixture: empty reference grid");
    const double period = reference.period;
    const double e0 = reference.energy.front();
    const double de = reference.energy[1] - reference.energy[0];
    const double extra = reference.regularizer.width;
    const auto atoms = mixture.atoms();

    std::vector<double> out(n, 0.0);
    constexpr std::size_t block = 512;
    const cplx rot = std::polar(1.0, 2.0 * kPi * de / period);
    parallel_for((n + block - 1) / block, [&](std::size_t b) {
        const std::size_t begin = b * block, end = std::min(n, begin + block);
        for (const auto& a : atoms) {
            const double width = a.half_width + extra;
            const double e = std::exp(-2.0 * kPi * width / period);
            const double num_f = (1.0 - e * e) / period;
            const double num_g = 2.0 * e / period;
            const double base = 1.0 + e * e;
            const double ar = a.amplitude.real(), ai = a.amplitude.imag();
            cplx phase = std::polar(1.0, 2.0 * kPi * (e0 + static_cast<double>(begin) * de - a.center) / period);
            for (std::size_t i = begin; i < end; ++i) {
                const double inv = 1.0 / (base - 2.0 * e * phase.real());
                out[i] += (ar * num_f + ai * num_g * phase.imag()) * inv;
                phase *= rot;
            }
        }
    });
    return out;
}

double convolution_rule_error(const Mixture& a, const Mixture& b, double period,
                              std::size_t points) {
    if (points < 16 || !(period > 0.0))
        throw std::domain_error("convolution_rule_error: need points >= 16 and period > 0");
    if (a.has_deltas() || b.has_deltas())
        throw std::domain_error("convolution_rule_error: delta atoms cannot be sampled");
    const double dx = period / static_cast<double>(points);
    auto reference = [&](double start, std::size_t n) {
        SampledDensity r;
        r.energy.resize(n);
        for (std::size_t i = 0; i < n; ++i) r.energy[i] = start + static_cast<double>(i) * dx;
        r.period = period;
        r.regularizer = Regularizer{Regularizer::Kind::Lorentzian, 0.0};
        return r;
    };
    const SampledDensity one = reference(-0.5 * period, points);
    const SampledDensity two = reference(-period, 2 * points);
    const SampledFunction sa{-0.5 * period, dx, periodized_mixture(a, one)};
    const SampledFunction sb{-period, dx, periodized_mixture(b, two)};
    const SampledFunction conv = convolve_numeric(sa, sb);
    // conv starts at -3 period / 2; the central period begins at index points.
    std::vector<double> numeric(conv.values.begin() + static_cast<std::ptrdiff_t>(points),
                                conv.values.begin() + static_cast<std::ptrdiff_t>(2 * points));
    const std::vector<double> symbolic = periodized_mixture(convolve(a, b), one);
    // A periodized g_L has zero mean, so the circular convolution has no
    // zero-frequency term, while g * g = -f has mean -1/period. Only the
    // zero mode is ill-defined; it is removed from the difference.
    std::vector<double> diff(points);
    double mean = 0.0;
    for (std::size_t i = 0; i < points; ++i) mean += (diff[i] = numeric[i] - symbolic[i]);
    mean /= static_cast<double>(points);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        num += std::abs(diff[i] - mean);
        den += std::abs(symbolic[i]);
    }
    return num / den;
}

double relative_l1(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::domain_error("relative_l1: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::abs(a[i] - b[i]);
        den += std::abs(b[i]);
    }
    return den > 0.0 ? num / den : num;
}

DetailedBalanceReport detailed_balance(const SampledDensity& density, double beta, double floor) {
    const auto& e = density.energy;
    const auto& p = density.values;
    const double pmax = *std::max_element(p.begin(), p.end());
    const double threshold = floor * pmax;
    // Grid is m * dE for m = -N/2 .. N/2-1, so index of 0 is N/2.
    const std::size_t zero = e.size() / 2;
    DetailedBalanceReport report;
    double sign_sum = 0.0;
    for (std::size_t k = 1; zero + k < e.size(); ++k) {
        const double pp = p[zero + k], pm = p[zero - k];
        if (!(pp > threshold && pm > threshold)) continue;
        const double be = beta * e[zero + k];
        const double lr = std::log(pp / pm);
        sign_sum += lr / be;
        report.max_relative_error = std::max(report.max_relative_error, std::abs(std::abs(lr) - be) / be);
        ++report.points;
    }
    report.fitted_sign = report.points ? sign_sum / static_cast<double>(report.points) : 0.0;
    return report;
}

// --------------------------- sampled curves ----------------------------------

SampledFunction sample(const std::function<double(double)>& f, double x0, double dx,
                       std::size_t n) {
    SampledFunction s{x0, dx, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) s.values[i] = f(s.x(i));
    return s;
}

SampledFunction convolve_numeric(const SampledFunction& a, const SampledFunction& b) {
    if (a.values.empty() || b.values.empty())
        throw std::domain_error("convolve_numeric: empty input");
    if (std::abs(a.dx - b.dx) > 1e-12 * std::max(a.dx, b.dx))
        throw std::domain_error("convolve_numeric: grid spacings differ");
    const std::size_t len = a.values.size() + b.values.size() - 1;
    const std::size_t n = next_pow2(static_cast<double>(len));
    std::vector<cplx> fa(n, 0.0), fb(n, 0.0);
    std::copy(a.values.begin(), a.values.end(), fa.begin());
    std::copy(b.values.begin(), b.values.end(), fb.begin());
    fft_inplace(fa, FFTW_FORWARD);
    fft_inplace(fb, FFTW_FORWARD);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_inplace(fa, FFTW_BACKWARD);
    SampledFunction out{a.x0 + b.x0, a.dx, std::vector<double>(len)};
    const double scale = a.dx / static_cast<double>(n);
    for (std::size_t i = 0; i < len; ++i) out.values[i] = fa[i].real() * scale;
    return out;
}

// --------------------------- residues and special functions ------------------

cplx numeric_residue(const std::function<cplx(cplx)>& f, cplx pole, double radius, int nodes) {
    cplx acc{0.0, 0.0};
    for (int k = 0; k < nodes; ++k) {
        const cplx e = std::polar(1.0, 2.0 * kPi * k / nodes);
        acc += f(pole + radius * e) * e;
    }
    return acc * (radius / nodes);
}

cplx spectral_function(const VibrationalMode& mode, const ThermalEnv& env, cplx omega) {
    const double pref = mode.effective_huang_rhys() / (kPi * mode.quality);
    const double wv2 = mode.omega_v * mode.omega_v;
    const double g2 = mode.gamma() * mode.gamma();
    const cplx w2 = omega * omega;
    const cplx g = w2 * omega / ((w2 - wv2) * (w2 - wv2) + w2 * g2);
    const cplx coth = 1.0 / std::tanh(0.5 * env.beta() * omega);
    return pref * g * (coth + 1.0);
}

double matsubara_factor_numeric(double weight, double frequency, double energy) {
    if (!(frequency > 0.0)) throw std::domain_error("matsubara_factor_numeric: frequency <= 0");
    if (weight == 0.0) return 0.0;
    const double x = energy / frequency;
    const double s_max = std::max(1.0, std::log(std::abs(weight) * 1e18));
    auto f = [&](double s) { return std::cos(s * x) * std::expm1(weight * std::exp(-s)); };
    double err = 0.0;
    const double integral = gauss_kronrod<double, 61>::integrate(f, 0.0, s_max, 20, 1e-14, &err);
    return std::exp(-weight) / (kPi * frequency) * integral;
}

} // namespace polaritonix
