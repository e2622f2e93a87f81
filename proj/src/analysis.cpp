// analysis.cpp - peak search, FWHM, detuning scans and feature extraction

#include "polaritonix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "polaritonix/diagnostics.hpp"

namespace polaritonix {

namespace {

constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;
constexpr std::uintmax_t kMaxIterations = 200;

// A half-height crossing lies beyond the sampled bracket; callers may widen it.
class BracketExhausted : public OverlappingPeaks {
public:
    using OverlappingPeaks::OverlappingPeaks;
};

struct UniformGrid {
    double lo{0.0};
    double step{1.0};
    std::size_t n{0};
    double x(std::size_t i) const noexcept { return lo + static_cast<double>(i) * step; }
};

UniformGrid make_grid(double lo, double hi, double step, std::size_t max_points) {
    if (!(hi > lo)) throw std::invalid_argument("analysis: empty bracket");
    if (max_points < 3) throw std::invalid_argument("analysis: need at least 3 scan points");
    step = std::max(step, (hi - lo) / static_cast<double>(max_points - 1));
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
    return UniformGrid{lo, step, std::max<std::size_t>(n, 3)};
}

double bisect_crossing(const Evaluator& f, double level, double a, double b, double tolerance) {
    auto g = [&](double x) { return f(x) - level; };
    auto done = [tolerance](double l, double r) { return std::abs(r - l) <= tolerance; };
    std::uintmax_t iterations = kMaxIterations;
    try {
        const auto r = boost::math::tools::bisect(g, std::min(a, b), std::max(a, b), done, iterations);
        return 0.5 * (r.first + r.second);
    } catch (const boost::math::evaluation_error& e) {
        throw OverlappingPeaks(std::string("half-height crossing not bracketed: ") + e.what());
    }
}

std::vector<Peak> peaks_from_samples(std::span<const double> v, const UniformGrid& grid,
                                     const Evaluator& f, double tolerance) {
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        const double xi = grid.x(i);
        auto neg = [&](double u) { return -f(xi + u); };
        std::uintmax_t iterations = kMaxIterations;
        const auto r = boost::math::tools::brent_find_minima(neg, -grid.step, grid.step, kBrentBits,
                                                             iterations);
        Peak p{xi + r.first, -r.second};
        if (p.height < v[i]) p = Peak{xi, v[i]};
        if (!peaks.empty() && std::abs(p.position - peaks.back().position) <= tolerance) {
            if (p.height > peaks.back().height) peaks.back() = p;
            continue;
        }
        peaks.push_back(p);
    }
    if (peaks.empty()) throw NoPeaks("no local maximum inside the bracket");
    return peaks;
}

// Half-height crossings found by walking the samples outward from the peak,
// then bisecting the exact evaluator between the last two samples.
double fwhm_from_samples(std::span<const double> v, const UniformGrid& grid, const Evaluator& f,
                         const Peak& peak, double tolerance) {
    const double half = 0.5 * peak.height;
    const double pos = (peak.position - grid.lo) / grid.step;
    auto crossing = [&](int direction) {
        long j = direction > 0 ? static_cast<long>(std::floor(pos)) + 1
                               : static_cast<long>(std::ceil(pos)) - 1;
        double inner_x = peak.position;
        double previous = peak.height;
        for (; j >= 0 && j < static_cast<long>(v.size()); j += direction) {
            const double value = v[static_cast<std::size_t>(j)];
            const double x = grid.x(static_cast<std::size_t>(j));
            if (value < half) return bisect_crossing(f, half, inner_x, x, tolerance);
            if (value > previous * (1.0 + 1e-12) && std::abs(x - peak.position) > grid.step)
                throw OverlappingPeaks("neighbouring peak rises before half height is reached");
            previous = value;
            inner_x = x;
        }
        throw BracketExhausted("half height not reached inside the bracket");
    };
    const double right = crossing(+1);
    const double left = crossing(-1);
    return right - left;
}

std::vector<double> sample_values(const Evaluator& f, const UniformGrid& grid) {
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = f(grid.x(i));
    return v;
}

double resolve(double value, double fallback) { return value > 0.0 ? value : fallback; }

} // namespace

std::vector<Peak> find_peaks(const Evaluator& f, double lo, double hi, const PeakOptions& options) {
    const UniformGrid grid = make_grid(lo, hi, resolve(options.scan_step, (hi - lo) / 4096.0),
                                       std::numeric_limits<std::size_t>::max());
    const auto v = sample_values(f, grid);
    return peaks_from_samples(v, grid, f, options.tolerance);
}

double fwhm(const Evaluator& f, const Peak& peak, double lo, double hi, const PeakOptions& options) {
    const UniformGrid grid = make_grid(lo, hi, resolve(options.scan_step, (hi - lo) / 4096.0),
                                       std::numeric_limits<std::size_t>::max());
    const auto v = sample_values(f, grid);
    return fwhm_from_samples(v, grid, f, peak, options.tolerance);
}

std::vector<Peak> dominant_peaks(std::span<const Peak> peaks, double fraction) {
    double top = 0.0;
    for (const auto& p : peaks) top = std::max(top, p.height);
    std::vector<Peak> out;
    for (const auto& p : peaks)
        if (p.height >= fraction * top) out.push_back(p);
    return out;
}

// --------------------------- transmission scanner ----------------------------

TransmissionScanner::TransmissionScanner(const ResponseModel& model, double detuning_lo,
                                         double detuning_hi, const AnalysisOptions& options)
    : model_(model), options_(options), unit_(model.frequency_unit()) {
    options_.detuning_step = resolve(options_.detuning_step, 0.25 * unit_);
    options_.rabi_tolerance = resolve(options_.rabi_tolerance, 1e-4 * unit_);
    options_.linewidth_tolerance = resolve(options_.linewidth_tolerance, 1e-3 * unit_);
    options_.peak_tolerance = resolve(options_.peak_tolerance, 1e-6 * unit_);

    const auto& cav = model.cavity();
    const double omega_m = model.molecule().omega_m;
    const double kappa_m = model.absorption().kappa_m();
    const double pad = 2.0 * cav.g_N + 10.0 * (cav.kappa_c + kappa_m) + 5.0 * unit_ +
                       model.molecule().polaron_shift();
    lo_ = omega_m + std::min(detuning_lo, 0.0) - pad;
    hi_ = omega_m + std::max(detuning_hi, 0.0) + pad;
    const double step = std::min({cav.kappa_c / 8.0, kappa_m / 8.0, unit_ / 20.0});
    const UniformGrid grid = make_grid(lo_, hi_, step, options_.max_scan_points);
    step_ = grid.step;

    absorption_.resize(grid.n);
    const double g2 = cav.g_N * cav.g_N;
    constexpr std::size_t chunk = 256;
    parallel_for((grid.n + chunk - 1) / chunk, [&](std::size_t b) {
        const std::size_t end = std::min(grid.n, (b + 1) * chunk);
        for (std::size_t i = b * chunk; i < end; ++i)
            absorption_[i] = g2 * model_.absorption_at(grid.x(i));
    });
}

std::vector<double> TransmissionScanner::sampled(double detuning) const {
    const double omega_c = model_.molecule().omega_m + detuning;
    const double half_kc = 0.5 * model_.cavity().kappa_c;
    std::vector<double> v(absorption_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = lo_ + static_cast<double>(i) * step_;
        v[i] = std::norm(1.0 / (cplx(-half_kc, x - omega_c) + absorption_[i]));
    }
    return v;
}

Evaluator TransmissionScanner::exact(double detuning) const {
    return [m = model_.with_detuning(detuning)](double x) { return m.transmission(x); };
}

std::vector<Peak> TransmissionScanner::peaks(double detuning) const {
    const UniformGrid grid{lo_, step_, absorption_.size()};
    return peaks_from_samples(sampled(detuning), grid, exact(detuning), options_.peak_tolerance);
}

PolaritonPair TransmissionScanner::polaritons(double detuning, bool with_linewidths) const {
    const UniformGrid grid{lo_, step_, absorption_.size()};
    const auto v = sampled(detuning);
    const Evaluator f = exact(detuning);
    const auto all = peaks_from_samples(v, grid, f, options_.peak_tolerance);
    const auto dom = dominant_peaks(all, options_.dominance);
    if (dom.size() > 2) {
        std::ostringstream msg;
        msg << dom.size() << " peaks exceed " << options_.dominance * 100.0
            << "% of the maximum at detuning " << detuning << " (two expected)";
        throw AmbiguousSplitting(msg.str(), dom.size());
    }
    if (dom.size() < 2) {
        std::ostringstream msg;
        msg << "only " << dom.size() << " dominant peak at detuning " << detuning;
        throw NoSplitting(msg.str());
    }
    PolaritonPair pair{dom[0], dom[1], 0.0, 0.0};
    if (with_linewidths) {
        pair.linewidth_lower = fwhm_from_samples(v, grid, f, pair.lower, options_.peak_tolerance);
        pair.linewidth_upper = fwhm_from_samples(v, grid, f, pair.upper, options_.peak_tolerance);
    }
    return pair;
}

double TransmissionScanner::splitting(double detuning) const {
    const auto p = polaritons(detuning);
    return p.upper.position - p.lower.position;
}

// --------------------------- detuning scans ----------------------------------

std::pair<double, double> default_detuning_range(const CavityParams& cav,
                                                 const MoleculeParams& mol) {
    const double span = cav.g_N > 0.0 ? 2.0 * cav.g_N : mol.frequency_unit();
    return {-span, span};
}

namespace {

std::vector<double> detuning_points(double lo, double hi, double step) {
    if (!(hi > lo)) throw std::invalid_argument("detuning range must satisfy lo < hi");
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9)) + 1;
    std::vector<double> pts(std::max<std::size_t>(n, 2));
    for (std::size_t i = 0; i < pts.size(); ++i)
        pts[i] = std::min(hi, lo + static_cast<double>(i) * step);
    return pts;
}

} // namespace

RabiResult rabi_splitting(const TransmissionScanner& scanner, double lo, double hi) {
    const auto pts = detuning_points(lo, hi, scanner.options().detuning_step);
    std::vector<double> split(pts.size(), std::numeric_limits<double>::infinity());
    parallel_for(pts.size(), [&](std::size_t i) {
        try {
            split[i] = scanner.splitting(pts[i]);
        } catch (const NoSplitting&) {
        } catch (const NoPeaks&) {
        }
    });
    const auto best = static_cast<std::size_t>(
        std::min_element(split.begin(), split.end()) - split.begin());
    if (!std::isfinite(split[best]))
        throw NoSplitting("fewer than two dominant peaks at every detuning in range");

    const double centre = pts[best];
    const double a = best > 0 ? pts[best - 1] - centre : 0.0;
    const double b = best + 1 < pts.size() ? pts[best + 1] - centre : 0.0;
    RabiResult result{split[best], centre};
    if (b - a <= 0.0) return result;
    auto objective = [&](double u) {
        try {
            return scanner.splitting(centre + u);
        } catch (const NoSplitting&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    // Stop once the bracket is below the requested tolerance.
    const int bits = std::clamp(
        static_cast<int>(std::ceil(std::log2((b - a) / scanner.options().rabi_tolerance))) + 2, 8,
        kBrentBits);
    std::uintmax_t iterations = kMaxIterations;
    const auto r = boost::math::tools::brent_find_minima(objective, a, b, bits, iterations);
    if (r.second < result.splitting) result = RabiResult{r.second, centre + r.first};
    return result;
}

RabiResult rabi_splitting(const CavityParams& cav, const MoleculeParams& mol,
                          const ThermalEnv& env, double lo, double hi,
                          const AnalysisOptions& options) {
    const ResponseModel model(cav, mol, env);
    return rabi_splitting(TransmissionScanner(model, lo, hi, options), lo, hi);
}

double equal_linewidth_detuning(const TransmissionScanner& scanner, double lo, double hi) {
    const auto pts = detuning_points(lo, hi, scanner.options().detuning_step);
    auto difference = [&](double d) {
        const auto p = scanner.polaritons(d, true);
        return p.linewidth_upper - p.linewidth_lower;
    };
    std::vector<double> h(pts.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(pts.size(), [&](std::size_t i) {
        try {
            h[i] = difference(pts[i]);
        } catch (const AnalysisError&) {
        }
    });

    double best_a = 0.0, best_b = 0.0, best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (h[i] == 0.0) {
            if (std::abs(pts[i]) < best_distance) {
                best_distance = std::abs(pts[i]);
                best_a = best_b = pts[i];
            }
            continue;
        }
        if (i + 1 < pts.size() && std::isfinite(h[i]) && std::isfinite(h[i + 1]) &&
            h[i] * h[i + 1] < 0.0) {
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            if (std::abs(mid) < best_distance) {
                best_distance = std::abs(mid);
                best_a = pts[i];
                best_b = pts[i + 1];
            }
        }
    }
    if (!std::isfinite(best_distance))
        throw NotBracketed("Gamma_+ - Gamma_- does not change sign in the detuning range");
    if (best_a == best_b) return best_a;
    const double tol = scanner.options().linewidth_tolerance;
    auto done = [tol](double l, double r) { return std::abs(r - l) <= tol; };
    std::uintmax_t iterations = kMaxIterations;
    const auto r = boost::math::tools::bisect(difference, best_a, best_b, done, iterations);
    return 0.5 * (r.first + r.second);
}

double equal_linewidth_detuning(const CavityParams& cav, const MoleculeParams& mol,
                                const ThermalEnv& env, double lo, double hi,
                                const AnalysisOptions& options) {
    const ResponseModel model(cav, mol, env);
    return equal_linewidth_detuning(TransmissionScanner(model, lo, hi, options), lo, hi);
}

double intensity_ratio(const TransmissionScanner& scanner, double detuning) {
    const auto p = scanner.polaritons(detuning);
    return p.upper.height / p.lower.height;
}

double intensity_ratio(const CavityParams& cav, const MoleculeParams& mol, const ThermalEnv& env,
                       double detuning, const AnalysisOptions& options) {
    const ResponseModel model(cav, mol, env);
    return intensity_ratio(TransmissionScanner(model, detuning, detuning + 1e-9, options), detuning);
}

PolaritonFeatures extract_features(const ResponseModel& model, double lo, double hi,
                                   const AnalysisOptions& options) {
    const double here = model.detuning();
    const TransmissionScanner scanner(model, std::min(lo, here), std::max(hi, here), options);
    PolaritonFeatures out;
    out.detuning = here;
    const RabiResult rabi = rabi_splitting(scanner, lo, hi);
    out.rabi_splitting = rabi.splitting;
    out.delta_R = rabi.detuning;
    const auto local = scanner.polaritons(here, true);
    out.omega_minus = local.lower.position;
    out.omega_plus = local.upper.position;
    out.linewidth_minus = local.linewidth_lower;
    out.linewidth_plus = local.linewidth_upper;
    out.intensity_ratio = local.upper.height / local.lower.height;
    try {
        out.delta_Gamma = equal_linewidth_detuning(scanner, lo, hi);
    } catch (const AnalysisError& e) {
        out.delta_Gamma_note = e.what();
    }
    return out;
}

double absorption_fwhm(const Absorption& absorption, double unit, const AnalysisOptions& options) {
    const Mixture& m = absorption.broadened_pe();
    const double kappa_m = absorption.kappa_m();
    const double floor = 1e-6 * m.max_abs_amplitude();
    double cmin = 0.0, cmax = 0.0;
    for (const auto& a : m.atoms()) {
        if (std::abs(a.amplitude) < floor) continue;
        cmin = std::min(cmin, a.center);
        cmax = std::max(cmax, a.center);
    }
    const Evaluator f = [&absorption](double x) { return absorption.profile(x); };
    const double tol = resolve(options.peak_tolerance, 1e-6 * unit);
    const double step = std::min(kappa_m / 8.0, unit / 20.0);
    // Heavy-tailed profiles (overdamped modes) can put a crossing far out, so
    // the bracket is widened until both crossings are inside it.
    double pad = 10.0 * kappa_m + 10.0 * unit;
    for (int attempt = 0;; ++attempt, pad *= 4.0) {
        const UniformGrid grid = make_grid(cmin - pad, cmax + pad, step, options.max_scan_points);
        std::vector<double> xs(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) xs[i] = grid.x(i);
        std::vector<double> v = m.evaluate(xs);
        for (auto& y : v) y *= kPi;
        const auto peaks = peaks_from_samples(v, grid, f, tol);
        const auto top = std::max_element(
            peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height < b.height; });
        try {
            return fwhm_from_samples(v, grid, f, *top, tol);
        } catch (const BracketExhausted&) {
            if (attempt == 5) throw;
        }
    }
}

} // namespace polaritonix
