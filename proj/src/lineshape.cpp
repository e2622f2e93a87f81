// lineshape.cpp - Lorentzian mixture evaluation, convolution and compaction

#include "polaritonix/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polaritonix/diagnostics.hpp"

namespace polaritonix {

namespace {

void require_positive_width(double half_width, const char* who) {
    if (!(half_width > 0.0))
        throw std::domain_error(std::string(who) + ": half_width must be positive");
}

// Neumaier summation, one accumulator per component.
struct CompensatedSum {
    double sum{0.0};
    double carry{0.0};
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

bool nearly_equal(double x, double y, double scale, double tol) {
    return std::abs(x - y) <= tol * scale;
}

} // namespace

double eval_f(double omega, double center, double half_width) {
    require_positive_width(half_width, "eval_f");
    const double d = omega - center;
    return half_width / (kPi * (d * d + half_width * half_width));
}

double eval_g(double omega, double center, double half_width) {
    require_positive_width(half_width, "eval_g");
    const double d = omega - center;
    return d / (kPi * (d * d + half_width * half_width));
}

Mixture::Mixture(std::vector<PoleAtom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_)
        if (!(a.half_width >= 0.0))
            throw std::domain_error("Mixture: negative half_width");
}

Mixture Mixture::delta(double center, cplx weight) {
    return Mixture({PoleAtom{weight, center, 0.0}});
}

Mixture Mixture::lorentzian(double center, double half_width, double weight) {
    require_positive_width(half_width, "Mixture::lorentzian");
    return Mixture({PoleAtom{cplx(weight, 0.0), center, half_width}});
}

Mixture Mixture::hilbert_lorentzian(double center, double half_width, double weight) {
    require_positive_width(half_width, "Mixture::hilbert_lorentzian");
    return Mixture({PoleAtom{cplx(0.0, weight), center, half_width}});
}

bool Mixture::has_deltas() const noexcept {
    return std::any_of(atoms_.begin(), atoms_.end(),
                       [](const PoleAtom& a) { return a.half_width == 0.0; });
}

cplx Mixture::total_amplitude() const {
    CompensatedSum re, im;
    for (const auto& a : atoms_) {
        re.add(a.amplitude.real());
        im.add(a.amplitude.imag());
    }
    return {re.value(), im.value()};
}

double Mixture::max_abs_amplitude() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, std::abs(a.amplitude));
    return m;
}

double Mixture::condition_number() const {
    double sum_abs = 0.0;
    for (const auto& a : atoms_) sum_abs += std::abs(a.amplitude);
    const double total = std::abs(total_amplitude());
    return total > 0.0 ? sum_abs / total : std::numeric_limits<double>::infinity();
}

double Mixture::operator()(double omega) const {
    double acc = 0.0;
    for (const auto& a : atoms_) {
        if (a.half_width == 0.0)
            throw std::domain_error("Mixture: cannot evaluate a delta atom pointwise");
        const double d = omega - a.center;
        acc += (a.amplitude.real() * a.half_width + a.amplitude.imag() * d) /
               (d * d + a.half_width * a.half_width);
    }
    return acc / kPi;
}

std::vector<double> Mixture::evaluate(std::span<const double> omegas) const {
    if (has_deltas())
        throw std::domain_error("Mixture: cannot evaluate a delta atom pointwise");
    std::vector<double> out(omegas.size());
    constexpr std::size_t chunk = 256;
    const std::size_t blocks = (omegas.size() + chunk - 1) / chunk;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t end = std::min(omegas.size(), (b + 1) * chunk);
        for (std::size_t i = b * chunk; i < end; ++i) out[i] = (*this)(omegas[i]);
    });
    return out;
}

cplx Mixture::analytic_signal(double omega) const {
    double re = 0.0, im = 0.0;
    for (const auto& a : atoms_) {
        if (a.half_width == 0.0)
            throw std::domain_error("Mixture: cannot evaluate a delta atom pointwise");
        // conj(alpha) / (Gamma - i d) = conj(alpha) (Gamma + i d) / (Gamma^2 + d^2)
        const double d = omega - a.center;
        const double inv = 1.0 / (d * d + a.half_width * a.half_width);
        const double ar = a.amplitude.real(), ai = -a.amplitude.imag();
        re += (ar * a.half_width - ai * d) * inv;
        im += (ar * d + ai * a.half_width) * inv;
    }
    return cplx(re, im) / kPi;
}

Mixture Mixture::broadened(double extra_half_width) const {
    if (!(extra_half_width >= 0.0))
        throw std::domain_error("Mixture::broadened: negative width");
    std::vector<PoleAtom> out(atoms_);
    for (auto& a : out) a.half_width += extra_half_width;
    return Mixture(std::move(out));
}

Mixture Mixture::scaled(cplx factor) const {
    std::vector<PoleAtom> out(atoms_);
    for (auto& a : out) a.amplitude *= factor;
    return Mixture(std::move(out));
}

Mixture Mixture::compacted(const CompactionOptions& options) const {
    if (atoms_.empty()) return {};
    std::vector<PoleAtom> sorted(atoms_);
    std::sort(sorted.begin(), sorted.end(), [](const PoleAtom& x, const PoleAtom& y) {
        return x.center < y.center;
    });

    // Group by center (within tolerance), then merge equal widths inside each
    // group. Sorting twice keeps this O(n log n) even when every atom sits at
    // the same center, as for Matsubara factors.
    const double tol = options.merge_tolerance;
    std::vector<PoleAtom> merged;
    merged.reserve(sorted.size());
    std::size_t first = 0;
    while (first < sorted.size()) {
        std::size_t last = first + 1;
        const double c0 = sorted[first].center;
        while (last < sorted.size() &&
               nearly_equal(sorted[last].center, c0,
                            std::max({std::abs(c0), std::abs(sorted[last].center),
                                      sorted[last].half_width, sorted[first].half_width}),
                            tol))
            ++last;
        std::sort(sorted.begin() + first, sorted.begin() + last,
                  [](const PoleAtom& x, const PoleAtom& y) { return x.half_width < y.half_width; });
        std::size_t i = first;
        while (i < last) {
            PoleAtom acc = sorted[i];
            CompensatedSum re, im;
            re.add(acc.amplitude.real());
            im.add(acc.amplitude.imag());
            std::size_t j = i + 1;
            while (j < last &&
                   nearly_equal(sorted[j].half_width, acc.half_width,
                                std::max({std::abs(acc.center), acc.half_width,
                                          sorted[j].half_width}),
                                tol)) {
                re.add(sorted[j].amplitude.real());
                im.add(sorted[j].amplitude.imag());
                ++j;
            }
            acc.amplitude = cplx(re.value(), im.value());
            merged.push_back(acc);
            i = j;
        }
        first = last;
    }

    double largest = 0.0;
    for (const auto& a : merged) largest = std::max(largest, std::abs(a.amplitude));
    const double floor = options.prune_floor * largest;
    std::vector<PoleAtom> kept;
    kept.reserve(merged.size());
    for (const auto& a : merged)
        if (std::abs(a.amplitude) >= floor && a.amplitude != cplx(0.0, 0.0)) kept.push_back(a);
    return Mixture(std::move(kept));
}

Mixture convolve(const Mixture& a, const Mixture& b, const CompactionOptions& options) {
    std::vector<PoleAtom> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.atoms())
        for (const auto& y : b.atoms())
            out.push_back(PoleAtom{x.amplitude * y.amplitude, x.center + y.center,
                                   x.half_width + y.half_width});
    return Mixture(std::move(out)).compacted(options);
}

} // namespace polaritonix
