// lineshape.hpp - exact algebra of Lorentzian mixtures (f_L / g_L atoms)
//
// An atom (alpha, c, Gamma) stands for Re(alpha) f_L(w; c, Gamma) + Im(alpha) g_L(w; c, Gamma)
// with f_L the normalized Lorentzian and g_L its Hilbert transform. With this
// encoding the convolution table f*f = f, f*g = g, g*g = -f is complex
// multiplication of amplitudes while centers and half-widths add.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace polaritonix {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// (1/pi) Gamma / ((w - c)^2 + Gamma^2); throws std::domain_error for Gamma <= 0.
double eval_f(double omega, double center, double half_width);

// (1/pi) (w - c) / ((w - c)^2 + Gamma^2); throws std::domain_error for Gamma <= 0.
double eval_g(double omega, double center, double half_width);

struct PoleAtom {
    cplx amplitude{1.0, 0.0};
    double center{0.0};
    double half_width{0.0};  // 0 marks a Dirac delta (f part) placeholder
};

struct CompactionOptions {
    double prune_floor{1e-14};      // relative to the largest |amplitude|
    double merge_tolerance{1e-12};  // relative equality of (center, half_width)
};

class Mixture {
public:
    Mixture() = default;
    explicit Mixture(std::vector<PoleAtom> atoms);

    static Mixture delta(double center = 0.0, cplx weight = 1.0);
    static Mixture lorentzian(double center, double half_width, double weight = 1.0);   // f_L
    static Mixture hilbert_lorentzian(double center, double half_width, double weight = 1.0);  // g_L

    std::span<const PoleAtom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    bool has_deltas() const noexcept;

    // Sum of complex amplitudes (compensated summation). Its real part is the
    // integral of the mixture because g_L integrates to zero.
    cplx total_amplitude() const;
    double integral() const { return total_amplitude().real(); }
    double max_abs_amplitude() const;
    // Sum |alpha_j| / |Sum alpha_j|: the factor by which rounding of the
    // amplitudes is amplified in the integral and in pointwise values.
    double condition_number() const;

    // Pointwise value; throws std::domain_error if any atom is a delta.
    double operator()(double omega) const;
    std::vector<double> evaluate(std::span<const double> omegas) const;

    // Sum_j conj(alpha_j) (f_j + i g_j)(w) = (1/pi) Sum_j conj(alpha_j) / (Gamma_j - i (w - c_j)).
    // For a real density M this is M(w) + i H[M](w) with H the Hilbert transform.
    cplx analytic_signal(double omega) const;

    // Convolution with f_L(0, extra): every half-width grows by extra.
    Mixture broadened(double extra_half_width) const;
    Mixture scaled(cplx factor) const;

    // Merge atoms sharing (center, half_width) and drop negligible ones.
    Mixture compacted(const CompactionOptions& options = {}) const;

private:
    std::vector<PoleAtom> atoms_;
};

// All pairwise products (alpha_i alpha_j, c_i + c_j, Gamma_i + Gamma_j), then compacted.
Mixture convolve(const Mixture& a, const Mixture& b, const CompactionOptions& options = {});

} // namespace polaritonix
