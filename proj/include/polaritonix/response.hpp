// response.hpp - absorption function, cavity response and the coupled-oscillator baseline

#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "polaritonix/lineshape.hpp"
#include "polaritonix/pe_theory.hpp"

namespace polaritonix {

struct CavityParams {
    double omega_c{0.0};
    double kappa_c{1.0};  // > 0
    double g_N{0.0};      // collective coupling >= 0
    void validate() const;
};

struct MoleculeParams {
    double omega_m{0.0};
    double kappa_tilde{0.0};  // electronic dissipation >= 0
    std::vector<VibrationalMode> modes;

    // Sum_i M_i S_i omega_v,i, the argument shift of A in the response function.
    double polaron_shift() const;
    // Largest omega_v, or 1 when there are no modes (the natural frequency unit).
    double frequency_unit() const;
    void validate() const;
};

class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// kappa~ + Sum_i M_i S_i omega_v,i / Q_i; throws ConfigurationError if <= 0.
double effective_kappa_m(const MoleculeParams& mol);

// A(w) = P * chi with chi(w) = 1/(i w - kappa_m/2). Every atom of P picks up the
// half-width kappa_m/2, so A(w) = -pi * (analytic signal of the broadened P).
class Absorption {
public:
    Absorption(Mixture pe, double kappa_m);

    cplx operator()(double omega) const { return -kPi * broadened_.analytic_signal(omega); }
    double profile(double omega) const { return -(*this)(omega).real(); }  // Re(-A) = pi P_kappa

    const Mixture& broadened_pe() const noexcept { return broadened_; }
    double kappa_m() const noexcept { return kappa_m_; }

private:
    Mixture broadened_;
    double kappa_m_;
};

Absorption absorption_mixture(const MoleculeParams& mol, const ThermalEnv& env,
                              const SeriesOptions& options = {});

// Cavity response r(w_d) for fixed molecule and environment. The absorption
// mixture is shared, so changing the cavity frequency is cheap.
class ResponseModel {
public:
    ResponseModel(CavityParams cavity, MoleculeParams molecule, ThermalEnv env,
                  const SeriesOptions& options = {});

    // [i(w_d - w_c) - kappa_c/2 + g_N^2 A(w_d - w_m + shift)]^{-1}
    cplx response(double omega_d) const;
    double transmission(double omega_d) const { return std::norm(response(omega_d)); }
    // A at the shifted argument used inside response().
    cplx absorption_at(double omega_d) const;

    ResponseModel with_cavity_frequency(double omega_c) const;
    ResponseModel with_detuning(double detuning) const {
        return with_cavity_frequency(molecule_.omega_m + detuning);
    }

    const CavityParams& cavity() const noexcept { return cavity_; }
    const MoleculeParams& molecule() const noexcept { return molecule_; }
    const ThermalEnv& environment() const noexcept { return env_; }
    const Absorption& absorption() const noexcept { return *absorption_; }
    double detuning() const noexcept { return cavity_.omega_c - molecule_.omega_m; }
    double frequency_unit() const { return molecule_.frequency_unit(); }

private:
    ResponseModel(CavityParams cavity, MoleculeParams molecule, ThermalEnv env,
                  std::shared_ptr<const Absorption> absorption);

    CavityParams cavity_;
    MoleculeParams molecule_;
    ThermalEnv env_;
    std::shared_ptr<const Absorption> absorption_;
    double shift_{0.0};
};

cplx response_function(const CavityParams& cav, const MoleculeParams& mol, const ThermalEnv& env,
                       double omega_d);

struct Spectrum {
    std::vector<double> grid;
    std::vector<double> values;
};

// Uniform grid of n points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// Centered at omega_m, half-span max(40 omega_v, 5 g_N, 10 kappa_m), 2^15 points.
std::vector<double> default_grid(const CavityParams& cav, const MoleculeParams& mol,
                                 std::size_t points = 32768, double half_span = 0.0);

// |r(w_d)|^2 on the grid (parallel). Warns when the spacing exceeds both kappa_c/4 and kappa_m/4.
Spectrum elastic_spectrum(const ResponseModel& model, std::span<const double> grid);
Spectrum elastic_spectrum(const CavityParams& cav, const MoleculeParams& mol,
                          const ThermalEnv& env, std::span<const double> grid);

struct CoupledOscillatorResult {
    double omega_plus{0.0};   // (w_c + w_m)/2 + sqrt(g^2 + delta^2/4)
    double omega_minus{0.0};
    cplx resonance_plus{};    // w_m - i(kappa_c + kappa_m)/2 + sqrt(g^2 - (kappa_c - kappa_m)^2/4)
    cplx resonance_minus{};
    Spectrum spectrum;        // |r|^2 with a Lorentzian molecule, empty when no grid given
};

// Molecule frequency omega_m, molecular linewidth kappa_m, cavity detuning taken
// from cav.omega_c - omega_m.
CoupledOscillatorResult coupled_oscillator_reference(const CavityParams& cav, double omega_m,
                                                     double kappa_m,
                                                     std::span<const double> grid = {});

// r(w_d) of the coupled-oscillator model.
cplx coupled_oscillator_response(const CavityParams& cav, double omega_m, double kappa_m,
                                 double omega_d);

// Offset of the two transmission maxima from omega_m at resonance:
// sqrt(g^2 sqrt(1 + kappa_m(kappa_m + kappa_c)/(2 g^2)) - kappa_m^2/4).
double resonance_peak_offset(double g, double kappa_c, double kappa_m);

// omega_c = (pi c / L) / sqrt(1 - sin^2(alpha)/n_eff^2), alpha in radians.
double cavity_frequency_from_geometry(double length, double alpha, double n_eff,
                                      double speed_of_light = 1.0);

} // namespace polaritonix
