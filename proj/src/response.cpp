// response.cpp - absorption, cavity response, spectra and the baseline model

#include "polaritonix/response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polaritonix/diagnostics.hpp"

namespace polaritonix {

void CavityParams::validate() const {
    if (!(kappa_c > 0.0)) throw ConfigurationError("cavity: kappa_c must be > 0");
    if (!(g_N >= 0.0)) throw ConfigurationError("cavity: g_N must be >= 0");
    if (!std::isfinite(omega_c)) throw ConfigurationError("cavity: omega_c must be finite");
}

double MoleculeParams::polaron_shift() const {
    double shift = 0.0;
    for (const auto& m : modes) shift += m.effective_huang_rhys() * m.omega_v;
    return shift;
}

double MoleculeParams::frequency_unit() const {
    double w = 0.0;
    for (const auto& m : modes) w = std::max(w, m.omega_v);
    return w > 0.0 ? w : 1.0;
}

void MoleculeParams::validate() const {
    if (!std::isfinite(omega_m)) throw ConfigurationError("molecule: omega_m must be finite");
    if (!(kappa_tilde >= 0.0)) throw ConfigurationError("molecule: kappa_tilde must be >= 0");
    for (const auto& m : modes) {
        try {
            m.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigurationError(e.what());
        }
    }
}

double effective_kappa_m(const MoleculeParams& mol) {
    double k = mol.kappa_tilde;
    for (const auto& m : mol.modes) k += m.effective_huang_rhys() * m.gamma();
    if (!(k > 0.0))
        throw ConfigurationError("effective kappa_m must be > 0 (no dissipation channel)");
    return k;
}

Absorption::Absorption(Mixture pe, double kappa_m)
    : broadened_(pe.broadened(0.5 * kappa_m)), kappa_m_(kappa_m) {
    if (!(kappa_m > 0.0)) throw ConfigurationError("Absorption: kappa_m must be > 0");
}

Absorption absorption_mixture(const MoleculeParams& mol, const ThermalEnv& env,
                              const SeriesOptions& options) {
    mol.validate();
    const double kappa_m = effective_kappa_m(mol);
    return Absorption(total_pe(mol.modes, env, options), kappa_m);
}

ResponseModel::ResponseModel(CavityParams cavity, MoleculeParams molecule, ThermalEnv env,
                             const SeriesOptions& options)
    : cavity_(cavity), molecule_(std::move(molecule)), env_(env) {
    cavity_.validate();
    absorption_ = std::make_shared<const Absorption>(absorption_mixture(molecule_, env_, options));
    shift_ = molecule_.polaron_shift();
}

ResponseModel::ResponseModel(CavityParams cavity, MoleculeParams molecule, ThermalEnv env,
                             std::shared_ptr<const Absorption> absorption)
    : cavity_(cavity),
      molecule_(std::move(molecule)),
      env_(env),
      absorption_(std::move(absorption)),
      shift_(molecule_.polaron_shift()) {}

cplx ResponseModel::absorption_at(double omega_d) const {
    return (*absorption_)(omega_d - molecule_.omega_m + shift_);
}

cplx ResponseModel::response(double omega_d) const {
    const cplx den = cplx(-0.5 * cavity_.kappa_c, omega_d - cavity_.omega_c) +
                     cavity_.g_N * cavity_.g_N * absorption_at(omega_d);
    return 1.0 / den;
}

ResponseModel ResponseModel::with_cavity_frequency(double omega_c) const {
    CavityParams cav = cavity_;
    cav.omega_c = omega_c;
    return ResponseModel(cav, molecule_, env_, absorption_);
}

cplx response_function(const CavityParams& cav, const MoleculeParams& mol, const ThermalEnv& env,
                       double omega_d) {
    return ResponseModel(cav, mol, env).response(omega_d);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("uniform_grid: need n >= 2 and hi > lo");
    std::vector<double> g(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
}

std::vector<double> default_grid(const CavityParams& cav, const MoleculeParams& mol,
                                 std::size_t points, double half_span) {
    if (!(half_span > 0.0)) {
        const double kappa_m = effective_kappa_m(mol);
        half_span = std::max({40.0 * mol.frequency_unit(), 5.0 * cav.g_N, 10.0 * kappa_m});
    }
    return uniform_grid(mol.omega_m - half_span, mol.omega_m + half_span, points);
}

Spectrum elastic_spectrum(const ResponseModel& model, std::span<const double> grid) {
    if (grid.size() >= 2) {
        const double step = grid[1] - grid[0];
        const double kc = model.cavity().kappa_c, km = model.absorption().kappa_m();
        if (step > 0.25 * kc && step > 0.25 * km) {
            std::ostringstream msg;
            msg << "grid spacing " << step << " exceeds kappa_c/4 = " << 0.25 * kc
                << " and kappa_m/4 = " << 0.25 * km;
            warn(msg.str());
        }
    }
    Spectrum s{std::vector<double>(grid.begin(), grid.end()), std::vector<double>(grid.size())};
    constexpr std::size_t chunk = 128;
    parallel_for((grid.size() + chunk - 1) / chunk, [&](std::size_t b) {
        const std::size_t end = std::min(grid.size(), (b + 1) * chunk);
        for (std::size_t i = b * chunk; i < end; ++i) s.values[i] = model.transmission(grid[i]);
    });
    return s;
}

Spectrum elastic_spectrum(const CavityParams& cav, const MoleculeParams& mol,
                          const ThermalEnv& env, std::span<const double> grid) {
    return elastic_spectrum(ResponseModel(cav, mol, env), grid);
}

cplx coupled_oscillator_response(const CavityParams& cav, double omega_m, double kappa_m,
                                 double omega_d) {
    const cplx chi = 1.0 / cplx(-0.5 * kappa_m, omega_d - omega_m);
    const cplx den = cplx(-0.5 * cav.kappa_c, omega_d - cav.omega_c) + cav.g_N * cav.g_N * chi;
    return 1.0 / den;
}

CoupledOscillatorResult coupled_oscillator_reference(const CavityParams& cav, double omega_m,
                                                     double kappa_m,
                                                     std::span<const double> grid) {
    CoupledOscillatorResult r;
    const double delta = cav.omega_c - omega_m;
    const double root = std::sqrt(cav.g_N * cav.g_N + 0.25 * delta * delta);
    r.omega_plus = 0.5 * (cav.omega_c + omega_m) + root;
    r.omega_minus = 0.5 * (cav.omega_c + omega_m) - root;
    const double dk = cav.kappa_c - kappa_m;
    const cplx split = std::sqrt(cplx(cav.g_N * cav.g_N - 0.25 * dk * dk, 0.0));
    const cplx center(omega_m, -0.5 * (cav.kappa_c + kappa_m));
    r.resonance_plus = center + split;
    r.resonance_minus = center - split;
    r.spectrum.grid.assign(grid.begin(), grid.end());
    r.spectrum.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        r.spectrum.values[i] = std::norm(coupled_oscillator_response(cav, omega_m, kappa_m, grid[i]));
    return r;
}

double resonance_peak_offset(double g, double kappa_c, double kappa_m) {
    const double g2 = g * g;
    const double inner = g2 * std::sqrt(1.0 + kappa_m * (kappa_m + kappa_c) / (2.0 * g2)) -
                         0.25 * kappa_m * kappa_m;
    if (!(inner > 0.0)) throw std::domain_error("resonance_peak_offset: peaks not split");
    return std::sqrt(inner);
}

double cavity_frequency_from_geometry(double length, double alpha, double n_eff,
                                      double speed_of_light) {
    if (!(length > 0.0)) throw std::domain_error("cavity geometry: L must be > 0");
    if (!(n_eff > 0.0)) throw std::domain_error("cavity geometry: n_eff must be > 0");
    const double s = std::sin(alpha);
    if (!(std::abs(s) < n_eff))
        throw std::domain_error("cavity geometry: |sin(alpha)| must be below n_eff");
    return (kPi * speed_of_light / length) / std::sqrt(1.0 - s * s / (n_eff * n_eff));
}

} // namespace polaritonix
