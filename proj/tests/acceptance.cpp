// acceptance.cpp - one PASS/FAIL line per acceptance criterion
//
// Usage: acceptance [--expect-blocked 1,2,...]
// Exit status is 0 when every criterion passes. With --expect-blocked the
// listed criteria may fail (their blocking analysis is documented with the
// project); any other failure still gives a nonzero status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "polaritonix/analysis.hpp"
#include "polaritonix/diagnostics.hpp"
#include "polaritonix/oracle.hpp"
#include "polaritonix/pe_theory.hpp"
#include "polaritonix/response.hpp"

using namespace polaritonix;

namespace {

struct Outcome {
    bool passed{false};
    std::string detail;
};

struct GridCase {
    double s, q, beta_omega;
    VibrationalMode mode() const { return VibrationalMode{1.0, s, q, 1}; }
    ThermalEnv env() const { return ThermalEnv{1.0 / beta_omega, 25.0}; }
    std::string label() const {
        std::ostringstream o;
        o << "(S=" << s << ",Q=" << q << ",bw=" << beta_omega << ")";
        return o.str();
    }
};

std::vector<GridCase> normalization_grid() {
    std::vector<GridCase> cases;
    for (double s : {0.5, 1.0, 4.0})
        for (double q : {0.3, 0.9, 4.0})
            for (double b : {0.5, 1.0, 4.0}) cases.push_back({s, q, b});
    return cases;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome normalization() {
    double worst_ok = 0.0;
    std::vector<std::string> failed;
    for (const auto& c : normalization_grid()) {
        const Mixture pe = total_pe(std::vector<VibrationalMode>{c.mode()}, c.env());
        const double err = std::abs(pe.integral() - 1.0);
        if (err <= 1e-10) worst_ok = std::max(worst_ok, err);
        else failed.push_back(c.label() + " err " + sci(err) + " cond " + sci(pe.condition_number()));
    }
    std::ostringstream d;
    d << (27 - failed.size()) << "/27 within 1e-10 (worst passing " << sci(worst_ok) << ")";
    for (const auto& f : failed) d << "; " << f;
    return {failed.empty(), d.str()};
}

Outcome oracle_equivalence() {
    double worst_ok = 0.0;
    std::vector<std::string> failed;
    for (const auto& c : normalization_grid()) {
        const VibrationalMode m = c.mode();
        const ThermalEnv env = c.env();
        const Mixture pe = total_pe(std::vector<VibrationalMode>{m}, env);
        // Rounding of the amplitudes alone moves the curve by about cond * eps
        // (relative); past the tolerance the comparison carries no information.
        if (pe.condition_number() * 1.1e-16 > 1e-2) {
            failed.push_back(c.label() + " not evaluated, cond " + sci(pe.condition_number()) +
                             " leaves no correct digit in double precision");
            continue;
        }
        const auto numeric = p_numeric(m, env, TimeGrid::for_modes(std::vector<VibrationalMode>{m}, env));
        const double l1 = relative_l1(periodized_mixture(pe, numeric), numeric.values);
        if (l1 < 1e-2) worst_ok = std::max(worst_ok, l1);
        else failed.push_back(c.label() + " L1 " + sci(l1) + " cond " + sci(pe.condition_number()));
    }
    std::ostringstream d;
    d << (27 - failed.size()) << "/27 below 1e-2 (worst passing " << sci(worst_ok) << ")";
    for (const auto& f : failed) d << "; " << f;
    return {failed.empty(), d.str()};
}

Outcome detailed_balance_check() {
    double worst = 0.0, sign_lo = 1e300, sign_hi = -1e300;
    const OracleOptions opts{CutoffScheme::Sharp,
                             Regularizer{Regularizer::Kind::DetailedBalanceGaussian, 0.0}};
    for (const auto& c : normalization_grid()) {
        const VibrationalMode m = c.mode();
        const ThermalEnv env = c.env();
        const auto p = p_numeric(m, env, TimeGrid::for_modes(std::vector<VibrationalMode>{m}, env), opts);
        const auto r = detailed_balance(p, env.beta());
        worst = std::max(worst, r.max_relative_error);
        sign_lo = std::min(sign_lo, r.fitted_sign);
        sign_hi = std::max(sign_hi, r.fitted_sign);
    }
    std::ostringstream d;
    d << "max relative error " << sci(worst) << " over 27 cases; ln(P(E)/P(-E)) = s beta E with s in ["
      << sign_lo << ", " << sign_hi << "] (convention: P(E)/P(-E) = exp(+beta E))";
    return {worst < 1e-2 && std::abs(sign_lo - 1.0) < 1e-2 && std::abs(sign_hi - 1.0) < 1e-2, d.str()};
}

Outcome closed_form_resonance() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> g_dist(1.0, 10.0), k_dist(0.05, 2.0);
    int accepted = 0, approx_checked = 0;
    double worst_exact = 0.0, worst_approx = 0.0;
    while (accepted < 20) {
        // Every other draw is taken from the strong-coupling regime g >= 10 max(kappa).
        const double g = g_dist(rng);
        const double kmax = accepted % 2 ? 0.1 * g : 2.0;
        const double kc = k_dist(rng) * kmax / 2.0, km = k_dist(rng) * kmax / 2.0;
        double offset = 0.0;
        try {
            offset = resonance_peak_offset(g, kc, km);
        } catch (const std::domain_error&) {
            continue;
        }
        const CavityParams cav{0.0, kc, g};
        const MoleculeParams mol{0.0, km, {VibrationalMode{1.0, 0.0, 4.0, 1}}};
        const ResponseModel model(cav, mol, ThermalEnv{1.0, 25.0});
        PolaritonPair pair;
        try {
            pair = TransmissionScanner(model, -1.0, 1.0).polaritons(0.0);
        } catch (const NoSplitting&) {
            continue;
        }
        ++accepted;
        worst_exact = std::max({worst_exact, std::abs(pair.upper.position - offset),
                                std::abs(pair.lower.position + offset)});
        if (g >= 10.0 * std::max(kc, km)) {
            ++approx_checked;
            const double approx = std::sqrt(g * g + 0.25 * kc * km);
            worst_approx = std::max(worst_approx, std::abs(pair.upper.position - approx) / approx);
        }
    }
    std::ostringstream d;
    d << "20 draws, max |omega_pm - closed form| = " << sci(worst_exact) << " omega_v; "
      << approx_checked << " draws with g >= 10 kappa, max relative deviation from sqrt(g^2 + kc km/4) "
      << sci(worst_approx);
    return {worst_exact < 1e-4 && approx_checked > 0 && worst_approx < 1e-2, d.str()};
}

struct Fig7Set {
    double q, s, kappa_tilde, beta_omega;
};
const Fig7Set kFig7[] = {{4.0, 4.0, 0.01, 1.0}, {0.3, 1.0, 0.01, 0.56}, {15.0, 0.51, 1.6, 1.0}};

double fig7_fwhm(const Fig7Set& set, double cutoff) {
    const MoleculeParams mol{0.0, set.kappa_tilde, {VibrationalMode{1.0, set.s, set.q, 1}}};
    return absorption_fwhm(absorption_mixture(mol, ThermalEnv{1.0 / set.beta_omega, cutoff}));
}

Outcome fig7() {
    std::vector<double> w;
    for (const auto& set : kFig7) w.push_back(fig7_fwhm(set, 25.0));
    bool ok = true;
    for (double x : w) ok = ok && std::abs(x - 9.1) <= 0.91;
    const double lo = *std::min_element(w.begin(), w.end()), hi = *std::max_element(w.begin(), w.end());
    ok = ok && (hi - lo) <= 0.1 * lo;
    std::ostringstream d;
    d << "FWHM " << w[0] << ", " << w[1] << ", " << w[2] << " omega_v (target 9.1 +- 10%, mutually within 10%)";
    return {ok, d.str()};
}

Outcome fig5() {
    const double ladder[] = {4.0, 2.0, 1.0, 0.5};
    bool ok = true;
    std::ostringstream d;
    for (double s : {0.5, 1.0}) {
        const CavityParams cav{0.0, 2.0, 7.0};
        const MoleculeParams mol{0.0, 0.01, {VibrationalMode{1.0, s, 4.0, 1}}};
        double previous = -1.0;
        d << "Q=4 S=" << s << ": R/delta_R =";
        for (double b : ladder) {
            const RabiResult r = rabi_splitting(cav, mol, ThermalEnv{1.0 / b, 25.0}, -14.0, 14.0);
            ok = ok && r.splitting > previous && std::abs(r.detuning) > 1e-3;
            previous = r.splitting;
            d << " " << sci(r.splitting) << "/" << sci(r.detuning);
        }
        d << "; ";
    }
    d << "bw = 4, 2, 1, 0.5";
    return {ok, d.str()};
}

Outcome fig6() {
    const CavityParams cav{0.0, 2.0, 10.0};
    const MoleculeParams mol{0.0, 0.06, {VibrationalMode{1.0, 2.0, 4.0, 1}}};
    const ResponseModel model(cav, mol, ThermalEnv{1.0, 25.0});
    const auto [lo, hi] = default_detuning_range(cav, mol);
    const TransmissionScanner scanner(model, lo, hi);
    const PolaritonPair at_zero = scanner.polaritons(0.0, true);
    const double delta_gamma = equal_linewidth_detuning(scanner, lo, hi);
    const RabiResult rabi = rabi_splitting(scanner, lo, hi);
    const double ratio = intensity_ratio(scanner, rabi.detuning);
    std::ostringstream d;
    d << "S=2: Gamma+ " << at_zero.linewidth_upper << " vs Gamma- " << at_zero.linewidth_lower
      << " at delta=0; delta_Gamma " << delta_gamma << "; ratio " << ratio << " at delta_R "
      << sci(rabi.detuning);
    return {at_zero.linewidth_upper > at_zero.linewidth_lower && delta_gamma > 0.0 && ratio < 1.0,
            d.str()};
}

Outcome convolution_table() {
    const Mixture f1 = Mixture::lorentzian(0.3, 0.5), f2 = Mixture::lorentzian(-1.0, 0.25);
    const Mixture g1 = Mixture::hilbert_lorentzian(0.3, 0.5), g2 = Mixture::hilbert_lorentzian(-1.0, 0.25);
    const double ff = convolution_rule_error(f1, f2), fg = convolution_rule_error(f1, g2),
                 gg = convolution_rule_error(g1, g2);
    std::ostringstream d;
    d << "relative L1: f*f " << sci(ff) << ", f*g " << sci(fg) << ", g*g " << sci(gg);
    return {ff < 1e-3 && fg < 1e-3 && gg < 1e-3, d.str()};
}

Outcome overdamped_identities() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> q_dist(0.01, 0.49), w_dist(0.1, 10.0);
    double worst_sum = 0.0, worst_product = 0.0;
    for (int i = 0; i < 100; ++i) {
        const VibrationalMode m{w_dist(rng), 1.0, q_dist(rng), 1};
        const RegimeInfo r = classify_regime(m);
        worst_sum = std::max(worst_sum, std::abs(r.rate_plus + r.rate_minus - m.gamma()) / m.gamma());
        const double w2 = m.omega_v * m.omega_v;
        worst_product = std::max(worst_product, std::abs(r.rate_plus * r.rate_minus - w2) / w2);
    }
    std::ostringstream d;
    d << "100 draws: max relative error " << sci(worst_sum) << " (sum), " << sci(worst_product)
      << " (product)";
    return {worst_sum <= 1e-12 && worst_product <= 1e-12, d.str()};
}

Outcome cutoff_robustness() {
    bool ok = true;
    std::ostringstream d;
    d << "FWHM at omega_L = 25 -> 50:";
    for (const auto& set : kFig7) {
        const double a = fig7_fwhm(set, 25.0), b = fig7_fwhm(set, 50.0);
        const double change = std::abs(b - a) / a;
        ok = ok && change < 0.02;
        d << " " << a << " -> " << b << " (" << sci(100.0 * change) << "%)";
    }
    return {ok, d.str()};
}

std::set<int> parse_list(const char* text) {
    std::set<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.insert(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> blocked;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--expect-blocked") blocked = parse_list(argv[i + 1]);
    // Ill-conditioned cases warn while they are evaluated; the lines below carry the numbers.
    set_warning_sink([](std::string_view) {});

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"normalization", normalization},
        {"oracle equivalence", oracle_equivalence},
        {"detailed balance", detailed_balance_check},
        {"closed-form resonance", closed_form_resonance},
        {"Fig. 7 absorption FWHM", fig7},
        {"Fig. 5 temperature trend", fig5},
        {"Fig. 6 asymmetry signs", fig6},
        {"convolution table", convolution_table},
        {"overdamped identities", overdamped_identities},
        {"cutoff robustness", cutoff_robustness}};

    int unexpected = 0;
    for (int i = 0; i < 10; ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const int number = i + 1;
        const bool expected = blocked.count(number) > 0;
        if (!o.passed && !expected) ++unexpected;
        std::printf("%s %2d %s: %s [%.1f s]%s\n", o.passed ? "PASS" : "FAIL", number, criteria[i].first,
                    o.detail.c_str(), secs, !o.passed && expected ? " (known blocker)" : "");
        std::fflush(stdout);
    }
    return unexpected == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
