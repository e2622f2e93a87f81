// test_pe_theory.cpp - damping regimes, residues, series truncation and closed-form P(E)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "polaritonix/diagnostics.hpp"
#include "polaritonix/oracle.hpp"
#include "polaritonix/pe_theory.hpp"

using namespace polaritonix;

namespace {

// J~(t) rebuilt from the residue coefficients, t >= 0.
cplx closed_form_j(const VibrationalMode& m, const ThermalEnv& env, double t) {
    const auto rc = residue_coefficients(m, env);
    cplx j;
    if (rc.regime == DampingRegime::Underdamped) {
        const double w = rc.renormalized_frequency, h = 0.5 * m.gamma();
        j = rc.d_plus * (std::exp(cplx(-h * t, -w * t)) - 1.0) +
            rc.d_minus * (std::exp(cplx(-h * t, w * t)) - 1.0);
    } else {
        j = rc.d_plus * (std::exp(-rc.rate_plus * t) - 1.0) +
            rc.d_minus * (std::exp(-rc.rate_minus * t) - 1.0);
    }
    for (const auto& k : matsubara_coefficients(m, env)) j += k.weight * (std::exp(-k.frequency * t) - 1.0);
    return j;
}

struct SilenceWarnings {
    std::vector<std::string> seen;
    WarningSink previous;
    SilenceWarnings() {
        previous = set_warning_sink([this](std::string_view m) { seen.emplace_back(m); });
    }
    ~SilenceWarnings() { set_warning_sink(previous); }
};

} // namespace

TEST_CASE("regime classification") {
    const auto under = classify_regime(VibrationalMode{2.0, 1.0, 4.0, 1});
    CHECK(under.regime == DampingRegime::Underdamped);
    CHECK(under.renormalized_frequency == doctest::Approx(2.0 * std::sqrt(1.0 - 1.0 / 64.0)));
    CHECK(under.rate_plus == doctest::Approx(0.25));

    const VibrationalMode od{1.5, 1.0, 0.2, 1};
    const auto over = classify_regime(od);
    CHECK(over.regime == DampingRegime::Overdamped);
    CHECK(over.rate_plus + over.rate_minus == doctest::Approx(od.gamma()).epsilon(1e-14));
    CHECK(over.rate_plus * over.rate_minus == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(over.rate_plus > over.rate_minus);

    CHECK_THROWS_AS(classify_regime(VibrationalMode{1.0, 1.0, 0.5, 1}), CriticalDampingError);
    CHECK_THROWS_AS(classify_regime(VibrationalMode{1.0, -1.0, 4.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(VibrationalMode{0.0, 1.0, 4.0, 1}), std::invalid_argument);
}

TEST_CASE("Matsubara frequencies and count") {
    const ThermalEnv env{1.0, 25.0};
    CHECK(env.k_max() == 3);
    CHECK(env.matsubara_frequency(2) == doctest::Approx(4.0 * kPi));
    const VibrationalMode m{1.0, 1.0, 4.0, 1};
    const auto terms = matsubara_coefficients(m, env);
    REQUIRE(terms.size() == 3);
    const double gamma = m.gamma();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double wk = env.matsubara_frequency(static_cast<int>(i) + 1);
        const double expected = 4.0 * 1.0 * 1.0 / 4.0 * wk * wk * wk /
                                (std::pow(wk * wk + 1.0, 2) - gamma * gamma * wk * wk);
        CHECK(terms[i].frequency == doctest::Approx(wk));
        CHECK(terms[i].weight == doctest::Approx(expected));
    }
    CHECK(ThermalEnv::with_default_cutoff(1.0, std::vector<VibrationalMode>{m, {2.0, 1.0, 4.0, 1}}).cutoff ==
          50.0);
}

TEST_CASE("residue reconstruction matches the J integral") {
    // Underdamped, overdamped, and several temperatures.
    for (double q : {0.3, 0.9, 4.0}) {
        for (double t_env : {0.25, 1.0, 2.0}) {
            const VibrationalMode m{1.0, 1.0, q, 1};
            const ThermalEnv env{t_env, 25.0};
            for (double t : {0.3, 1.0, 3.7}) {
                const cplx closed = closed_form_j(m, env, t);
                const cplx numeric = j_numeric(m, env, t);
                CHECK(std::abs(closed - numeric) <= 1e-6 * std::abs(numeric));
            }
        }
    }
}

TEST_CASE("overdamped residues against contour integration of the spectral function") {
    // Residue of the J integrand at w = -i Gamma_pm: (S/2Q) (cot(Gamma/2T) - i)(1 +- (1-2Q^2)/sqrt(1-4Q^2)).
    const VibrationalMode m{1.0, 0.7, 0.3, 1};
    const ThermalEnv env{0.8, 25.0};
    const auto rc = residue_coefficients(m, env);
    for (int sign : {+1, -1}) {
        const double rate = sign > 0 ? rc.rate_plus : rc.rate_minus;
        const cplx d = sign > 0 ? rc.d_plus : rc.d_minus;
        // J~(t) = Int G(w)(e^{-iwt} - 1) dw closed in the lower half plane picks
        // -2 pi i Res[G, -i rate] per pole; the coefficient of e^{-rate t} is that residue.
        const cplx res = numeric_residue([&](cplx w) { return spectral_function(m, env, w); },
                                         cplx(0.0, -rate), 1e-3);
        CHECK(std::abs(-2.0 * kPi * cplx(0.0, 1.0) * res - d) < 1e-8 * std::abs(d));
    }
}

TEST_CASE("series truncation bound") {
    SeriesOptions opt;
    const cplx z(2.0, 1.0);
    const int n = series_terms(z, opt);
    // exp(-a) |z|^{n+1}/(n+1)! exp(|z|) bounds the dropped terms.
    auto bound = [&](int k) {
        const double r = std::abs(z);
        return std::exp(-z.real() + (k + 1) * std::log(r) - std::lgamma(k + 2.0) + r);
    };
    CHECK(bound(n) < opt.tolerance);
    CHECK(bound(n - 1) >= opt.tolerance);
    CHECK(series_terms(cplx(0.0, 0.0), opt) == 0);
    SilenceWarnings quiet;
    opt.max_terms = 3;
    CHECK(series_terms(cplx(50.0, 0.0), opt) == 3);
    CHECK_FALSE(quiet.seen.empty());
}

TEST_CASE("exp correlator transform sums to exp(-a + ib + z*)") {
    const double a = 0.8, b = -0.3, w0 = 1.2, gam = 0.1;
    const int n = series_terms(cplx(a, b));
    const Mixture m = exp_correlator_transform(a, b, w0, gam, n);
    const cplx expected = std::exp(cplx(-a, b) + std::conj(cplx(a, b)));
    CHECK(std::abs(m.total_amplitude() - expected) < 1e-12);
    for (const auto& atom : m.atoms()) {
        const double k = std::round(-atom.center / w0);
        CHECK(atom.center == doctest::Approx(-k * w0));
        CHECK(atom.half_width == doctest::Approx(k * gam));
    }
}

TEST_CASE("Matsubara factor against the incomplete-Gamma integral") {
    const MatsubaraTerm term{2.0 * kPi, 0.4};
    const Mixture m = matsubara_expansion(std::vector<MatsubaraTerm>{term});
    Mixture regular;
    std::vector<PoleAtom> atoms;
    double delta_weight = 0.0;
    for (const auto& a : m.atoms()) {
        if (a.half_width == 0.0) delta_weight += a.amplitude.real();
        else atoms.push_back(a);
    }
    regular = Mixture(atoms);
    CHECK(delta_weight == doctest::Approx(std::exp(-0.4)));
    for (double e : {0.0, 1.0, 5.0, 20.0}) {
        CHECK(regular(e) == doctest::Approx(matsubara_factor_numeric(term.weight, term.frequency, e))
                                .epsilon(1e-8));
    }
}

TEST_CASE("total_pe is normalized in well-conditioned regimes") {
    for (double q : {0.9, 4.0})
        for (double s : {0.5, 1.0, 4.0})
            for (double b : {0.5, 1.0, 4.0}) {
                const std::vector<VibrationalMode> m{{1.0, s, q, 1}};
                const Mixture pe = total_pe(m, ThermalEnv{1.0 / b, 25.0});
                CHECK(std::abs(pe.integral() - 1.0) < 1e-10);
            }
}

TEST_CASE("ill-conditioned corner is reported") {
    SilenceWarnings quiet;
    const std::vector<VibrationalMode> m{{1.0, 1.0, 0.3, 1}};
    const Mixture pe = total_pe(m, ThermalEnv{0.25, 25.0});
    CHECK(pe.condition_number() > 1e9);
    CHECK_FALSE(quiet.seen.empty());
}

TEST_CASE("S = 0 gives a delta at zero") {
    const std::vector<VibrationalMode> m{{1.0, 0.0, 4.0, 1}};
    const Mixture pe = total_pe(m, ThermalEnv{1.0, 25.0});
    REQUIRE(pe.size() == 1);
    CHECK(pe.atoms()[0].half_width == 0.0);
    CHECK(pe.atoms()[0].center == 0.0);
    CHECK(pe.integral() == doctest::Approx(1.0));
}

TEST_CASE("multiplicity M acts as S -> M S") {
    const ThermalEnv env{1.0, 25.0};
    const Mixture a = total_pe(std::vector<VibrationalMode>{{1.0, 0.5, 4.0, 2}}, env);
    const Mixture b = total_pe(std::vector<VibrationalMode>{{1.0, 1.0, 4.0, 1}}, env);
    for (double e : {-2.0, 0.0, 0.9, 1.0, 3.0}) CHECK(a.broadened(0.05)(e) == doctest::Approx(b.broadened(0.05)(e)));
}

TEST_CASE("two identical modes equal one mode of doubled S") {
    const ThermalEnv env{0.7, 25.0};
    const Mixture two = total_pe(std::vector<VibrationalMode>{{1.0, 0.5, 4.0, 1}, {1.0, 0.5, 4.0, 1}}, env);
    const Mixture one = total_pe(std::vector<VibrationalMode>{{1.0, 1.0, 4.0, 1}}, env);
    for (double e : {-1.0, 0.0, 1.0, 2.0}) CHECK(two.broadened(0.05)(e) == doctest::Approx(one.broadened(0.05)(e)));
}

TEST_CASE("Poisson limit: high Q, low temperature") {
    const std::vector<VibrationalMode> m{{1.0, 1.0, 1000.0, 1}};
    const Mixture pe = total_pe(m, ThermalEnv{1.0 / 50.0, 25.0});
    double factorial = 1.0;
    const double wt = classify_regime(m[0]).renormalized_frequency;
    for (int n = 0; n <= 4; ++n) {
        if (n > 0) factorial *= n;
        double weight = 0.0;
        for (const auto& a : pe.atoms())
            if (std::abs(a.center - n * wt) < 0.05) weight += a.amplitude.real();
        CHECK(weight == doctest::Approx(std::exp(-1.0) / factorial).epsilon(2e-2));
    }
}

TEST_CASE("pole coincidence is perturbed with a warning") {
    // Overdamped Q = 0.3: Gamma_- = 1/3 and Gamma_+ = 3. The first temperature puts
    // Gamma_- on omega_1 (and Gamma_+ on omega_9), the second puts Gamma_+ on omega_3.
    const VibrationalMode m{1.0, 1.0, 0.3, 1};
    for (double t_env : {1.0 / (6.0 * kPi), 1.0 / (2.0 * kPi)}) {
        const ThermalEnv env{t_env, 25.0};
        SilenceWarnings quiet;
        const VibrationalMode r = resolve_pole_coincidence(m, env);
        CHECK(r.quality != m.quality);
        CHECK(std::abs(r.quality - m.quality) < 1e-8 * m.quality);
        CHECK_FALSE(quiet.seen.empty());
        // The residue and Matsubara coefficients each grow like 1/1e-9 but cancel in J(t).
        for (double t : {0.5, 2.0}) {
            const cplx numeric = j_numeric(m, env, t);
            CHECK(std::abs(closed_form_j(m, env, t) - numeric) < 1e-5 * std::abs(numeric));
        }
    }
}
