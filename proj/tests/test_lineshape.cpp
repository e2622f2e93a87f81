// test_lineshape.cpp - Lorentzian mixture algebra

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polaritonix/lineshape.hpp"

using namespace polaritonix;

namespace {

// Trapezoid over [-L, L]; the f_L tail beyond L carries about 2 Gamma/(pi L).
double integrate(const Mixture& m, double L, std::size_t n) {
    const double h = 2.0 * L / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        s += w * m(-L + h * static_cast<double>(i));
    }
    return s * h;
}

} // namespace

TEST_CASE("eval_f and eval_g closed forms") {
    CHECK(eval_f(1.0, 1.0, 0.5) == doctest::Approx(1.0 / (kPi * 0.5)));
    CHECK(eval_g(1.0, 1.0, 0.5) == 0.0);
    CHECK(eval_g(1.5, 1.0, 0.5) == doctest::Approx(-eval_g(0.5, 1.0, 0.5)));
    CHECK(eval_g(1.5, 1.0, 0.5) == doctest::Approx(0.5 / (kPi * 0.5)));
    CHECK_THROWS_AS(eval_f(0.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(eval_g(0.0, 0.0, -1.0), std::domain_error);
}

TEST_CASE("f_L is normalized and g_L integrates to zero") {
    const auto f = Mixture::lorentzian(0.3, 0.2);
    const auto g = Mixture::hilbert_lorentzian(0.3, 0.2);
    CHECK(integrate(f, 2000.0, 400000) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(integrate(g, 2000.0, 400000)) < 1e-3);
    CHECK(f.integral() == 1.0);
    CHECK(g.integral() == 0.0);
}

TEST_CASE("convolution table is complex multiplication") {
    const auto f1 = Mixture::lorentzian(1.0, 0.5, 2.0);
    const auto f2 = Mixture::lorentzian(-0.25, 0.3);
    const auto g2 = Mixture::hilbert_lorentzian(-0.25, 0.3);
    const auto g1 = Mixture::hilbert_lorentzian(1.0, 0.5);

    SUBCASE("f * f = f") {
        const auto c = convolve(f1, f2);
        REQUIRE(c.size() == 1);
        CHECK(c.atoms()[0].amplitude == cplx(2.0, 0.0));
        CHECK(c.atoms()[0].center == doctest::Approx(0.75));
        CHECK(c.atoms()[0].half_width == doctest::Approx(0.8));
    }
    SUBCASE("f * g = g") {
        const auto c = convolve(f1, g2);
        REQUIRE(c.size() == 1);
        CHECK(c.atoms()[0].amplitude == cplx(0.0, 2.0));
    }
    SUBCASE("g * g = -f") {
        const auto c = convolve(g1, g2);
        REQUIRE(c.size() == 1);
        CHECK(c.atoms()[0].amplitude == cplx(-1.0, 0.0));
        CHECK(c(0.5) == doctest::Approx(-eval_f(0.5, 0.75, 0.8)));
    }
}

TEST_CASE("delta atoms") {
    const auto d = Mixture::delta(0.5, 0.25);
    CHECK(d.has_deltas());
    CHECK_THROWS_AS(d(0.0), std::domain_error);
    const auto b = d.broadened(0.1);
    CHECK_FALSE(b.has_deltas());
    CHECK(b(0.5) == doctest::Approx(0.25 / (kPi * 0.1)));
    // delta * g = g
    const auto c = convolve(Mixture::delta(0.0), Mixture::hilbert_lorentzian(1.0, 0.2));
    CHECK(c(1.7) == doctest::Approx(eval_g(1.7, 1.0, 0.2)));
}

TEST_CASE("compaction merges equal atoms and prunes negligible ones") {
    std::vector<PoleAtom> atoms = {{cplx(1.0, 0.0), 0.0, 1.0},
                                   {cplx(0.5, 0.0), 0.0, 1.0 + 1e-15},
                                   {cplx(1e-16, 0.0), 3.0, 1.0},
                                   {cplx(0.25, 0.0), 2.0, 1.0}};
    const auto c = Mixture(atoms).compacted();
    REQUIRE(c.size() == 2);
    CHECK(c.total_amplitude().real() == doctest::Approx(1.75));
}

TEST_CASE("analytic signal carries the Hilbert transform") {
    const Mixture m(std::vector<PoleAtom>{{cplx(0.7, 0.2), -1.0, 0.4}, {cplx(0.3, -0.1), 2.0, 0.9}});
    for (double w : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
        const cplx a = m.analytic_signal(w);
        CHECK(a.real() == doctest::Approx(m(w)));
        // H[f] = g and H[g] = -f
        const double h = 0.7 * eval_g(w, -1.0, 0.4) - 0.2 * eval_f(w, -1.0, 0.4) +
                         0.3 * eval_g(w, 2.0, 0.9) + 0.1 * eval_f(w, 2.0, 0.9);
        CHECK(a.imag() == doctest::Approx(h));
    }
}

TEST_CASE("vectorized evaluation and summaries") {
    const Mixture m(std::vector<PoleAtom>{{cplx(2.0, 0.0), 0.0, 1.0}, {cplx(-1.0, 0.5), 1.0, 0.5}});
    const std::vector<double> xs = {-2.0, 0.0, 0.7, 3.0};
    const auto v = m.evaluate(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(v[i] == doctest::Approx(m(xs[i])));
    CHECK(m.integral() == doctest::Approx(1.0));
    CHECK(m.max_abs_amplitude() == doctest::Approx(2.0));
    CHECK(m.condition_number() == doctest::Approx((2.0 + std::abs(cplx(-1.0, 0.5))) /
                                                  std::abs(cplx(1.0, 0.5))));
    CHECK(m.scaled(cplx(0.0, 1.0)).total_amplitude() == cplx(-0.5, 1.0));
}
