#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fjp/maps.hpp"
#include "test_util.hpp"

using namespace fjp;
using doctest::Approx;

TEST_CASE("szego_alpha anchor values") {
    CHECK(szego_alpha({0.0, 0.0}) == Complex(0.0, 0.0));
    CHECK(szego_alpha({1.0, 0.0}) == Complex(1.0, 0.0));  // continuous limit
    // alpha(-3) = -3/(1+2)^2 = -1/3
    Complex v = szego_alpha({-3.0, 0.0});
    CHECK(v.real() == Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(v.imag() == Approx(0.0));
    CHECK_THROWS_AS(szego_alpha({2.0, 0.0}), map_domain_error);
    CHECK_THROWS_AS(szego_alpha({1.0 + 1e-6, 0.0}), map_domain_error);
}

TEST_CASE("szego_alpha_inv anchor values") {
    CHECK(szego_alpha_inv({0.0, 0.0}) == Complex(0.0, 0.0));
    CHECK(szego_alpha_inv({1.0, 0.0}) == Complex(1.0, 0.0));
    Complex v = szego_alpha_inv({-1.0 / 3.0, 0.0});
    CHECK(v.real() == Approx(-3.0).epsilon(1e-14));
    CHECK_THROWS_AS(szego_alpha_inv({-1.0, 0.0}), map_domain_error);
}

TEST_CASE("herglotz_h0 anchor values and half-plane range") {
    CHECK(herglotz_h0({0.0, 0.0}) == Complex(1.0, 0.0));
    CHECK(herglotz_h0({1.0 / 3.0, 0.0}).real() == Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(herglotz_h0({-1.0, 0.0})) == Approx(0.0));
    CHECK_THROWS_AS(herglotz_h0({1.0, 0.0}), map_domain_error);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        Complex z = testutil::sample_disc(rng, 0.999);
        CHECK(herglotz_h0(z).real() > 0.0);
    }
}

TEST_CASE("radial_a anchor values") {
    for (double kappa : {-0.9, -0.3, 0.0, 0.5, 0.9})
        CHECK(std::abs(radial_a({1.0, 0.0}, kappa) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(radial_a({0.0, 0.0}, 0.6).real() == Approx(0.6).epsilon(1e-14));
    // sqrt(0.36 + 0.64*4) = sqrt(2.92) = 1.70880...
    CHECK(radial_a({2.0, 0.0}, 0.6).real() == Approx(std::sqrt(2.92)).epsilon(1e-14));
    CHECK(radial_a({2.0, 0.0}, 0.6).real() == Approx(1.70880).epsilon(1e-5));
    CHECK_THROWS_AS(radial_a({1.0, 0.0}, 1.0), map_domain_error);
}

TEST_CASE("xi anchor values, pole, overflow") {
    for (double t : {0.0, 0.5, 3.0}) CHECK(std::abs(xi({1.0, 0.0}, t)) == Approx(0.0));
    CHECK(xi({0.0, 0.0}, 1.0).real() == Approx(-1.0).epsilon(1e-14));
    // xi(2) at t=1: (1/3) e^2
    CHECK(xi({2.0, 0.0}, 1.0).real() == Approx(std::exp(2.0) / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(xi({-1.0, 0.0}, 1.0), map_domain_error);
    CHECK_THROWS_AS(xi({800.0, 0.0}, 1.0), map_overflow_error);
}

TEST_CASE("herglotz_h_inf normalization and first coefficient") {
    CHECK(herglotz_h_inf({0.0, 0.0}, 0.6) == Complex(1.0, 0.0));
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        Complex z = testutil::sample_disc(rng);
        CHECK(std::abs(herglotz_h_inf(z, 0.0) - Complex(1.0, 0.0)) < 1e-14);
        CHECK(herglotz_h_inf(z, 0.7).real() >= 0.0);
    }
    // first Taylor coefficient is 2 kappa^2 (first moment of nu_inf is kappa^2)
    for (double kappa : {0.3, 0.6, 0.9}) {
        auto series = testutil::h_inf_series(kappa, 6);
        CHECK(series[0] == Approx(1.0).epsilon(1e-15));
        CHECK(series[1] == Approx(2.0 * kappa * kappa).epsilon(1e-13));
        // series oracle against the closed form on a small disc
        Complex z{0.2, 0.1};
        Complex direct = herglotz_h_inf(z, kappa);
        Complex fromseries{0.0, 0.0};
        Complex zp{1.0, 0.0};
        for (int n = 0; n <= 6; ++n) {
            fromseries += series[n] * zp;
            zp *= z;
        }
        CHECK(std::abs(direct - fromseries) < 1e-4);  // truncation-level agreement
    }
    CHECK_THROWS_AS(herglotz_h_inf({1.0, 0.0}, 0.5), map_domain_error);
}

TEST_CASE("round trips on the cut plane and the disc") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(-4.0, 0.9), im(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        Complex z{re(rng), im(rng)};
        Complex back = szego_alpha_inv(szego_alpha(z));
        CHECK(std::abs(back - z) < 1e-12 * std::max(1.0, std::abs(z)));
    }
    for (int i = 0; i < 200; ++i) {
        Complex z = testutil::sample_disc(rng);
        Complex back = szego_alpha(szego_alpha_inv(z));
        CHECK(std::abs(back - z) < 1e-12);
    }
}

TEST_CASE("conjugation symmetry (real coefficients)") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        Complex z = testutil::sample_disc(rng, 0.9);
        CHECK(std::abs(szego_alpha(std::conj(z)) - std::conj(szego_alpha(z))) < 1e-15);
        CHECK(std::abs(szego_alpha_inv(std::conj(z)) - std::conj(szego_alpha_inv(z))) < 1e-15);
        CHECK(std::abs(herglotz_h0(std::conj(z)) - std::conj(herglotz_h0(z))) < 1e-14);
        CHECK(std::abs(herglotz_h_inf(std::conj(z), 0.6) - std::conj(herglotz_h_inf(z, 0.6))) <
              1e-14);
        CHECK(std::abs(xi(std::conj(z), 1.5) - std::conj(xi(z, 1.5))) < 1e-14);
        Complex lhs = radial_a(herglotz_h0(std::conj(z)), 0.6);
        Complex rhs = std::conj(radial_a(herglotz_h0(z), 0.6));
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
}

TEST_CASE("no NaN escapes, errors are explicit") {
    CHECK_THROWS(radial_a({std::nan(""), 0.0}, 0.5));
}
