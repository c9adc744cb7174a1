#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cascade/weights.hpp"

#include <cmath>
#include <stdexcept>

using namespace cascade;

namespace {

// Test-side adaptive Simpson, independent of the library's quadrature.
double simpson(double (*f)(double), double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(double (*f)(double), double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double exp_sq(double y) { return std::exp(y * y); }

const CarlemanWindow kFullWindow{0.0, 2.0, 0.0};

} // namespace

TEST_CASE("spatial profile integral matches an independent quadrature") {
    // k = x: the integrand (y/k) e^{R y^2} collapses to e^{y^2}, whose
    // integral over (0,1) is 1.4626517459071816 (adaptive Simpson, 1e-12)
    const double oracle = adaptive_simpson(exp_sq, 0.0, 1.0, 1e-12);
    CHECK(oracle == doctest::Approx(1.4626517459071816).epsilon(1e-12));

    const auto w = CarlemanWeights::build(KModel::power_at_0(1.0), 1.0, kFullWindow);
    CHECK(w.p(0.0) == 0.0);
    CHECK(w.p(1.0) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(w.sup_p() == doctest::Approx(oracle).epsilon(1e-6));

    double prev = -1.0;
    for (double x = 0.0; x <= 1.0; x += 0.05) {
        CHECK(w.p(x) >= prev);
        prev = w.p(x);
    }
    CHECK_THROWS_AS(w.p(1.2), std::invalid_argument);
}

TEST_CASE("degeneracy at one flips the profile monotonicity") {
    const auto w = CarlemanWeights::build(KModel::power_at_1(0.7), 1.0, kFullWindow);
    CHECK(!w.degenerate_at_zero());
    CHECK(w.p(0.0) == 0.0);
    double prev = 1.0;
    for (double x = 0.0; x <= 1.0; x += 0.05) {
        CHECK(w.p(x) <= prev + 1e-15);
        prev = w.p(x);
    }
    CHECK(w.p(1.0) < 0.0);
}

TEST_CASE("time-age envelope has the pinned window values") {
    const auto w = CarlemanWeights::build(KModel::power_at_0(0.5), 1.0, kFullWindow);
    // 1 / ((t-0)^4 (2-t)^4 (a-0)^4)
    CHECK(w.theta(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.theta(1.0, 0.5) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(w.theta(0.5, 1.0) == doctest::Approx(std::pow(0.5 * 1.5, -4.0)).epsilon(1e-12));

    const auto shifted = CarlemanWeights::build(KModel::power_at_0(0.5), 1.0,
                                                CarlemanWindow{0.5, 1.5, 0.0});
    CHECK(shifted.theta(1.0, 1.0) == doctest::Approx(256.0).epsilon(1e-12));
}

TEST_CASE("phi is strictly negative and phi(1,1,0) is pinned") {
    const auto w = CarlemanWeights::build(KModel::power_at_0(1.0), 1.0, kFullWindow);
    CHECK(w.phi(1.0, 1.0, 0.0) ==
          doctest::Approx(-2.0 * 1.4626517459071816).epsilon(1e-5));
    for (double t : {0.3, 1.0, 1.7})
        for (double a : {0.2, 0.6, 0.95})
            for (double x : {0.0, 0.4, 1.0})
                CHECK(w.phi(t, a, x) < 0.0);
}

TEST_CASE("weight products vanish at the window edges instead of overflowing") {
    const auto w = CarlemanWeights::build(KModel::power_at_0(0.5), 1.0, kFullWindow);
    // interior: positive and finite
    const double mid = w.product(1.0, 2.0, 1.0, 0.5, 0.4);
    CHECK(mid > 0.0);
    CHECK(std::isfinite(mid));
    // the exponential factor beats every polynomial order of theta: edge
    // evaluations flush to zero for any power and any s
    CHECK(w.product(3.0, 1.0, 0.0, 0.5, 0.4) == 0.0);
    CHECK(w.product(3.0, 1.0, 2.0, 0.5, 0.4) == 0.0);
    CHECK(w.product(3.0, 1.0, 1.0, 0.0, 0.4) == 0.0);
    CHECK(w.product(3.0, 1.0, 1e-9, 0.5, 0.4) == 0.0);
    // large s drives the product down, never up to overflow
    CHECK(w.product(3.0, 64.0, 1.0, 0.5, 0.4) <= mid);
}

TEST_CASE("window construction is validated") {
    CHECK_THROWS_AS(CarlemanWeights::build(KModel::power_at_0(0.5), 1.0,
                                           CarlemanWindow{1.0, 1.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("log-space evaluation survives extreme arguments") {
    const auto w = CarlemanWeights::build(KModel::power_at_0(0.5), 1.0,
                                          CarlemanWindow{0.0, 2.0, 0.5});
    // one step inside a narrow corner of the window: theta is astronomically
    // large, e^{2 s phi} astronomically small; the product must stay finite
    const double v = w.product(3.0, 8.0, 1e-3, 0.5 + 1e-3, 0.5);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
}
