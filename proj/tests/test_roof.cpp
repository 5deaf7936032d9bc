#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"
#include "arnoldflow/roof.hpp"

using namespace arnoldflow;

TEST_CASE("closed form values") {
    RoofSpec f(0.6, 0.3, 0.1);
    CHECK(f.eval(0.5) == doctest::Approx(0.9 * std::log(2.0) + 0.1).epsilon(1e-14));
    CHECK(f.eval(0.5, 0) == doctest::Approx(0.7238).epsilon(1e-4));
    CHECK(f.eval(0.5, 1) == doctest::Approx(-0.6).epsilon(1e-14));
    CHECK(f.eval(0.5, 2) == doctest::Approx(0.6 * 4 + 0.3 * 4).epsilon(1e-14));
    double x = 1e-8;
    CHECK(f.eval(x) / (-std::log(x)) == doctest::Approx(0.6).epsilon(0.01));
    CHECK_THROWS_AS(f.eval(CirclePoint{0}), Error);
    // the complement side keeps full precision near 1
    CirclePoint near_one = CirclePoint::from_double(-1e-20);
    CHECK(f.eval(near_one) == doctest::Approx(0.3 * std::log(1e20) + 0.1).epsilon(1e-12));
}

TEST_CASE("invalid roofs are rejected") {
    CHECK_THROWS_AS(RoofSpec(1, 1, 0), Error);
    CHECK_THROWS_AS(RoofSpec(-1, 1, 0), Error);
    // g = -3 + ... makes f negative in the middle
    CHECK_THROWS_AS(RoofSpec(0.2, 0.1, -3), Error);
    CHECK_NOTHROW(RoofSpec(0.6, 0.3, 0.1, {0.05}, {0.02}));
}

TEST_CASE("derivatives agree with central differences") {
    RoofSpec f(0.6, 0.3, 0.1, {0.05, -0.01}, {0.02});
    Rng rng = instance_rng(21, 0);
    for (int rep = 0; rep < 100; ++rep) {
        double x = 0.01 + 0.98 * uniform01(rng);
        for (int k = 1; k <= 4; ++k) {
            double h = 1e-5 * x * (1 - x);
            double fd = (f.eval(x + h, k - 1) - f.eval(x - h, k - 1)) / (2 * h);
            double an = f.eval(x, k);
            CHECK(std::fabs(fd - an) <= 1e-6 * std::max(1.0, std::fabs(an)));
        }
    }
}

TEST_CASE("derivative asymptotics at the singularity") {
    RoofSpec f(0.6, 0.3, 0.1, {0.05}, {0.02});
    for (int j = 1; j <= 4; ++j) {
        double fact = 1;
        for (int i = 2; i < j; ++i) fact *= i;
        double x = 1e-10;
        double v = f.eval(x, j) * std::pow(-1.0, j) * std::pow(x, j) / fact;
        CHECK(v == doctest::Approx(0.6).epsilon(1e-6));
    }
}

TEST_CASE("integral and normalization") {
    RoofSpec f(0.6, 0.3, 0.1);
    CHECK(f.integral() == doctest::Approx(1.0));
    RoofSpec g(1, 2, 0);
    CHECK(g.integral() == 3);
    CHECK(g.normalized().A_minus() == doctest::Approx(1.0 / 3));
    CHECK(g.normalized().integral() == doctest::Approx(1.0));

    RoofSpec h(0.7, 0.2, 0.4, {0.1, 0.05}, {0.03});
    // quadrature on [d, 1-d] plus analytic tails
    double d = 1e-6;
    double tail = 0.7 * (d - d * std::log(d)) + 0.2 * ((1 - d) * std::log1p(-d) + d);
    tail += 0.2 * (d - d * std::log(d)) + 0.7 * ((1 - d) * std::log1p(-d) + d);
    tail += 2 * d * 0.4 + 0.1 * std::sin(2 * M_PI * d) / M_PI + 0.05 * std::sin(4 * M_PI * d) / (2 * M_PI);
    // sin terms integrate to zero over the symmetric window
    boost::math::quadrature::tanh_sinh<double> ts;
    double mid = ts.integrate([&](double x) { return h.eval(x); }, d, 1 - d);
    CHECK(std::fabs(mid + tail - h.integral()) < 1e-10);
}

TEST_CASE("truncation") {
    RoofSpec f(0.6, 0.3, 0.1);
    TruncatedRoof t(f, 13, 0);
    CHECK(t.eval(CirclePoint::from_double(1.0 / 60)) == 0.0);
    CHECK(t.eval(CirclePoint::from_double(1 - 1.0 / 60)) == 0.0);
    CHECK(t.eval(CirclePoint::from_double(0.5)) == f.eval(0.5));
    for (double q : {13.0, 987.0, 1e5}) {
        TruncatedRoof tr(f, q, 0);
        double h = tr.half_width();
        boost::math::quadrature::tanh_sinh<double> ts;
        double quad = ts.integrate([&](double x) { return f.eval(x); }, h, 1 - h);
        CHECK(std::fabs(quad - tr.integral()) < 1e-10);
        CHECK(std::fabs(tr.integral() - f.integral()) <= 2 * std::log(q) / q);
        TruncatedRoof t1(f, q, 1);
        double quad1 = ts.integrate([&](double x) { return f.eval(x, 1); }, h, 1 - h);
        CHECK(quad1 == doctest::Approx(t1.integral()).epsilon(1e-9));
    }
}

TEST_CASE("variation of truncated roofs") {
    RoofSpec f(1, 2, 0);
    TruncatedRoof t(f, 13, 0);
    double h = 1.0 / 52;
    double c = 1.0 / 3;  // f' = -1/x + 2/(1-x) vanishes at 1/3
    double oracle = 2 * f.eval(h) + 2 * f.eval(1 - h) - 2 * f.eval(c);
    CHECK(variation(t) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(variation(t) <= 3 * (1 + 2) * std::log(13.0));

    TruncatedRoof t1(f, 13, 1);
    double oracle1 = std::fabs(f.eval(h, 1)) + std::fabs(f.eval(1 - h, 1)) + f.eval(1 - h, 1) - f.eval(h, 1);
    CHECK(variation(t1) == doctest::Approx(oracle1).epsilon(1e-12));

    CHECK(bv_trig(1, 1, 0).variation == 4);
    // dense sampling of a roof with a smooth part approaches the computed variation
    RoofSpec g(0.6, 0.3, 0.5, {0.2, 0.1}, {0.05});
    TruncatedRoof tg(g, 50, 0);
    double hv = tg.half_width();
    double sampled = std::fabs(g.eval(hv)) + std::fabs(g.eval(1 - hv));
    int N = 2'000'000;
    double prev = g.eval(hv);
    for (int i = 1; i <= N; ++i) {
        double x = hv + (1 - 2 * hv) * i / N;
        double v = g.eval(x);
        sampled += std::fabs(v - prev);
        prev = v;
    }
    CHECK(variation(tg) == doctest::Approx(sampled).epsilon(1e-8));
}

TEST_CASE("json round trip") {
    RoofSpec f(0.6, 0.3, 0.1, {0.05}, {0.02});
    RoofSpec g = RoofSpec::from_json(f.to_json());
    CHECK(g.A_minus() == 0.6);
    CHECK(g.sin_coeffs() == std::vector<double>{0.02});
    CHECK_THROWS_AS(RoofSpec::from_json(R"({"A_minus":1,"A_plus":2,"bogus":3})"), Error);
}
