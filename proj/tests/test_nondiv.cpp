#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "flatlab/nondiv.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/util.hpp"

using namespace flatlab;

TEST_CASE("check_hypothesis on the torus") {
    Surface t = make_torus();
    CHECK(check_hypothesis(t, 0, 1, 0.5).ok);
    CHECK(check_hypothesis(t, 0, 1, 1e-6).ok);  // vacuously easy

    // a short nearly-horizontal vector that the arc cannot stretch
    Surface pushed = t.transformed(geodesic(-10));
    HypothesisCheck hc = check_hypothesis(pushed, 0, 1e-9, 0.5);
    CHECK_FALSE(hc.ok);
    CHECK(std::fabs(hc.violator.x) == doctest::Approx(std::exp(-5.0)));
    CHECK(hc.violator.y == doctest::Approx(0));
}

TEST_CASE("bad_measure trivial regimes") {
    Surface t = make_torus();
    // systole(h_s torus) is identically 1
    CHECK(bad_measure(t, 0, 1, 0.5, 1000) == doctest::Approx(0));
    CHECK(bad_measure(t, 0, 1, 2.0, 1000) == doctest::Approx(1));

    // the literal pre-pushed example: min systole along the arc is e^{-2}
    Surface g4 = t.transformed(geodesic(4));
    CHECK(bad_measure(g4, 0, 1, 0.05, 1000) == doctest::Approx(0));
    CHECK(bad_measure(g4, 0, 1, 0.1, 1000) == doctest::Approx(0));
}

TEST_CASE("bad_measure accuracy against a dense reference grid") {
    Surface t = make_torus();
    Mat2 post = geodesic(6);
    double eps = 0.1;
    long long samples = 2000;
    double got = bad_measure(t, 0, 1, eps, samples, post);

    // dense reference
    long long n = 200000;
    long long bad = 0;
    std::pair<long long, long long> hint{0, 0};
    for (long long i = 0; i <= n; ++i) {
        double s = static_cast<double>(i) / n;
        if (systole_with_hint(t, post * horocycle(s), hint).value < eps) ++bad;
    }
    double ref = static_cast<double>(bad) / (n + 1);
    CHECK(std::fabs(got - ref) <= 2.0 / samples);
    CHECK(got > 0.005);  // the windows around s = 0, 1/2, 1 are really there

    // analytic estimate: windows of |x + s y| < eps e^{-3} at y = 1 (s = 0, 1)
    // and y = 2 (s = 1/2), total 3 * eps * e^{-3}
    double analytic = 3 * eps * std::exp(-3.0);
    CHECK(got == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("bad_measure is monotone in eps and vanishes in the limit") {
    Surface t = make_torus();
    Mat2 post = geodesic(12);
    double prev = -1, smallest = -1;
    for (double eps : {0.005, 0.01, 0.02, 0.05, 0.1}) {
        double m = bad_measure(t, 0, 1, eps, 2000, post);
        CHECK(m >= prev - 1e-12);
        if (smallest < 0) smallest = m;
        prev = m;
    }
    // the sweep tail is an order of magnitude below the head
    CHECK(smallest <= prev / 10 + 2.0 / 2000);
    CHECK(smallest < 1e-3);
}

TEST_CASE("bad_measure cocycle consistency") {
    Surface t = make_torus();
    Mat2 post = geodesic(9);
    double c = 0.37;
    double a = bad_measure(t.transformed(horocycle(c)), 0, 1, 0.08, 2000, post);
    double b = bad_measure(t, c, 1 + c, 0.08, 2000, post);
    CHECK(std::fabs(a - b) <= 2.0 / 2000);
}

TEST_CASE("fit_decay measures a positive exponent in the pushed frame") {
    Surface t = make_torus();
    NondivParams p;
    p.rho = p.rho0 = 0.1;
    p.eps_list = {0.1, 0.05, 0.02, 0.01, 0.005};
    p.s_lo = 0;
    p.s_hi = 1;
    p.sample_count = 100000;
    p.post = geodesic(12);
    DecayFit f = fit_decay(t, p);
    CHECK(f.alpha_hat > 0);
    CHECK(f.alpha_hat == doctest::Approx(2).epsilon(0.25));  // measured, not asserted by theory
    for (std::size_t i = 0; i < f.eps.size(); ++i)
        CHECK(f.measures[i] <= f.predicted[i] * 1.10 + 1e-12);

    SUBCASE("doubling the interval leaves the exponent stable") {
        NondivParams p2 = p;
        p2.s_hi = 2;
        DecayFit f2 = fit_decay(t, p2);
        CHECK(std::fabs(f2.alpha_hat - f.alpha_hat) < 0.1);
    }
}

TEST_CASE("fit_decay degenerate cases") {
    Surface t = make_torus();
    NondivParams p;
    p.rho = p.rho0 = 0.1;
    p.eps_list = {0.1, 0.05, 0.02};
    p.sample_count = 1000;

    SUBCASE("all measures zero") {
        // identity post: systole along the unit arc never drops below 1
        CHECK_THROWS_AS(fit_decay(t, p), check_failure);
    }

    SUBCASE("hypothesis violation is reported") {
        Surface bad = t.transformed(geodesic(-10));
        CHECK_THROWS_AS(fit_decay(bad, p), check_failure);
    }

    SUBCASE("non-diagonal post is rejected") {
        p.post = rotation(0.3);
        CHECK_THROWS_AS(fit_decay(t, p), std::invalid_argument);
    }
}

TEST_CASE("nondiv csv shape") {
    DecayFit f;
    f.eps = {0.1, 0.05};
    f.measures = {0.01, 0.002};
    f.predicted = {0.011, 0.0025};
    std::string csv = nondiv_csv(f);
    CHECK(csv.substr(0, 26) == "eps,bad_measure,predicted\n");
    CHECK(csv.find("0.1,0.01,0.011\n") != std::string::npos);
}
