#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "flatlab/cantor.hpp"
#include "flatlab/cf_oracle.hpp"
#include "flatlab/nondiv.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/util.hpp"

using namespace flatlab;

namespace {

Mat2 adversarial_frame() {
    // contains (0.08, -0.1): both |x| and |x + y| below 0.1, systole 0.1
    return Mat2{0.08, 4, -0.1, 7.5};
}

}  // namespace

TEST_CASE("derive_params reproduces the stated values") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.1, 0.5, 1.0, 0.1);
    CHECK(p.eps0 == doctest::Approx(0.05));
    CHECK(p.N == 16);
    CHECK(p.t1 == doctest::Approx(std::log(16.0)));

    CantorParams p2 = derive_params(t, 0.08, 0.5, 1.0, 0.1);  // eps0 = 0.04
    CHECK(p2.eps0 == doctest::Approx(0.04));
    CHECK(p2.N == 25);

    // halving r at fixed eps0 roughly quadruples N
    CantorParams ph = derive_params(t, 0.075, 0.5, 0.5, 0.1);  // eps0 = 0.05 again
    double ratio = static_cast<double>(ph.N) / static_cast<double>(p.N);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);

    CHECK_THROWS_WITH_AS(derive_params(t, 1.5, 0.5, 1.0, 0.1),
                         doctest::Contains("witness"), std::domain_error);
}

TEST_CASE("certify_stretch") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.1, 0.5, 1.0, 0.1);
    CHECK(certify_stretch(t, p.t1, p.r, p.rho0, p.eps0).ok);

    // t1 = 0 with an adversarial base point
    Surface adv = t.transformed(adversarial_frame());
    StretchCertificate r = certify_stretch(adv, 0, 1, 0.1, 0.05);
    CHECK_FALSE(r.ok);
    CHECK(std::fabs(r.violator.x) == doctest::Approx(0.08));
    CHECK(std::fabs(r.violator.y) == doctest::Approx(0.1));

    // scaling invariance: double rho0 and shift t1 by 2 ln 2
    StretchCertificate r2 = certify_stretch(adv, 2 * std::log(2.0), 1, 0.2, 0.05);
    CHECK(r.ok == r2.ok);
    CHECK(certify_stretch(t, p.t1 + 2 * std::log(2.0), p.r, 2 * p.rho0, p.eps0).ok ==
          certify_stretch(t, p.t1, p.r, p.rho0, p.eps0).ok);

    CHECK_THROWS_AS(certify_stretch(t, 1.0, 1.0, 0.1, 1.5), std::domain_error);
}

TEST_CASE("survivors keeps all N children when eps is small") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.01, 0.5, 0.3, 0.1);
    CHECK(p.N == 7512);  // (2 rho0 / (eps0 r))^2 rounded up
    auto kept = survivors(t, {0.0, 0.3}, 0, p);
    CHECK(static_cast<long long>(kept.size()) == p.N);
    double w = 0.3 / static_cast<double>(p.N);
    for (std::size_t i = 0; i + 1 < kept.size(); i += 997) {
        CHECK(kept[i].second - kept[i].first == doctest::Approx(w));
        CHECK(kept[i + 1].first >= kept[i].second - 1e-15);
    }
    // spot-check with dense sampling on a few children
    std::pair<long long, long long> hint{0, 0};
    for (std::size_t i : {std::size_t(0), std::size_t(3700), std::size_t(7000)}) {
        for (int g = 0; g <= 20; ++g) {
            double s = kept[i].first + (kept[i].second - kept[i].first) * g / 20.0;
            CHECK(systole_with_hint(t, geodesic(p.t1) * horocycle(s), hint).value >=
                  p.eps0 - 1e-12);
        }
    }
    CHECK_THROWS_AS(survivors(t, {0.0, 0.2}, 0, p), std::domain_error);  // wrong width
}

TEST_CASE("construct, nesting and re-verification") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.1, 0.5, 0.3, 0.1 / 4, 4);
    CHECK(p.N == 5);
    CantorTree tree = construct(t, p);
    REQUIRE_FALSE(tree.extinct);
    REQUIRE(tree.levels.size() == 5);
    CHECK(tree.levels[0].count == 1);

    // nesting: every level-(m+1) interval lies inside a level-m interval
    for (std::size_t m = 0; m + 1 < tree.levels.size(); ++m) {
        double wm = p.r * std::pow(static_cast<double>(p.N), -static_cast<double>(m));
        for (double lo : tree.levels[m + 1].lows) {
            bool inside = false;
            for (double plo : tree.levels[m].lows)
                if (lo >= plo - 1e-12 && lo + wm / p.N <= plo + wm + 1e-12) { inside = true; break; }
            CHECK(inside);
        }
    }

    VerifyReport rep = verify_tree(t, tree, 10);
    CHECK(rep.violations == 0);
    CHECK(rep.min_seen >= p.eps0 - 1e-9);

    // the certified construction really is certified: a much finer grid too
    VerifyReport rep2 = verify_tree(t, tree, 37);
    CHECK(rep2.violations == 0);

    SUBCASE("depth zero yields the single base interval") {
        CantorParams p0 = p;
        p0.depth = 0;
        CantorTree t0 = construct(t, p0);
        REQUIRE(t0.levels.size() == 1);
        CHECK(t0.levels[0].count == 1);
        CHECK(t0.deepest_midpoints.size() == 1);
        CHECK(t0.deepest_midpoints[0] == doctest::Approx(0.15));
    }
}

TEST_CASE("construct reports extinction for eps near the systole") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.9, 0.5, 0.3, 0.1, 6);
    CantorTree tree = construct(t, p);
    CHECK(tree.extinct);
    CHECK(tree.extinct_level <= 2);
    CHECK_THROWS_AS(dim_estimate(tree), check_failure);
}

TEST_CASE("monotonicity in eps at matched N") {
    Surface t = make_torus();
    CantorParams pa = derive_params(t, 0.05, 0.5, 0.3, 0.05 / 4, 4);
    CantorParams pb = derive_params(t, 0.06, 0.5, 0.3, 0.06 / 4, 4);
    REQUIRE(pa.N == pb.N);
    CantorTree ta = construct(t, pa);  // smaller eps: weaker requirement
    CantorTree tb = construct(t, pb);
    for (std::size_t m = 0; m < tb.levels.size(); ++m) {
        REQUIRE(m < ta.levels.size());
        // every surviving interval at eps = 0.06 also survives at eps = 0.05
        for (double lo : tb.levels[m].lows) {
            bool found = false;
            for (double alo : ta.levels[m].lows)
                if (std::fabs(alo - lo) < 1e-12) { found = true; break; }
            CHECK(found);
        }
    }
}

TEST_CASE("dim_estimate on synthetic trees") {
    CantorTree t;
    t.params.N = 16;
    t.params.r = 1;

    SUBCASE("all children survive") {
        long long c = 1;
        for (int m = 0; m <= 4; ++m) {
            t.levels.push_back({m, c, {}});
            c *= 16;
        }
        DimEstimate d = dim_estimate(t);
        CHECK(d.eta_obs == doctest::Approx(0));
        CHECK(d.mcmullen_bound == doctest::Approx(1).epsilon(1e-9));
        CHECK(d.box_dim_fit == doctest::Approx(1).epsilon(1e-9));
    }

    SUBCASE("exactly half survive") {
        long long c = 1;
        for (int m = 0; m <= 4; ++m) {
            t.levels.push_back({m, c, {}});
            c *= 8;
        }
        DimEstimate d = dim_estimate(t);
        CHECK(d.eta_obs == doctest::Approx(0.5));
        double expect = 1 + std::log(0.5) / std::log(16.0);
        CHECK(d.mcmullen_bound == doctest::Approx(expect).epsilon(1e-9));
        CHECK(d.box_dim_fit == doctest::Approx(0.75).epsilon(1e-6));
    }

    SUBCASE("mcmullen consistency on random survival patterns") {
        std::mt19937_64 rng(97);
        for (int trial = 0; trial < 20; ++trial) {
            double eta = 0.05 + 0.4 * (rng() % 1000) / 1000.0;
            CantorTree tt;
            tt.params.N = 16;
            long long c = 1;
            tt.levels.push_back({0, 1, {}});
            for (int m = 1; m <= 5; ++m) {
                long long lo = static_cast<long long>(std::ceil((1 - eta) * 16));
                long long keep = lo + static_cast<long long>(rng() % (16 - lo + 1));
                c *= keep;
                tt.levels.push_back({m, c, {}});
            }
            DimEstimate d = dim_estimate(tt);
            CHECK(d.mcmullen_bound >= 1 + std::log(1 - eta) / std::log(16.0) - 1e-12);
        }
    }
}

TEST_CASE("bounded_direction_check against the reduction oracle") {
    Surface t = make_torus();
    double phi = (1 + std::sqrt(5.0)) / 2;
    double theta = rotation_angle_for_slope(phi);
    double T = 30, step = 0.05;

    // oracle: shortest vector of g_t r_theta Z^2 by basis reduction on the grid
    double c0 = 1e300;
    for (double tt = 0; tt <= T + 1e-12; tt += step) {
        Mat2 A = geodesic(std::fmin(tt, T)) * rotation(theta);
        c0 = std::fmin(c0, shortest_vector(Basis2::columns_of(A)).maxnorm);
    }
    BoundedCheck bc = bounded_direction_check(t, theta, T, 0.15, DirectionMode::Rotation, step);
    CHECK(bc.bounded);
    CHECK(bc.min_systole == doctest::Approx(c0).epsilon(1e-9));
    CHECK(bc.min_systole >= std::sqrt(1 / std::sqrt(5.0)) - 0.02);  // ~ (1/5)^(1/4)

    // rational slope diverges: below eps once T >= 2 ln(1/eps) + margin
    double theta_rat = rotation_angle_for_slope(0.6);  // slope 3/5
    double eps = 0.1;
    double Trat = 2 * std::log(1 / eps) + 8;
    BoundedCheck brat = bounded_direction_check(t, theta_rat, Trat, eps, DirectionMode::Rotation, step);
    CHECK_FALSE(brat.bounded);
    CHECK(brat.min_systole < eps);
}

TEST_CASE("direction-mode agreement under the factorization") {
    Surface t = make_torus();
    std::mt19937_64 rng(101);
    for (int i = 0; i < 20; ++i) {
        double theta = -1.3 + 2.6 * (rng() % 1000) / 999.0;
        if (std::fabs(std::cos(theta)) < 0.15) continue;
        auto [f, s] = factor_rotation(theta);
        double T = 8;
        BoundedCheck rot = bounded_direction_check(t, theta, T, 0.1, DirectionMode::Rotation, 0.1);
        BoundedCheck horo = bounded_direction_check(t, s, T, 0.1, DirectionMode::Horocycle, 0.1);
        double cf = std::sqrt(2.0) * f.opnorm();
        double cfi = std::sqrt(2.0) * f.inverse().opnorm();
        // minima along the two paths are comparable up to the condition factor
        CHECK(rot.min_systole >= horo.min_systole / cfi - 1e-9);
        CHECK(horo.min_systole >= rot.min_systole / cf - 1e-9);
        // the certified factorization mode never over-claims
        BoundedCheck via =
            bounded_direction_check(t, theta, T, 0.1, DirectionMode::RotationViaFactorization, 0.1);
        if (via.bounded) CHECK(rot.min_systole >= 0.1 - 1e-9);
        CHECK(via.min_systole <= rot.min_systole + 1e-9);
    }
}

TEST_CASE("torus ground truth: quotients of surviving midpoints are bounded") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.1, 0.5, 0.3, 0.1 / 4, 8);
    REQUIRE(p.N == 5);
    CantorTree tree = construct(t, p);
    REQUIRE_FALSE(tree.extinct);

    // surviving directions: partial quotients within the explored horizon are
    // bounded by ~1/eps0^2 (a deeper dip would have killed the interval)
    double horizon_q = std::exp(p.depth * p.t1 / 2) * p.eps0 * 0.5;
    long long K = static_cast<long long>(std::ceil(1.2 / (p.eps0 * p.eps0))) + 1;
    int checked = 0;
    for (std::size_t i = 0; i < tree.deepest_midpoints.size(); i += 37) {
        double s = tree.deepest_midpoints[i];
        CFExpansion e = cf_expand(QuadNumber::inexact(s), 30);
        double qk = 1, qk1 = 0;
        for (std::size_t j = 0; j < e.partial_quotients.size(); ++j) {
            double qnext = e.partial_quotients[j] * qk + qk1;
            if (qnext > horizon_q) break;
            CHECK(e.partial_quotients[j] <= K);
            qk1 = qk;
            qk = qnext;
            ++checked;
        }
    }
    CHECK(checked > 50);

    // rational s are eliminated by level 2 ln(q(1+r)/eps)/t1 + 2
    double s_rat = 0.25;
    int died_at = -1;
    for (std::size_t m = 0; m < tree.levels.size(); ++m) {
        double wm = p.r * std::pow(static_cast<double>(p.N), -static_cast<double>(m));
        bool covered = false;
        for (double lo : tree.levels[m].lows)
            if (s_rat >= lo && s_rat < lo + wm) { covered = true; break; }
        if (!covered) { died_at = static_cast<int>(m); break; }
    }
    REQUIRE(died_at > 0);
    double bound = 2 * std::log(4 * (1 + p.r) / p.eps) / p.t1 + 2;
    CHECK(died_at <= static_cast<int>(std::ceil(bound)));
}

TEST_CASE("survival fraction dominates the fitted envelope prediction") {
    Surface t = make_torus();
    // fitted envelope from the pushed-frame measurement
    NondivParams np;
    np.rho = np.rho0 = 0.1;
    np.eps_list = {0.1, 0.05, 0.02, 0.01};
    np.sample_count = 2000;
    np.post = geodesic(12);
    DecayFit fit = fit_decay(t, np);

    CantorParams p = derive_params(t, 0.01, 0.5, 0.3, 0.1, 1);
    double envelope = fit.C_hat * std::pow(p.eps0 / p.rho0, fit.alpha_hat);
    REQUIRE(envelope < p.eta);  // the counting argument applies
    CantorTree tree = construct(t, p);
    REQUIRE_FALSE(tree.extinct);
    CHECK(static_cast<double>(tree.levels[1].count) >=
          (1 - p.eta) * static_cast<double>(p.N));
}

TEST_CASE("construction is deterministic across thread counts") {
    Surface t = make_torus();
    CantorParams p = derive_params(t, 0.08, 0.5, 0.3, 0.02, 4);
    int saved = get_thread_budget();
    set_thread_budget(1);
    CantorTree a = construct(t, p);
    set_thread_budget(4);
    CantorTree b = construct(t, p);
    set_thread_budget(saved);
    REQUIRE(a.levels.size() == b.levels.size());
    for (std::size_t m = 0; m < a.levels.size(); ++m) {
        REQUIRE(a.levels[m].lows.size() == b.levels[m].lows.size());
        for (std::size_t i = 0; i < a.levels[m].lows.size(); ++i)
            CHECK(a.levels[m].lows[i] == b.levels[m].lows[i]);  // bit-identical
    }
}

TEST_CASE("equivalence panel at reduced size") {
    PanelResult pr = equivalence_panel(12, 12, 25, 0.17, 20, 40, 12345);
    REQUIRE(pr.cases.size() == 24);
    CHECK(pr.agreement >= 0.95);
}
