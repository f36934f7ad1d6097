#include "flatlab/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "flatlab/util.hpp"

namespace flatlab {

namespace {

std::string vec_str(const Holonomy& v) {
    return "[" + format_double(v.x) + ", " + format_double(v.y) + "]";
}

}  // namespace

CantorParams derive_params(const Surface& q0, double eps, double eta, double r, double rho0,
                           int depth) {
    if (!(r > 0 && r <= 1)) throw std::domain_error("derive_params requires 0 < r <= 1");
    if (!(eta > 0 && eta < 1)) throw std::domain_error("derive_params requires eta in (0,1)");
    if (eps <= 0 || rho0 <= 0) throw std::domain_error("derive_params requires eps, rho0 > 0");
    Systole sys = systole(q0);
    if (sys.value < eps) {
        throw std::domain_error("q0 is not in K_eps: systole " + format_double(sys.value) +
                                " < eps, witness " + vec_str(sys.witness));
    }
    CantorParams p;
    p.r = r;
    p.eps = eps;
    p.eta = eta;
    p.rho0 = rho0;
    p.depth = depth;
    p.eps0 = eps / (1 + r);
    double t1_raw = 2 * std::log(2 * rho0 / (p.eps0 * r));
    double n_raw = std::exp(t1_raw);
    p.N = std::max<long long>(2, static_cast<long long>(std::ceil(n_raw - 1e-9)));
    p.t1 = std::log(static_cast<double>(p.N));
    return p;
}

StretchCertificate certify_stretch(const Surface& q, double t1, double r, double rho0, double eps0) {
    if (r <= 0 || rho0 <= 0 || eps0 <= 0)
        throw std::domain_error("certify_stretch requires positive r, rho0, eps0");
    Systole sys = systole(q);
    if (sys.value < eps0) {
        throw std::domain_error("q is not in K_eps0: systole " + format_double(sys.value) +
                                " < eps0, witness " + vec_str(sys.witness));
    }
    // A failing vector has e^{t1/2} max(|x|, |x + r y|) < rho0, which forces
    // |x| < c and |x + r y| < c with c = rho0 e^{-t1/2}.
    double c = rho0 * std::exp(-t1 / 2);
    StretchCertificate res;
    auto test = [&](const Holonomy& v) {
        if (std::fmax(std::fabs(v.x), std::fabs(v.x + r * v.y)) < c) {
            res.ok = false;
            res.violator = canonical(v.x, v.y);
        }
    };
    if (q.cover_basis) {
        Mat2 rows{1, 0, 1, r};  // u1 = x, u2 = x + r y
        scan_lattice_box(q, rows, -c, c, -c, c, 200'000'000ull, test);
    } else {
        double L = std::fmax(c, 2 * c / r) * (1 + 1e-9);
        for (const auto& e : enumerate_saddles(q, L).vectors) test(e.v);
    }
    return res;
}

std::vector<std::pair<double, double>> survivors(const Surface& q0,
                                                 std::pair<double, double> interval, int m,
                                                 const CantorParams& p) {
    double lo = interval.first, hi = interval.second;
    double width = hi - lo;
    double expect = p.r * std::pow(static_cast<double>(p.N), -m);
    if (std::fabs(width - expect) > 1e-9 * expect)
        throw std::domain_error("survivors: interval width is not r N^{-m}");
    double t = (m + 1) * p.t1;
    std::vector<std::pair<double, double>> kept;
    double child = width / static_cast<double>(p.N);

    if (q0.cover_basis) {
        // one candidate collection for the parent serves all children
        std::vector<Holonomy> cand = interval_candidates(q0, t, lo, hi, p.eps0);
        for (long long j = 0; j < p.N; ++j) {
            double a = lo + j * child;
            double b = a + child;
            bool ok = true;
            for (const auto& v : cand) {
                if (interval_vector_bound(v, t, a, b) < p.eps0) { ok = false; break; }
            }
            if (ok) kept.push_back({a, b});
        }
        return kept;
    }
    for (long long j = 0; j < p.N; ++j) {
        double a = lo + j * child;
        double b = a + child;
        if (systole_interval_bound_capped(q0, t, a, b, p.eps0) >= p.eps0) kept.push_back({a, b});
    }
    return kept;
}

CantorTree construct(const Surface& q0, const CantorParams& p) {
    if (p.N < 2 || p.t1 <= 0) throw std::domain_error("construct requires derived params");
    Systole sys = systole(q0);
    if (sys.value < p.eps)
        throw std::domain_error("q0 is not in K_eps: systole " + format_double(sys.value) +
                                " < eps, witness " + vec_str(sys.witness));
    CantorTree tree;
    tree.params = p;
    tree.surface = q0.name;
    std::vector<double> lows{0.0};
    tree.levels.push_back({0, 1, lows});

    for (int m = 0; m < p.depth; ++m) {
        double width = p.r * std::pow(static_cast<double>(p.N), -m);
        double child = width / static_cast<double>(p.N);
        double t = (m + 1) * p.t1;
        std::vector<std::vector<double>> out(lows.size());
        int threads = get_thread_budget();
        parallel_for(lows.size(), [&](std::size_t i) {
            double lo = lows[i];
            std::vector<Holonomy> cand;
            if (q0.cover_basis) cand = interval_candidates(q0, t, lo, lo + width, p.eps0);
            for (long long j = 0; j < p.N; ++j) {
                double a = lo + j * child;
                double b = a + child;
                bool ok = true;
                if (q0.cover_basis) {
                    for (const auto& v : cand)
                        if (interval_vector_bound(v, t, a, b) < p.eps0) { ok = false; break; }
                } else {
                    ok = systole_interval_bound_capped(q0, t, a, b, p.eps0) >= p.eps0;
                }
                if (ok) out[i].push_back(a);
            }
        }, threads);
        std::vector<double> next;
        for (auto& chunk : out) next.insert(next.end(), chunk.begin(), chunk.end());
        if (next.empty()) {
            tree.extinct = true;
            tree.extinct_level = m + 1;
            return tree;
        }
        tree.levels.push_back({m + 1, static_cast<long long>(next.size()), next});
        lows = std::move(next);
    }
    double deep_width = p.r * std::pow(static_cast<double>(p.N), -p.depth);
    for (double lo : lows) tree.deepest_midpoints.push_back(lo + deep_width / 2);
    return tree;
}

DimEstimate dim_estimate(const CantorTree& t) {
    if (t.extinct) throw check_failure("dim_estimate undefined: construction went extinct at level " +
                                       std::to_string(t.extinct_level));
    if (t.levels.size() < 2) throw std::domain_error("dim_estimate requires at least two levels");
    double lnN = std::log(static_cast<double>(t.params.N));
    DimEstimate d;
    double min_ratio = 1;
    for (std::size_t m = 0; m + 1 < t.levels.size(); ++m) {
        double ratio = static_cast<double>(t.levels[m + 1].count) /
                       (static_cast<double>(t.params.N) * static_cast<double>(t.levels[m].count));
        min_ratio = std::fmin(min_ratio, ratio);
    }
    d.eta_obs = 1 - min_ratio;
    d.mcmullen_bound = 1 + std::log(1 - d.eta_obs) / lnN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto& lvl : t.levels) {
        if (lvl.count <= 0) continue;
        double x = lvl.m * lnN, y = std::log(static_cast<double>(lvl.count));
        sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
    }
    d.box_dim_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return d;
}

double rotation_angle_for_slope(double slope) { return M_PI / 2 - std::atan(slope); }

BoundedCheck bounded_direction_check(const Surface& q0, double s, double T, double eps,
                                     DirectionMode mode, double t_step) {
    if (T <= 0) throw std::domain_error("bounded_direction_check requires T > 0");
    if (t_step <= 0) throw std::domain_error("bounded_direction_check requires t_step > 0");
    Mat2 X;
    double cond = 1;
    switch (mode) {
        case DirectionMode::Horocycle: X = horocycle(s); break;
        case DirectionMode::Rotation: X = rotation(s); break;
        case DirectionMode::RotationViaFactorization: {
            auto [f, hs] = factor_rotation(s);
            X = horocycle(hs);
            // systole along g_t r_s differs from the horocycle path by at
            // most sqrt(2) * opnorm(f^{-1}) (the conjugates g_t f g_{-t}
            // stay in the t = 0 ball)
            cond = std::sqrt(2.0) * f.inverse().opnorm();
            break;
        }
    }
    BoundedCheck res;
    res.min_systole = 1e300;
    std::pair<long long, long long> hint{0, 0};
    long long steps = static_cast<long long>(std::ceil(T / t_step));
    for (long long i = 0; i <= steps; ++i) {
        double t = std::fmin(T, i * t_step);
        double v = systole_with_hint(q0, geodesic(t) * X, hint).value;
        if (v < res.min_systole) {
            res.min_systole = v;
            res.argmin_t = t;
        }
    }
    if (mode == DirectionMode::RotationViaFactorization) {
        res.threshold_used = eps * cond;
        res.bounded = res.min_systole >= res.threshold_used;
        res.min_systole /= cond;  // certified bound for the rotation path
    } else {
        res.threshold_used = eps;
        res.bounded = res.min_systole >= eps;
    }
    return res;
}

VerifyReport verify_tree(const Surface& q0, const CantorTree& t, int grid_factor) {
    if (grid_factor < 2) throw std::domain_error("verify_tree requires grid_factor >= 2");
    if (t.levels.empty() || t.levels.back().lows.empty())
        throw std::domain_error("verify_tree requires stored intervals");
    const auto& deepest = t.levels.back();
    double width = t.params.r * std::pow(static_cast<double>(t.params.N), -deepest.m);
    std::vector<long long> bad(deepest.lows.size(), 0);
    std::vector<double> mins(deepest.lows.size(), 1e300);
    int threads = get_thread_budget();
    parallel_for(deepest.lows.size(), [&](std::size_t i) {
        double lo = deepest.lows[i];
        std::pair<long long, long long> hint{0, 0};
        for (int k = 1; k <= deepest.m; ++k) {
            double tk = k * t.params.t1;
            for (int g = 0; g <= grid_factor; ++g) {
                double s = lo + width * g / grid_factor;
                double v = systole_with_hint(q0, geodesic(tk) * horocycle(s), hint).value;
                mins[i] = std::fmin(mins[i], v);
                if (v < t.params.eps0 - 1e-9) ++bad[i];
            }
        }
    }, threads);
    VerifyReport rep;
    for (std::size_t i = 0; i < bad.size(); ++i) {
        rep.checked += (grid_factor + 1) * static_cast<long long>(deepest.m);
        rep.violations += bad[i];
        rep.min_seen = std::fmin(rep.min_seen, mins[i]);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Equivalence panel

PanelResult equivalence_panel(int n_quadratic, int n_unbounded, double T, double eps,
                              long long cf_bound, int cf_depth, std::uint64_t seed) {
    PanelResult res;
    Surface torus = make_torus();
    std::mt19937_64 rng(seed);

    auto add_case = [&](const std::string& label, const QuadNumber& slope) {
        PanelCase pc;
        pc.label = label;
        pc.slope = slope.value();
        pc.cf_bounded = is_badly_approximable(slope, cf_bound, cf_depth);
        double theta = rotation_angle_for_slope(slope.value());
        pc.geo_bounded = bounded_direction_check(torus, theta, T, eps, DirectionMode::Rotation).bounded;
        res.cases.push_back(pc);
    };

    // quadratic irrationals with small partial quotients
    const long long ds[] = {2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 26, 29, 31};
    int added = 0;
    for (int guard = 0; guard < 100000 && added < n_quadratic; ++guard) {
        long long d = ds[rng() % (sizeof(ds) / sizeof(ds[0]))];
        long long pp = static_cast<long long>(rng() % 5);
        long long rr = 1 + static_cast<long long>(rng() % 4);
        QuadNumber x = QuadNumber::quadratic(pp, 1, d, rr);
        if (x.value() < 0.05 || x.value() > 20) continue;
        CFExpansion e = cf_expand(x, 60);
        if (e.rational_terminated || e.max_quotient() > 6) continue;
        std::ostringstream os;
        os << "(" << pp << "+sqrt " << d << ")/" << rr;
        add_case(os.str(), x);
        ++added;
    }
    if (added < n_quadratic)
        throw std::logic_error("could not assemble the quadratic side of the panel");

    // rationals and spike-quotient numbers
    int n_rat = n_unbounded * 3 / 5;
    for (int i = 0; i < n_rat; ++i) {
        long long qden = 2 + static_cast<long long>(rng() % 99);
        long long pnum = 1 + static_cast<long long>(rng() % (3 * qden));
        long long g = std::gcd(pnum, qden);
        add_case(std::to_string(pnum / g) + "/" + std::to_string(qden / g),
                 QuadNumber::rational(pnum / g, qden / g));
    }
    for (int i = 0; i < n_unbounded - n_rat; ++i) {
        // [a0; a1, a2, spike, 1, 1, ...] with an early spike quotient
        long long spike = 200 + static_cast<long long>(rng() % 800);
        double x = 1.0;  // tail of ones
        for (int k = 0; k < 12; ++k) x = 1.0 + 1.0 / x;
        x = spike + 1.0 / x;
        x = 1 + static_cast<double>(rng() % 3) + 1.0 / (1 + (rng() % 2) + 1.0 / x);
        add_case("spike_" + std::to_string(spike), QuadNumber::inexact(x));
    }

    int agree = 0;
    for (const auto& pc : res.cases) agree += pc.cf_bounded == pc.geo_bounded ? 1 : 0;
    res.agreement = static_cast<double>(agree) / static_cast<double>(res.cases.size());
    return res;
}

}  // namespace flatlab
