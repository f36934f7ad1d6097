#include "flatlab/nondiv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "flatlab/util.hpp"

namespace flatlab {

namespace {

double sup_over_interval(const Holonomy& v, double s_lo, double s_hi) {
    double e1 = std::fmax(std::fabs(v.x + s_lo * v.y), std::fabs(v.y));
    double e2 = std::fmax(std::fabs(v.x + s_hi * v.y), std::fabs(v.y));
    return std::fmax(e1, e2);  // affine in s: sup attained at an endpoint
}

}  // namespace

HypothesisCheck check_hypothesis(const Surface& q, double s_lo, double s_hi, double rho) {
    if (rho <= 0) throw std::domain_error("check_hypothesis requires rho > 0");
    if (s_lo >= s_hi) throw std::domain_error("check_hypothesis requires a nonempty interval");
    HypothesisCheck res;
    if (q.cover_basis) {
        double slack = (s_hi - s_lo) * rho;
        scan_lattice_box(q, horocycle(s_lo), -(rho + slack), rho + slack, -rho, rho,
                         200'000'000ull, [&](const Holonomy& v) {
                             if (sup_over_interval(v, s_lo, s_hi) < rho) {
                                 res.ok = false;
                                 res.violator = canonical(v.x, v.y);
                             }
                         });
        return res;
    }
    double op = std::fmax(horocycle(s_lo).opnorm(), horocycle(s_hi).opnorm());
    SaddleSet set = enumerate_saddles(q, std::sqrt(2.0) * rho * op * (1 + 1e-9));
    for (const auto& e : set.vectors) {
        if (sup_over_interval(e.v, s_lo, s_hi) < rho) {
            res.ok = false;
            res.violator = e.v;
        }
    }
    return res;
}

double bad_measure(const Surface& q, double s_lo, double s_hi, double eps, long long samples,
                   const Mat2& post) {
    if (eps <= 0) throw std::domain_error("bad_measure requires eps > 0");
    if (samples < 1000) throw std::domain_error("bad_measure requires samples >= 1000");
    if (s_lo >= s_hi) throw std::domain_error("bad_measure requires a nonempty interval");

    long long n = samples;
    double step = (s_hi - s_lo) / static_cast<double>(n);
    std::vector<double> margin(static_cast<std::size_t>(n) + 1);

    auto systole_at = [&](double s, std::pair<long long, long long>& hint) {
        return systole_with_hint(q, post * horocycle(s), hint).value;
    };

    int threads = get_thread_budget();
    long long chunk = std::max<long long>(1, (n + 1 + threads - 1) / threads);
    std::size_t nchunks = static_cast<std::size_t>((n + 1 + chunk - 1) / chunk);
    parallel_for(nchunks, [&](std::size_t ci) {
        long long i0 = static_cast<long long>(ci) * chunk;
        long long i1 = std::min<long long>(n + 1, i0 + chunk);
        std::pair<long long, long long> hint{0, 0};
        for (long long i = i0; i < i1; ++i)
            margin[static_cast<std::size_t>(i)] = systole_at(s_lo + i * step, hint) - eps;
    }, threads);

    double measure = 0;
    std::pair<long long, long long> hint{0, 0};
    for (long long i = 0; i < n; ++i) {
        double fa = margin[static_cast<std::size_t>(i)];
        double fb = margin[static_cast<std::size_t>(i + 1)];
        double a = s_lo + i * step, b = a + step;
        if (fa < 0 && fb < 0) {
            measure += step;
        } else if ((fa < 0) != (fb < 0)) {
            // bisect the crossing of systole - eps
            double x0 = a, x1 = b, f0 = fa;
            for (int it = 0; it < 40 && (x1 - x0) > step * 1e-6; ++it) {
                double xm = 0.5 * (x0 + x1);
                double fm = systole_at(xm, hint) - eps;
                if ((fm < 0) == (f0 < 0)) { x0 = xm; f0 = fm; }
                else x1 = xm;
            }
            double crossing = 0.5 * (x0 + x1);
            measure += (fa < 0) ? (crossing - a) : (b - crossing);
        }
    }
    return measure;
}

DecayFit fit_decay(const Surface& q, const NondivParams& params) {
    if (params.eps_list.empty()) throw std::domain_error("fit_decay requires an eps sweep");
    if (params.rho <= 0 || params.rho > params.rho0)
        throw std::domain_error("fit_decay requires 0 < rho <= rho0");
    for (double e : params.eps_list)
        if (e <= 0 || e > params.rho)
            throw std::domain_error("fit_decay requires 0 < eps <= rho for every swept eps");

    // Hypothesis on the arc equivalent to the pushed frame: for diagonal
    // post = diag(d1, d2), post h_s = h_{s d1/d2} post, so the instance is
    // (post q, scaled interval, rho).
    if (std::fabs(params.post.a12) > 1e-12 || std::fabs(params.post.a21) > 1e-12)
        throw std::invalid_argument("fit_decay: post must be diagonal (a geodesic push)");
    double stretch = params.post.a11 / params.post.a22;
    Surface pushed = q.transformed(params.post);
    double a0 = params.s_lo * stretch, a1 = params.s_hi * stretch;
    if (a0 > a1) std::swap(a0, a1);
    HypothesisCheck hc = check_hypothesis(pushed, a0, a1, params.rho);
    if (!hc.ok) {
        std::ostringstream os;
        os << "nondivergence hypothesis fails at rho = " << format_double(params.rho)
           << ": sup over I of l(h_s q, delta) < rho for delta = ["
           << format_double(hc.violator.x) << ", " << format_double(hc.violator.y) << "]";
        throw check_failure(os.str());
    }

    DecayFit fit;
    fit.eps = params.eps_list;
    for (double e : params.eps_list)
        fit.measures.push_back(
            bad_measure(q, params.s_lo, params.s_hi, e, params.sample_count, params.post));

    double len = params.s_hi - params.s_lo;
    std::vector<std::pair<double, double>> pts;  // (ln eps/rho, ln measure)
    for (std::size_t i = 0; i < fit.eps.size(); ++i)
        if (fit.measures[i] > 0)
            pts.push_back({std::log(fit.eps[i] / params.rho), std::log(fit.measures[i])});
    if (pts.size() < 2)
        throw check_failure("degenerate fit: fewer than two positive bad measures "
                            "(eps sweep entirely below the systole range)");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
    double m = static_cast<double>(pts.size());
    double denom = m * sxx - sx * sx;
    if (std::fabs(denom) < 1e-14) throw check_failure("degenerate fit: eps values coincide");
    fit.alpha_hat = (m * sxy - sx * sy) / denom;
    double intercept = (sy - fit.alpha_hat * sx) / m;
    fit.C_hat = std::exp(intercept) / len;
    double rss = 0;
    for (auto [x, y] : pts) {
        double yhat = intercept + fit.alpha_hat * x;
        rss += (y - yhat) * (y - yhat);
    }
    fit.residual = std::sqrt(rss / m);
    for (std::size_t i = 0; i < fit.eps.size(); ++i)
        fit.predicted.push_back(fit.C_hat * std::pow(fit.eps[i] / params.rho, fit.alpha_hat) * len);
    return fit;
}

std::string nondiv_csv(const DecayFit& f) {
    std::ostringstream os;
    os << "eps,bad_measure,predicted\n";
    for (std::size_t i = 0; i < f.eps.size(); ++i)
        os << format_double(f.eps[i]) << "," << format_double(f.measures[i]) << ","
           << format_double(f.predicted[i]) << "\n";
    return os.str();
}

}  // namespace flatlab
