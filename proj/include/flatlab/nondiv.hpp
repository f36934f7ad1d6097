#pragma once

#include <string>
#include <vector>

#include "flatlab/flows.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

struct NondivParams {
    double rho = 0.1;
    double rho0 = 0.1;
    std::vector<double> eps_list;
    double s_lo = 0, s_hi = 1;
    long long sample_count = 4000;
    Mat2 post;  // applied after h_s (diagonal geodesic push); identity = literal arc
};

struct HypothesisCheck {
    bool ok = true;
    Holonomy violator;
};

// Exact check of the arc condition: for every saddle connection,
// sup over s in [s_lo, s_hi] of l(h_s q, delta) >= rho. The sup of the
// max-norm over s is attained at an interval endpoint (affine x-component),
// so the check is exact over a certified candidate set.
HypothesisCheck check_hypothesis(const Surface& q, double s_lo, double s_hi, double rho);

// Lebesgue measure of { s in I : systole(q, post * h_s) < eps }, estimated
// on a grid of `samples` cells with bisection refinement at the boundary
// crossings; absolute accuracy about |I|/samples.
double bad_measure(const Surface& q, double s_lo, double s_hi, double eps, long long samples,
                   const Mat2& post = {});

struct DecayFit {
    double alpha_hat = 0;
    double C_hat = 0;
    double residual = 0;
    std::vector<double> eps;
    std::vector<double> measures;
    std::vector<double> predicted;
};

// Sweeps eps over params.eps_list, fits measure ~ C (eps/rho)^alpha |I| by
// least squares on the positive measures. Throws check_failure when fewer
// than two sweep points have positive measure. The hypothesis is verified
// first on the arc equivalent to the pushed frame.
DecayFit fit_decay(const Surface& q, const NondivParams& params);

std::string nondiv_csv(const DecayFit& f);

}  // namespace flatlab
