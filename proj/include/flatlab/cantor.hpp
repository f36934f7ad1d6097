#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flatlab/cf_oracle.hpp"
#include "flatlab/flows.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

struct CantorParams {
    double r = 0.3;     // initial interval J = [0, r]
    double eps = 0.1;   // K' = K_eps, requires q0 in K_eps
    double eps0 = 0;    // K'' subset of K_eps0; eps0 = eps / (1 + r)
    double rho0 = 0.1;  // configured rho_0
    double eta = 0.5;   // target survival deficit
    double t1 = 0;      // enlarged so N = e^{t1} is an integer >= 2
    long long N = 0;
    int depth = 6;
};

// eps0 = eps/(1+r); t1 = 2 ln(2 rho0 / (eps0 r)) enlarged to ln(ceil(e^{t1})).
// Requires systole(q0) >= eps (error names the witness vector).
CantorParams derive_params(const Surface& q0, double eps, double eta, double r,
                           double rho0 = 0.1, int depth = 6);

struct StretchCertificate {
    bool ok = true;
    Holonomy violator;
};

// True iff for every saddle connection, sup over s in [0, r] of
// |x(delta, g_{t1} h_s q)| >= rho0 (endpoint evaluation, exact over a
// certified candidate set). Precondition: every connection has length
// >= eps0; violating vector reported in the error.
StretchCertificate certify_stretch(const Surface& q, double t1, double r, double rho0, double eps0);

// Subdivides [interval.first, interval.second) into N equal parts and keeps
// those certified to satisfy systole(g_{(m+1) t1} h_s q0) >= eps0 for all s.
std::vector<std::pair<double, double>> survivors(const Surface& q0,
                                                 std::pair<double, double> interval, int m,
                                                 const CantorParams& p);

struct CantorLevel {
    int m = 0;
    long long count = 0;
    std::vector<double> lows;  // interval lower endpoints, width r N^{-m}
};

struct CantorTree {
    CantorParams params;
    std::string surface;
    std::vector<CantorLevel> levels;
    std::vector<double> deepest_midpoints;
    bool extinct = false;
    int extinct_level = -1;
};

// Iterates `survivors` to params.depth; M_m recorded per level. Extinction
// is a reportable outcome (tree.extinct), not an exception.
CantorTree construct(const Surface& q0, const CantorParams& p);

struct DimEstimate {
    double mcmullen_bound = 0;  // 1 + ln(1 - eta_obs)/ln N
    double box_dim_fit = 0;     // least-squares slope of ln M_m against m ln N
    double eta_obs = 0;         // 1 - min_m M_{m+1}/(N M_m)
};

DimEstimate dim_estimate(const CantorTree& t);

enum class DirectionMode { Horocycle, Rotation, RotationViaFactorization };

struct BoundedCheck {
    bool bounded = false;
    double min_systole = 0;   // certified for the requested mode
    double threshold_used = 0;
    double argmin_t = 0;
};

// Grid check of inf over t in [0, T] of systole(q0, geodesic(t) * X) >= eps,
// X = horocycle(s), rotation(s), or the horocycle factor of rotation(s) with
// the threshold adjusted by the condition factor of f(s).
BoundedCheck bounded_direction_check(const Surface& q0, double s, double T, double eps,
                                     DirectionMode mode, double t_step = 0.05);

struct VerifyReport {
    long long checked = 0;
    long long violations = 0;
    double min_seen = 1e300;
};

// Re-verification pass: samples each surviving deepest interval on a grid
// `grid_factor` times finer than the interval and checks
// systole(g_{k t1} h_s q0) >= eps0 - 1e-9 for every k <= depth.
VerifyReport verify_tree(const Surface& q0, const CantorTree& t, int grid_factor);

struct PanelCase {
    std::string label;
    double slope = 0;
    bool cf_bounded = false;
    bool geo_bounded = false;
};

struct PanelResult {
    std::vector<PanelCase> cases;
    double agreement = 0;
};

// Direction panel comparing bounded_direction_check against the
// continued-fraction route: quadratic irrational slopes on one side,
// rationals and spike-quotient numbers on the other.
PanelResult equivalence_panel(int n_quadratic, int n_unbounded, double T, double eps,
                              long long cf_bound, int cf_depth, std::uint64_t seed);

// Rotation angle whose vertical flow follows the given slope direction.
double rotation_angle_for_slope(double slope);

}  // namespace flatlab
