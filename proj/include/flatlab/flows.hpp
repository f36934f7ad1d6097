#pragma once

#include <cmath>
#include <utility>

namespace flatlab {

// An element of SL(2,R). Stored in full generality so products such as
// g_{t1} h_s g_{t0} are first-class values.
struct Mat2 {
    double a11 = 1, a12 = 0;
    double a21 = 0, a22 = 1;

    double det() const { return a11 * a22 - a12 * a21; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    Mat2 inverse() const {
        double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    // Largest entry in absolute value.
    double maxnorm() const;

    // Spectral norm, from the singular values of a 2x2 matrix.
    double opnorm() const;

    bool is_lower_triangular(double tol = 1e-12) const { return std::fabs(a12) <= tol; }
};

Mat2 identity_mat();

// A plane vector identified with its negative; the holonomy (x, y) of a
// saddle connection. Canonical representative: y > 0, or y = 0 and x > 0.
struct Holonomy {
    double x = 0, y = 0;

    double length() const { return std::fmax(std::fabs(x), std::fabs(y)); }  // max-norm
    double eucnorm() const { return std::hypot(x, y); }

    bool operator==(const Holonomy& o) const { return x == o.x && y == o.y; }
};

Holonomy canonical(double x, double y);

// Ordering used for deterministic output: by length, then x, then y.
bool holonomy_less(const Holonomy& a, const Holonomy& b);

// g_t = diag(e^{t/2}, e^{-t/2})
Mat2 geodesic(double t);

// h_s = [[1, s], [0, 1]]
Mat2 horocycle(double s);

// r_theta = [[cos, -sin], [sin, cos]]
Mat2 rotation(double theta);

// [[a, 0], [b, 1/a]], an element of B. Throws std::domain_error for a = 0.
Mat2 lower(double a, double b);

// Canonical representative of +/- A (x, y)^T.
Holonomy act(const Mat2& A, const Holonomy& v);

// Factors r_theta = f * h_s with f in B: s = -tan(theta),
// f = [[cos, 0], [sin, 1/cos]]. Throws std::domain_error when |cos| < 1e-9.
std::pair<Mat2, double> factor_rotation(double theta);

// sup over t in [0, t_max] of the max-norm of g_t b g_{-t} for b in B.
// For b = [[a,0],[beta,1/a]] the conjugate is [[a,0],[beta e^{-t},1/a]],
// so the sup is max(|a|, 1/|a|, |beta|), attained at t = 0.
double conj_orbit_bound(const Mat2& b, double t_max);

}  // namespace flatlab
