#include "flatlab/flows.hpp"

#include <algorithm>
#include <stdexcept>

namespace flatlab {

Mat2 identity_mat() { return Mat2{}; }

double Mat2::maxnorm() const {
    return std::max({std::fabs(a11), std::fabs(a12), std::fabs(a21), std::fabs(a22)});
}

double Mat2::opnorm() const {
    // Eigenvalues of A^T A are (T +/- sqrt(T^2 - 4 D)) / 2 with
    // T = sum of squared entries and D = det(A)^2.
    double t = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
    double d = det();
    double disc = t * t - 4 * d * d;
    if (disc < 0) disc = 0;
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

Holonomy canonical(double x, double y) {
    if (y < 0 || (y == 0 && x < 0)) {
        x = -x;
        y = -y;
    }
    if (y == 0) y = 0.0;  // normalize -0.0
    if (x == 0) x = 0.0;
    return {x, y};
}

bool holonomy_less(const Holonomy& a, const Holonomy& b) {
    double la = a.length(), lb = b.length();
    if (la != lb) return la < lb;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

Mat2 geodesic(double t) {
    double e = std::exp(t / 2);
    return {e, 0, 0, 1 / e};
}

Mat2 horocycle(double s) { return {1, s, 0, 1}; }

Mat2 rotation(double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

Mat2 lower(double a, double b) {
    if (a == 0) throw std::domain_error("lower(a, b) requires a != 0");
    return {a, 0, b, 1 / a};
}

Holonomy act(const Mat2& A, const Holonomy& v) {
    return canonical(A.a11 * v.x + A.a12 * v.y, A.a21 * v.x + A.a22 * v.y);
}

std::pair<Mat2, double> factor_rotation(double theta) {
    double c = std::cos(theta);
    if (std::fabs(c) < 1e-9)
        throw std::domain_error("factor_rotation degenerates near theta = pi/2 + k pi");
    double s = std::sin(theta);
    Mat2 f{c, 0, s, 1 / c};
    return {f, -s / c};
}

double conj_orbit_bound(const Mat2& b, double t_max) {
    if (!b.is_lower_triangular())
        throw std::domain_error("conj_orbit_bound requires b in B (lower triangular)");
    if (std::fabs(b.det() - 1) > 1e-9)
        throw std::domain_error("conj_orbit_bound requires det(b) = 1");
    if (t_max < 0) throw std::domain_error("conj_orbit_bound requires t_max >= 0");
    // Entries over t in [0, t_max]: (a, beta e^{-t}, 1/a); sup at t = 0.
    return std::max({std::fabs(b.a11), std::fabs(b.a22), std::fabs(b.a21)});
}

}  // namespace flatlab
