#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatlab/flows.hpp"

namespace flatlab {

// A number of the form (p + q*sqrt(d))/r, kept exact when constructed from
// integers. exact = false means only the double approximation is trustworthy.
struct QuadNumber {
    long long p = 0, q = 0, d = 0, r = 1;
    bool exact = true;
    double approx = 0;

    static QuadNumber integer(long long n);
    static QuadNumber rational(long long num, long long den);
    static QuadNumber quadratic(long long p, long long q, long long d, long long r);
    static QuadNumber inexact(double x);

    bool is_rational() const;
    double value() const { return approx; }
};

struct CFExpansion {
    long long a0 = 0;
    std::vector<long long> partial_quotients;  // all >= 1
    bool exact = false;                // computed with exact integer arithmetic
    bool rational_terminated = false;  // input was rational, expansion is finite
    bool precision_exhausted = false;  // double input ran out of mantissa
    bool periodic = false;             // a repeated state was found (quadratic input)
    std::size_t period_start = 0, period_length = 0;

    long long max_quotient() const;
};

// Standard continued-fraction algorithm; exact integer arithmetic for
// rationals and quadratic irrationals, floating point otherwise.
CFExpansion cf_expand(const QuadNumber& x, int depth);
CFExpansion cf_expand(double x, int depth);

// True iff every computed partial quotient beyond a0 is <= bound.
// Rational inputs (finite expansions) are not badly approximable.
bool is_badly_approximable(const QuadNumber& x, long long bound, int depth);

// Unimodular plane basis (columns v1, v2).
struct Basis2 {
    double x1 = 1, y1 = 0;
    double x2 = 0, y2 = 1;

    double det() const { return x1 * y2 - x2 * y1; }
    static Basis2 columns_of(const Mat2& a) { return {a.a11, a.a21, a.a12, a.a22}; }
};

struct ShortestVector {
    Holonomy vector;  // max-norm minimizer, canonical sign
    double maxnorm = 0;
    double eucnorm = 0;  // Euclidean norm of the Euclidean-shortest vector
};

// Lagrange-Gauss reduction plus an exhaustive sweep of the certified
// Euclidean ball; both the Euclidean and max-norm minima are exact.
ShortestVector shortest_vector(const Basis2& b);

// Gauss-reduced basis (|v1| <= |v2|, |v1.v2| <= |v1|^2 / 2), signs preserved.
Basis2 gauss_reduce(const Basis2& b);

// Number literal grammar: "123", "-5/7", "sqrt 5", "2*sqrt 5",
// "(1+sqrt 5)/2", "(3-2*sqrt 7)/4", or a decimal like "1.618" (inexact).
QuadNumber parse_number(const std::string& text);

}  // namespace flatlab
