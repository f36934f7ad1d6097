#include "flatlab/cf_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace flatlab {

namespace {

long long isqrt_ll(long long n) {
    if (n < 0) throw std::domain_error("isqrt of negative number");
    long long s = static_cast<long long>(std::sqrt(static_cast<double>(n)));
    while (s > 0 && s * s > n) --s;
    while ((s + 1) * (s + 1) <= n) ++s;
    return s;
}

bool is_square_ll(long long n, long long& root) {
    if (n < 0) return false;
    root = isqrt_ll(n);
    return root * root == n;
}

long long fdiv(long long a, long long b) {
    long long q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

QuadNumber QuadNumber::integer(long long n) { return rational(n, 1); }

QuadNumber QuadNumber::rational(long long num, long long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(std::llabs(num), den);
    if (g > 1) { num /= g; den /= g; }
    QuadNumber x;
    x.p = num; x.q = 0; x.d = 0; x.r = den;
    x.exact = true;
    x.approx = static_cast<double>(num) / static_cast<double>(den);
    return x;
}

QuadNumber QuadNumber::quadratic(long long p, long long q, long long d, long long r) {
    if (r == 0) throw std::domain_error("quadratic number with zero denominator");
    if (d < 0) throw std::domain_error("negative radicand");
    long long root = 0;
    if (q == 0 || d == 0 || is_square_ll(d, root)) {
        // collapses to a rational
        long long num = p + q * root;
        return rational(num, r);
    }
    QuadNumber x;
    x.p = p; x.q = q; x.d = d; x.r = r;
    x.exact = true;
    x.approx = (static_cast<double>(p) + static_cast<double>(q) * std::sqrt(static_cast<double>(d))) /
               static_cast<double>(r);
    return x;
}

QuadNumber QuadNumber::inexact(double v) {
    QuadNumber x;
    x.exact = false;
    x.approx = v;
    return x;
}

bool QuadNumber::is_rational() const { return exact && q == 0; }

long long CFExpansion::max_quotient() const {
    long long m = 0;
    for (long long a : partial_quotients) m = std::max(m, a);
    return m;
}

namespace {

CFExpansion cf_expand_rational(long long num, long long den, int depth) {
    CFExpansion e;
    e.exact = true;
    e.rational_terminated = true;
    long long a = fdiv(num, den);
    e.a0 = a;
    long long rem = num - a * den;
    // now 0 <= rem < den; continue Euclid on den/rem
    int k = 0;
    while (rem != 0 && k < depth) {
        long long nn = den, dd = rem;
        a = nn / dd;  // both positive
        e.partial_quotients.push_back(a);
        den = dd;
        rem = nn - a * dd;
        num = nn;
        ++k;
    }
    return e;
}

// Continued fraction of (P + sqrt(D))/Q via the integer PQa recursion.
// Requires D > 0 non-square and Q | (D - P^2); both arranged by the caller.
CFExpansion cf_expand_pqa(long long P, long long D, long long Q, int depth) {
    CFExpansion e;
    e.exact = true;
    long long s = isqrt_ll(D);
    std::map<std::pair<long long, long long>, std::size_t> seen;
    for (int k = 0; k <= depth; ++k) {
        if (k > 0) {
            auto key = std::make_pair(P, Q);
            auto it = seen.find(key);
            if (it != seen.end()) {
                e.periodic = true;
                e.period_start = it->second;
                e.period_length = static_cast<std::size_t>(k - 1) - it->second;
                // keep emitting quotients up to depth by cycling the period
                while (static_cast<int>(e.partial_quotients.size()) < depth) {
                    std::size_t idx = e.period_start +
                        (e.partial_quotients.size() - e.period_start) % e.period_length;
                    e.partial_quotients.push_back(e.partial_quotients[idx]);
                }
                return e;
            }
            seen.emplace(key, static_cast<std::size_t>(k - 1));
        }
        long long m = P + s;  // numerator interval is (m, m+1), sqrt(D) irrational
        long long a;
        if (Q > 0) {
            a = fdiv(m, Q);
        } else {
            a = (m % Q == 0) ? m / Q - 1 : fdiv(m, Q);
        }
        if (k == 0) e.a0 = a;
        else e.partial_quotients.push_back(a);
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    return e;
}

CFExpansion cf_expand_double(double x, int depth) {
    CFExpansion e;
    if (!std::isfinite(x)) throw std::domain_error("cf_expand of non-finite value");
    double a = std::floor(x);
    e.a0 = static_cast<long long>(a);
    double frac = x - a;
    // q_k tracks the convergent denominator; quotients are unreliable once
    // q_k^2 approaches 2^53.
    double qkm1 = 0, qk = 1;
    for (int k = 0; k < depth; ++k) {
        if (frac < 1e-15) { e.rational_terminated = true; break; }
        if (qk * qk > 9.0e15) { e.precision_exhausted = true; break; }
        x = 1.0 / frac;
        a = std::floor(x);
        long long ai = static_cast<long long>(a);
        if (ai < 1) ai = 1;
        e.partial_quotients.push_back(ai);
        double qnext = a * qk + qkm1;
        qkm1 = qk;
        qk = qnext;
        frac = x - a;
    }
    return e;
}

}  // namespace

CFExpansion cf_expand(const QuadNumber& x, int depth) {
    if (depth < 1) throw std::domain_error("cf_expand requires depth >= 1");
    if (!x.exact) return cf_expand_double(x.approx, depth);
    if (x.is_rational()) return cf_expand_rational(x.p, x.r, depth);
    // (p + q sqrt d)/r -> (P + sqrt D)/Q with Q | (D - P^2)
    long long P, D, Q;
    if (x.q > 0) {
        P = x.p; D = x.q * x.q * x.d; Q = x.r;
    } else {
        P = -x.p; D = x.q * x.q * x.d; Q = -x.r;
    }
    if ((D - P * P) % Q != 0) {
        long long m = std::llabs(Q);
        P *= m; D *= m * m; Q *= m;
    }
    return cf_expand_pqa(P, D, Q, depth);
}

CFExpansion cf_expand(double x, int depth) {
    if (depth < 1) throw std::domain_error("cf_expand requires depth >= 1");
    return cf_expand_double(x, depth);
}

bool is_badly_approximable(const QuadNumber& x, long long bound, int depth) {
    if (depth < 10) throw std::domain_error("is_badly_approximable requires depth >= 10");
    CFExpansion e = cf_expand(x, depth);
    if (e.rational_terminated) return false;
    for (long long a : e.partial_quotients)
        if (a > bound) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Lattice reduction

namespace {

double norm2(double x, double y) { return x * x + y * y; }

}  // namespace

Basis2 gauss_reduce(const Basis2& b) {
    double x1 = b.x1, y1 = b.y1, x2 = b.x2, y2 = b.y2;
    if (norm2(x2, y2) < norm2(x1, y1)) { std::swap(x1, x2); std::swap(y1, y2); }
    for (int iter = 0; iter < 256; ++iter) {
        double mu = std::round((x1 * x2 + y1 * y2) / norm2(x1, y1));
        x2 -= mu * x1;
        y2 -= mu * y1;
        if (norm2(x2, y2) < norm2(x1, y1)) { std::swap(x1, x2); std::swap(y1, y2); }
        else break;
    }
    return {x1, y1, x2, y2};
}

ShortestVector shortest_vector(const Basis2& b) {
    double det = b.det();
    if (std::fabs(det) < 1e-9)
        throw std::domain_error("shortest_vector: degenerate basis (det ~ 0)");
    Basis2 r = gauss_reduce(b);

    // Euclidean-shortest is r.v1 after reduction; keep the neighborhood check.
    double best_euc2 = norm2(r.x1, r.y1);
    const double cand[4][2] = {{r.x1, r.y1}, {r.x2, r.y2},
                               {r.x1 + r.x2, r.y1 + r.y2}, {r.x1 - r.x2, r.y1 - r.y2}};
    for (auto& c : cand) best_euc2 = std::min(best_euc2, norm2(c[0], c[1]));

    double best_max = std::fmax(std::fabs(r.x1), std::fabs(r.y1));
    for (auto& c : cand)
        best_max = std::fmin(best_max, std::fmax(std::fabs(c[0]), std::fabs(c[1])));

    // Exhaustive sweep of the Euclidean ball certified to contain every
    // max-norm competitor: |w|_2 <= sqrt(2) * best_max.
    double R = std::sqrt(2.0) * best_max * (1 + 1e-12);
    double l1 = std::sqrt(norm2(r.x1, r.y1)), l2 = std::sqrt(norm2(r.x2, r.y2));
    long long amax = static_cast<long long>(std::floor(R * l2 / std::fabs(det))) + 1;
    long long bmax = static_cast<long long>(std::floor(R * l1 / std::fabs(det))) + 1;
    Holonomy best_vec = canonical(r.x1, r.y1);
    best_max = best_vec.length();
    for (long long a = -amax; a <= amax; ++a) {
        for (long long bb = -bmax; bb <= bmax; ++bb) {
            if (a == 0 && bb == 0) continue;
            double wx = a * r.x1 + bb * r.x2;
            double wy = a * r.y1 + bb * r.y2;
            double m = std::fmax(std::fabs(wx), std::fabs(wy));
            Holonomy h = canonical(wx, wy);
            if (m < best_max || (m == best_max && holonomy_less(h, best_vec))) {
                best_max = m;
                best_vec = h;
            }
            best_euc2 = std::min(best_euc2, norm2(wx, wy));
        }
    }
    return {best_vec, best_max, std::sqrt(best_euc2)};
}

// ---------------------------------------------------------------------------
// Number literal parser

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;

    void skip_ws() { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; }
    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    bool eat_word(const std::string& w) {
        skip_ws();
        if (s.compare(i, w.size(), w) == 0) { i += w.size(); return true; }
        return false;
    }
    bool done() {
        skip_ws();
        return i == s.size();
    }
};

long long parse_int(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.i;
    if (c.i < c.s.size() && (c.s[c.i] == '+' || c.s[c.i] == '-')) ++c.i;
    std::size_t digits = 0;
    while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) { ++c.i; ++digits; }
    if (digits == 0) throw std::invalid_argument("expected integer in number literal");
    return std::stoll(c.s.substr(start, c.i - start));
}

// term := [int '*'] 'sqrt' int | int   (returns coefficients (a, b, d): a + b*sqrt(d))
void parse_term(Cursor& c, long long& a, long long& b, long long& d) {
    c.skip_ws();
    if (c.eat_word("sqrt")) {
        if (c.eat('(')) { d = parse_int(c); if (!c.eat(')')) throw std::invalid_argument("expected ')'"); }
        else d = parse_int(c);
        a = 0; b = 1;
        return;
    }
    long long n = parse_int(c);
    c.skip_ws();
    if (c.eat('*')) {
        if (!c.eat_word("sqrt")) throw std::invalid_argument("expected 'sqrt' after '*'");
        if (c.eat('(')) { d = parse_int(c); if (!c.eat(')')) throw std::invalid_argument("expected ')'"); }
        else d = parse_int(c);
        a = 0; b = n;
        return;
    }
    a = n; b = 0; d = 0;
}

}  // namespace

QuadNumber parse_number(const std::string& text) {
    // decimals (contain '.', 'e' exponents) are treated as inexact doubles
    bool has_dot = text.find('.') != std::string::npos;
    if (has_dot) {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos != text.size()) throw std::invalid_argument("bad decimal literal: " + text);
        return QuadNumber::inexact(v);
    }

    Cursor c{text};
    c.skip_ws();
    long long p = 0, q = 0, d = 0, r = 1;
    if (c.eat('(')) {
        long long a1, b1, d1;
        parse_term(c, a1, b1, d1);
        p = a1; q = b1; d = d1;
        c.skip_ws();
        while (!c.eat(')')) {
            int sign = 1;
            if (c.eat('+')) sign = 1;
            else if (c.eat('-')) sign = -1;
            else throw std::invalid_argument("expected '+', '-' or ')' in number literal");
            long long a2, b2, d2;
            parse_term(c, a2, b2, d2);
            if (b2 != 0) {
                if (q != 0 && d != d2) throw std::invalid_argument("mixed radicands not supported");
                if (b2 != 0) d = d2;
                q += sign * b2;
            }
            p += sign * a2;
        }
        if (c.eat('/')) r = parse_int(c);
    } else {
        long long a1, b1, d1;
        parse_term(c, a1, b1, d1);
        p = a1; q = b1; d = d1;
        if (c.eat('/')) r = parse_int(c);
    }
    if (!c.done()) throw std::invalid_argument("trailing characters in number literal: " + text);
    if (q == 0) return QuadNumber::rational(p, r);
    return QuadNumber::quadratic(p, q, d, r);
}

}  // namespace flatlab
