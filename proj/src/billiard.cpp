#include "flatlab/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "flatlab/cantor.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/util.hpp"

namespace flatlab {

double unfolding_rotation_angle(double theta) { return M_PI / 2 - theta; }

namespace {

struct TableData {
    int n = 0;
    int N = 1;                       // dihedral order 2N
    std::vector<int> lambda;         // group index of reflection across edge i
    std::vector<Vec2> edge_dir;      // unit edge directions
    std::vector<double> edge_len;
    double diam = 0;
    double scale = 1;
};

TableData table_data(const PolygonSpec& P) {
    P.validate();
    TableData td;
    td.n = static_cast<int>(P.vertices.size());
    long long N = 1;
    for (const auto& a : P.angles) N = std::lcm(N, a.q);
    td.N = static_cast<int>(N);
    std::vector<int> kdir(td.n);
    kdir[0] = 0;
    for (int i = 1; i < td.n; ++i) {
        long long turn = N - P.angles[i].p * (N / P.angles[i].q);
        kdir[i] = static_cast<int>(((kdir[i - 1] + turn) % N + N) % N);
    }
    td.lambda.resize(td.n);
    for (int i = 0; i < td.n; ++i) td.lambda[i] = td.N + kdir[i];
    td.edge_dir.resize(td.n);
    td.edge_len.resize(td.n);
    for (int i = 0; i < td.n; ++i) {
        Vec2 e = P.vertices[(i + 1) % td.n] - P.vertices[i];
        td.edge_len[i] = e.norm();
        td.edge_dir[i] = e * (1 / td.edge_len[i]);
        td.scale = std::fmax(td.scale, std::fmax(std::fabs(P.vertices[i].x), std::fabs(P.vertices[i].y)));
    }
    for (int i = 0; i < td.n; ++i)
        for (int j = i + 1; j < td.n; ++j)
            td.diam = std::fmax(td.diam, (P.vertices[i] - P.vertices[j]).norm());
    return td;
}

Vec2 reflect_dir(const Vec2& d, const Vec2& axis_unit) {
    double p = d.dot(axis_unit);
    return {2 * p * axis_unit.x - d.x, 2 * p * axis_unit.y - d.y};
}

// Outgoing direction and sheet word for a passage through vertex v
// (interior angle pi/q). The straight continuation on the unfolded surface
// folds to the unique image of d under the local dihedral group that points
// strictly into the corner wedge.
struct CornerPassage {
    Vec2 out;
    std::vector<int> word;  // edge indices of the micro-bounces, in order
    bool ok = false;
};

CornerPassage pass_corner(const PolygonSpec& P, const TableData& td, int v, const Vec2& d) {
    int n = td.n;
    int e_out = v;                  // edge leaving v
    int e_in = (v + n - 1) % n;     // edge arriving at v
    Vec2 w1 = td.edge_dir[e_out];
    Vec2 w2 = td.edge_dir[e_in] * -1.0;
    long long q = P.angles[v].q;

    CornerPassage best;
    auto inside = [&](const Vec2& x) {
        return w1.cross(x) > 1e-12 && x.cross(w2) > 1e-12;
    };
    for (int first : {e_out, e_in}) {
        Vec2 cur = d;
        std::vector<int> word;
        for (long long k = 0; k < 2 * q; ++k) {
            int e = (k % 2 == 0) ? first : (first == e_out ? e_in : e_out);
            cur = reflect_dir(cur, td.edge_dir[e]);
            word.push_back(e);
            if (inside(cur)) {
                if (best.ok) {
                    // identical linear images give identical sheet words under
                    // the local-to-global homomorphism; keep the first
                    if ((cur - best.out).norm() > 1e-9) best.ok = false;
                    return best;
                }
                best.out = cur;
                best.word = word;
                best.ok = true;
                break;
            }
        }
    }
    return best;
}

}  // namespace

Trajectory billiard_flow(const PolygonSpec& P, const BilliardState& start, double theta, double T) {
    if (T <= 0) throw std::domain_error("billiard_flow requires T > 0");
    TableData td = table_data(P);
    const double eps_len = 1e-12 * td.scale;
    const double corner_tol = 1e-12 * td.scale;

    Trajectory tr;
    Vec2 p = start.position;
    Vec2 d{std::cos(theta), std::sin(theta)};
    int sheet = start.sheet;
    double t = start.time;
    double t_end = start.time + T;

    for (std::uint64_t step = 0; step < 10'000'000; ++step) {
        // earliest positive edge crossing
        double best_tau = 1e300;
        int best_edge = -1;
        double best_s = 0;
        for (int i = 0; i < td.n; ++i) {
            Vec2 A = P.vertices[i];
            Vec2 AB = P.vertices[(i + 1) % td.n] - A;
            double denom = d.cross(AB);
            if (std::fabs(denom) < 1e-15 * td.edge_len[i]) continue;
            Vec2 AP = A - p;
            double tau = AP.cross(AB) / denom;
            double s = AP.cross(d) / denom;
            if (tau <= eps_len) continue;
            if (s < -1e-12 || s > 1 + 1e-12) continue;
            if (tau < best_tau) { best_tau = tau; best_edge = i; best_s = s; }
        }
        if (best_edge < 0) throw std::logic_error("billiard ray found no boundary crossing");

        if (t + best_tau >= t_end) {
            p = p + d * (t_end - t);
            t = t_end;
            break;
        }
        p = p + d * best_tau;
        t += best_tau;

        // vertex proximity
        int vtx = -1;
        Vec2 A = P.vertices[best_edge];
        Vec2 B = P.vertices[(best_edge + 1) % td.n];
        if ((p - A).norm() <= corner_tol) vtx = best_edge;
        else if ((p - B).norm() <= corner_tol) vtx = (best_edge + 1) % td.n;

        if (vtx >= 0) {
            p = P.vertices[vtx];
            if (P.angles[vtx].p >= 2) {
                tr.singular = true;
                tr.singular_time = t;
                break;
            }
            CornerPassage cp = pass_corner(P, td, vtx, d);
            if (!cp.ok) {
                tr.singular = true;  // tangent continuation, measure zero
                tr.singular_time = t;
                break;
            }
            d = cp.out;
            for (int e : cp.word) sheet = dihedral_compose(td.N, sheet, td.lambda[e]);
            tr.events.push_back({p, sheet, t, -1 - vtx, d});
            continue;
        }

        (void)best_s;
        d = reflect_dir(d, td.edge_dir[best_edge]);
        sheet = dihedral_compose(td.N, sheet, td.lambda[best_edge]);
        tr.events.push_back({p, sheet, t, best_edge, d});
    }

    tr.final_state = {p, sheet, t};
    tr.final_direction = d;
    return tr;
}

RecurrenceRecord recurrence_stat(const PolygonSpec& P, const BilliardState& start, double theta,
                                 double T, bool ignore_sheets) {
    if (T < 1) throw std::domain_error("recurrence_stat requires T >= 1");
    TableData td = table_data(P);
    RecurrenceRecord rec;
    rec.theta = theta;
    rec.start = start;
    rec.ignore_sheets = ignore_sheets;

    Trajectory tr = billiard_flow(P, start, theta, T);
    rec.singular = tr.singular;
    rec.singular_time = tr.singular_time;

    const Vec2 p0 = start.position;
    const int sheet0 = start.sheet;
    const double window = 0.5 * td.diam;

    // walk the segments: (position, time, sheet, direction) at segment start
    Vec2 a = start.position;
    double t0 = start.time;
    int sheet = start.sheet;
    Vec2 d{std::cos(theta), std::sin(theta)};

    auto process_segment = [&](double t1) {
        if (!(ignore_sheets || sheet == sheet0)) return;
        double lo = std::fmax(1.0, t0), hi = t1;
        if (lo >= hi) return;
        Vec2 e = a - p0;
        double beta = e.dot(d), gamma = e.dot(e);
        // minimize t^2 (phi^2 + 2 beta phi + gamma), phi = t - t0:
        // stationary points solve 2 phi^2 + (3 beta + t0) phi + (gamma + beta t0) = 0
        double cands[4];
        int nc = 0;
        cands[nc++] = lo;
        cands[nc++] = hi;
        double A2 = 2, B2 = 3 * beta + t0, C2 = gamma + beta * t0;
        double disc = B2 * B2 - 4 * A2 * C2;
        if (disc >= 0) {
            double sq = std::sqrt(disc);
            for (double phi : {(-B2 - sq) / (2 * A2), (-B2 + sq) / (2 * A2)}) {
                double tt = t0 + phi;
                if (tt > lo && tt < hi) cands[nc++] = tt;
            }
        }
        double best_t = lo, best_v = 1e300, best_d = 0;
        for (int i = 0; i < nc; ++i) {
            double tt = cands[i];
            double phi = tt - t0;
            Vec2 diff = e + d * phi;
            double dist = diff.norm();
            double v = tt * dist;
            if (v < best_v) { best_v = v; best_t = tt; best_d = dist; }
        }
        if (best_d < window) rec.samples.push_back({best_t, best_d, best_v, sheet});
        if (best_v < rec.min_t_times_d) {
            rec.min_t_times_d = best_v;
            rec.argmin_t = best_t;
            rec.argmin_d = best_d;
            rec.argmin_sheet = sheet;
        }
    };

    for (const auto& ev : tr.events) {
        process_segment(ev.time);
        a = ev.position;
        t0 = ev.time;
        sheet = ev.sheet;
        d = ev.direction;
    }
    process_segment(tr.singular ? tr.singular_time : tr.final_state.time);
    return rec;
}

CorollaryReport corollary_check(const PolygonSpec& P, double theta, double eps, double T,
                                int trials, std::uint64_t seed, double c_override,
                                bool ignore_sheets, bool force_trials) {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("corollary_check requires 0 < eps < 1");
    if (T < 1) throw std::domain_error("corollary_check requires T >= 1");
    Surface q = unfold(P);
    double phi = unfolding_rotation_angle(theta);

    CorollaryReport rep;
    rep.eps = eps;
    rep.c = c_override > 0 ? c_override : eps * eps / 2;
    rep.t0_max = std::fmax(0.0, 2 * std::log(T) - std::log(rep.c));
    rep.trials = trials;

    BoundedCheck cert = bounded_direction_check(q, phi, rep.t0_max, eps, DirectionMode::Rotation);
    rep.certified_min_systole = cert.min_systole;
    rep.precondition_ok = cert.bounded;
    if (!rep.precondition_ok) {
        Systole sys = systole(q, geodesic(cert.argmin_t) * rotation(phi));
        rep.short_vector = sys.witness;
        rep.short_time = cert.argmin_t;
        rep.passed = false;
        if (!force_trials) return rep;
    }

    // bounding box for start sampling
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& v : P.vertices) {
        xlo = std::fmin(xlo, v.x); xhi = std::fmax(xhi, v.x);
        ylo = std::fmin(ylo, v.y); yhi = std::fmax(yhi, v.y);
    }
    auto point_inside = [&](Vec2 pt) {
        int n = static_cast<int>(P.vertices.size());
        // keep clear of the boundary
        for (int i = 0; i < n; ++i) {
            Vec2 A = P.vertices[i], AB = P.vertices[(i + 1) % n] - A;
            double tt = std::fmin(1.0, std::fmax(0.0, (pt - A).dot(AB) / AB.dot(AB)));
            if ((pt - (A + AB * tt)).norm() < 1e-6) return false;
        }
        int crossings = 0;
        for (int i = 0; i < n; ++i) {
            Vec2 A = P.vertices[i], B = P.vertices[(i + 1) % n];
            if ((A.y > pt.y) == (B.y > pt.y)) continue;
            double xc = A.x + (pt.y - A.y) * (B.x - A.x) / (B.y - A.y);
            if (xc > pt.x) ++crossings;
        }
        return crossings % 2 == 1;
    };

    std::vector<RecurrenceRecord> recs(trials);
    int threads = get_thread_budget();
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
        std::mt19937_64 rng(mix_seed(seed, i));
        std::uniform_real_distribution<double> ux(xlo, xhi), uy(ylo, yhi);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vec2 pt{ux(rng), uy(rng)};
            if (!point_inside(pt)) continue;
            RecurrenceRecord r = recurrence_stat(P, {pt, 0, 0}, theta, T, ignore_sheets);
            if (r.singular) continue;
            recs[i] = std::move(r);
            return;
        }
        throw std::logic_error("could not sample a nonsingular start point");
    }, threads);

    rep.passed = rep.precondition_ok;
    for (int i = 0; i < trials; ++i) {
        const auto& r = recs[i];
        if (r.min_t_times_d >= rep.c) continue;
        rep.passed = false;
        CorollaryViolation v;
        v.trial = i;
        v.t = r.argmin_t;
        v.d = r.argmin_d;
        v.event_sheet = r.argmin_sheet;
        v.cross_sheet = r.argmin_sheet != 0;
        v.t0 = std::fmax(0.0, 2 * std::log(std::fmax(r.argmin_t, 1.0)) - std::log(rep.c));
        Systole sys = systole(q, geodesic(v.t0) * rotation(phi));
        v.witness = sys.witness;
        v.witness_length = sys.value;
        v.witness_found = sys.value < eps;
        rep.violations.push_back(v);
    }
    return rep;
}

}  // namespace flatlab
