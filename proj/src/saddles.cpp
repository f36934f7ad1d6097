#include "flatlab/saddles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "flatlab/util.hpp"

namespace flatlab {

namespace {

Mat2 columns_mat(const Basis2& b) { return {b.x1, b.x2, b.y1, b.y2}; }

// Effective lattice matrix: holonomies are F (a, b) for primitive (a, b).
Mat2 lattice_matrix(const Surface& q) {
    if (!q.cover_basis) throw std::logic_error("surface has no lattice structure");
    return q.frame * columns_mat(*q.cover_basis);
}

bool canonical_sign(double x, double y) { return y > 0 || (y == 0 && x > 0); }

struct Interval {
    double lo = 1, hi = 0;  // empty by default
    bool empty() const { return lo > hi; }
};

Interval intersect(const Interval& a, const Interval& b) {
    return {std::fmax(a.lo, b.lo), std::fmin(a.hi, b.hi)};
}

// Integer solutions of c1 * A + c2 * B in [lo, hi] as an interval for B.
// Widened outward so no candidate is lost to rounding.
Interval solve_row(double c1, double c2, double A, double lo, double hi) {
    double v = c1 * A;
    double eps = 1e-9 * (1 + std::fabs(lo) + std::fabs(hi) + std::fabs(v));
    if (std::fabs(c2) < 1e-300) {
        if (v >= lo - eps && v <= hi + eps) return {-1e18, 1e18};
        return {};
    }
    double b1 = (lo - v) / c2, b2 = (hi - v) / c2;
    if (b1 > b2) std::swap(b1, b2);
    double weps = 1e-9 * (1 + std::fabs(b1) + std::fabs(b2));
    return {b1 - weps, b2 + weps};
}

// Enumerates primitive integer (a, b) with C (a, b) componentwise inside
// [l1, h1] x [l2, h2]; calls visit(a, b) for each.
void scan_box(const Mat2& C, double l1, double h1, double l2, double h2, std::uint64_t budget,
              const std::function<void(long long, long long)>& visit) {
    if (l1 > h1 || l2 > h2) return;
    Mat2 Ci = C.inverse();
    double amin = 1e18, amax = -1e18, bmin = 1e18, bmax = -1e18;
    for (double u1 : {l1, h1}) {
        for (double u2 : {l2, h2}) {
            double a = Ci.a11 * u1 + Ci.a12 * u2;
            double b = Ci.a21 * u1 + Ci.a22 * u2;
            amin = std::fmin(amin, a);
            amax = std::fmax(amax, a);
            bmin = std::fmin(bmin, b);
            bmax = std::fmax(bmax, b);
        }
    }
    double wa = 1e-9 * (1 + std::fabs(amin) + std::fabs(amax));
    double wb = 1e-9 * (1 + std::fabs(bmin) + std::fabs(bmax));
    amin -= wa; amax += wa; bmin -= wb; bmax += wb;

    bool outer_is_a = (amax - amin) <= (bmax - bmin);
    // outer variable o, inner variable i: constraints c_o * O + c_i * I
    double o_lo = outer_is_a ? amin : bmin, o_hi = outer_is_a ? amax : bmax;
    double r1o = outer_is_a ? C.a11 : C.a12, r1i = outer_is_a ? C.a12 : C.a11;
    double r2o = outer_is_a ? C.a21 : C.a22, r2i = outer_is_a ? C.a22 : C.a21;

    if (o_hi - o_lo > static_cast<double>(budget))
        throw resource_error("lattice scan range exceeds work budget", budget);
    long long O0 = static_cast<long long>(std::ceil(o_lo));
    long long O1 = static_cast<long long>(std::floor(o_hi));
    for (long long O = O0; O <= O1; ++O) {
        Interval bi = intersect(solve_row(r1o, r1i, static_cast<double>(O), l1, h1),
                                solve_row(r2o, r2i, static_cast<double>(O), l2, h2));
        if (bi.empty()) continue;
        long long I0 = static_cast<long long>(std::ceil(std::fmax(bi.lo, -1e18)));
        long long I1 = static_cast<long long>(std::floor(std::fmin(bi.hi, 1e18)));
        for (long long I = I0; I <= I1; ++I) {
            long long a = outer_is_a ? O : I, b = outer_is_a ? I : O;
            if (a == 0 && b == 0) continue;
            if (std::gcd(std::llabs(a), std::llabs(b)) != 1) continue;
            visit(a, b);
        }
    }
}

Holonomy mul(const Mat2& m, long long a, long long b) {
    double x = m.a11 * a + m.a12 * b;
    double y = m.a21 * a + m.a22 * b;
    return {x, y};
}

// deterministic tie-break among equal-length witnesses
bool witness_less(const Holonomy& a, const Holonomy& b) {
    if (std::fabs(a.x) != std::fabs(b.x)) return std::fabs(a.x) < std::fabs(b.x);
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

}  // namespace

void scan_lattice_box(const Surface& q, const Mat2& rows, double l1, double h1, double l2,
                      double h2, std::uint64_t budget,
                      const std::function<void(const Holonomy&)>& visit) {
    Mat2 F = lattice_matrix(q);
    scan_box(rows * F, l1, h1, l2, h2, budget,
             [&](long long a, long long b) { visit(mul(F, a, b)); });
}

bool SaddleSet::contains(const Holonomy& h, double tol) const {
    for (const auto& e : vectors)
        if (std::fabs(e.v.x - h.x) <= tol && std::fabs(e.v.y - h.y) <= tol) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Square-tiled separatrix tracing (exact integer arithmetic)

namespace {

// Walks the separatrix of primitive direction (p, q), p,q >= 0, from the
// bottom-left corner of square s0; returns the vertex class of the endpoint.
// Ties i*q == j*p in the crossing order would mean an interior corner hit,
// impossible for primitive directions.
int origami_walk(const std::vector<int>& right, const std::vector<int>& up,
                 const std::vector<int>& square_class, long long p, long long q, int s0) {
    int cur = s0;
    if (q == 0) return square_class[right[cur]];  // p == 1
    if (p == 0) return square_class[up[cur]];     // q == 1
    long long i = 1, j = 1;
    while (i <= p - 1 || j <= q - 1) {
        bool vertical;
        if (i > p - 1) vertical = false;
        else if (j > q - 1) vertical = true;
        else {
            if (i * q == j * p) throw std::logic_error("interior corner hit on primitive direction");
            vertical = i * q < j * p;
        }
        if (vertical) { cur = right[cur]; ++i; }
        else { cur = up[cur]; ++j; }
    }
    return square_class[up[right[cur]]];  // top-right corner of the final square
}

SaddleSet enumerate_lattice(const Surface& q, double L, const EnumerateOptions& opt) {
    Mat2 F = lattice_matrix(q);
    double Lw = L * (1 + 1e-12);
    std::vector<SaddleEntry> out;
    scan_box(F, -Lw, Lw, -Lw, Lw, opt.budget, [&](long long a, long long b) {
        Holonomy w = mul(F, a, b);
        if (!canonical_sign(w.x, w.y)) return;
        if (w.length() > Lw) return;
        out.push_back({canonical(w.x, w.y), q.lattice_multiplicity});
    });
    std::sort(out.begin(), out.end(),
              [](const SaddleEntry& x, const SaddleEntry& y) { return holonomy_less(x.v, y.v); });
    return {q.name, L, std::move(out)};
}

SaddleSet enumerate_square_tiled(const Surface& q, double L, const EnumerateOptions& opt) {
    // Candidate directions from the lattice box, each validated by tracing
    // the separatrix from every square's bottom-left prong.
    double Lw = L * (1 + 1e-12);
    int n = q.n_squares;
    std::vector<int> rinv(n);
    for (int i = 0; i < n; ++i) rinv[q.perm_right[i]] = i;
    std::vector<SaddleEntry> out;
    scan_box(q.frame, -Lw, Lw, -Lw, Lw, opt.budget, [&](long long p, long long pq) {
        Holonomy w = mul(q.frame, p, pq);
        if (!canonical_sign(w.x, w.y)) return;
        if (w.length() > Lw) return;
        // trace in the first quadrant: reflect negative-x directions
        long long ap = std::llabs(p);
        const std::vector<int>& r = (p >= 0) ? q.perm_right : rinv;
        for (int s0 = 0; s0 < n; ++s0) {
            int cls = origami_walk(r, q.perm_up, q.square_class, ap, pq, s0);
            (void)cls;  // endpoint class is always marked on an origami
        }
        out.push_back({canonical(w.x, w.y), n});
    });
    std::sort(out.begin(), out.end(),
              [](const SaddleEntry& x, const SaddleEntry& y) { return holonomy_less(x.v, y.v); });
    return {q.name, L, std::move(out)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Flat-complex ray tracing

namespace {

struct TraceState {
    enum class Kind { Face, FaceAtVertex, Edge, Hit, Lost } kind = Kind::Face;
    int face = -1;
    Vec2 offset;  // global = chart + offset
    Vec2 z;       // current global position
    int edge_j = -1, edge_target = -1;
    int hit_class = -1;
};

struct Tracer {
    const FlatComplex& cx;
    double scale;

    explicit Tracer(const FlatComplex& c) : cx(c) {
        scale = 1;
        for (const auto& f : cx.faces)
            for (const auto& p : f.pos) scale = std::fmax(scale, std::fmax(std::fabs(p.x), std::fabs(p.y)));
    }

    double eps() const { return 1e-9 * scale; }

    Vec2 gpos(const TraceState& s, int slot) const {
        return cx.faces[s.face].pos[slot] + s.offset;
    }

    // Crossing edge j of face f identifies endpoint j with endpoint
    // (j2+1) % 3 of the neighbor edge (orientations reverse across a gluing).
    void cross(TraceState& s, int j) const {
        const auto& f = cx.faces[s.face];
        int f2 = f.nbr_face[j], j2 = f.nbr_edge[j];
        Vec2 anchor = f.pos[j] + s.offset;
        s.offset = anchor - cx.faces[f2].pos[(j2 + 1) % 3];
        s.face = f2;
    }

    // Rotates one step around the vertex at slot m of face s.face.
    void rotate_corner(TraceState& s, int& m) const {
        const auto& f = cx.faces[s.face];
        int j2 = f.nbr_edge[m];
        cross(s, m);
        m = (j2 + 1) % 3;
    }

    // From a vertex with outgoing direction u, finds the wedge of the fan
    // containing u and sets the state to continue the straight line.
    // The starting corner is slot m of s.face; s.z must be the vertex.
    bool fan_continue(TraceState& s, int m, const Vec2& u) const {
        for (int guard = 0; guard < 512; ++guard) {
            const auto& f = cx.faces[s.face];
            Vec2 e1 = f.pos[(m + 1) % 3] - f.pos[m];
            Vec2 e2 = f.pos[(m + 2) % 3] - f.pos[m];
            double c1 = e1.cross(u), c2 = u.cross(e2);
            double t1 = 1e-9 * e1.norm(), t2 = 1e-9 * e2.norm();
            if (std::fabs(c1) <= t1 && e1.dot(u) > 0) {
                s.kind = TraceState::Kind::Edge;
                s.edge_j = m;
                s.edge_target = (m + 1) % 3;
                return true;
            }
            if (std::fabs(c2) <= t2 && e2.dot(u) > 0) {
                s.kind = TraceState::Kind::Edge;
                s.edge_j = (m + 2) % 3;
                s.edge_target = (m + 2) % 3;
                return true;
            }
            if (c1 > t1 && c2 > t2) {
                s.kind = TraceState::Kind::FaceAtVertex;
                return true;
            }
            rotate_corner(s, m);
        }
        return false;
    }

    // Advances through the current face; s.z is inside or on the boundary
    // (for FaceAtVertex at a vertex) and u points into the face closure.
    // Returns the exit: either an edge crossing (state updated into the
    // neighbor) or a vertex event (returns slot via out_vertex).
    bool step_face(TraceState& s, const Vec2& u, double remaining, double& advanced,
                   int& out_vertex) const {
        const auto& f = cx.faces[s.face];
        double best_t = 1e300;
        int best_j = -1;
        double best_s = 0;
        for (int j = 0; j < 3; ++j) {
            Vec2 A = f.pos[j] + s.offset;
            Vec2 B = f.pos[(j + 1) % 3] + s.offset;
            Vec2 AB = B - A;
            double denom = u.cross(AB);
            if (std::fabs(denom) < 1e-14 * AB.norm()) continue;
            Vec2 AZ = A - s.z;
            double t = AZ.cross(AB) / denom;
            double sp = AZ.cross(u) / denom;
            if (t <= eps()) continue;
            if (sp < -1e-9 || sp > 1 + 1e-9) continue;
            if (t < best_t) { best_t = t; best_j = j; best_s = sp; }
        }
        if (best_j < 0) return false;
        if (best_t >= remaining) {
            s.z = s.z + u * remaining;
            advanced = remaining;
            out_vertex = -2;  // finished inside the face
            return true;
        }
        Vec2 exit = s.z + u * best_t;
        advanced = best_t;
        const Vec2 A = f.pos[best_j] + s.offset;
        const Vec2 B = f.pos[(best_j + 1) % 3] + s.offset;
        if ((exit - A).norm() <= eps()) {
            s.z = A;
            out_vertex = best_j;
            return true;
        }
        if ((exit - B).norm() <= eps()) {
            s.z = B;
            out_vertex = (best_j + 1) % 3;
            return true;
        }
        (void)best_s;
        s.z = exit;
        cross(s, best_j);
        s.kind = TraceState::Kind::Face;
        out_vertex = -1;
        return true;
    }
};

// Full straight-line trace. Starts from `st` with direction u (unit), stops
// after total length T or at the first marked vertex. on_cross, if set, is
// called after every event with the current state and traveled length.
struct TraceResult {
    bool hit_marked = false;
    int hit_class = -1;
    double length = 0;
};

TraceResult run_trace(const Surface& q, Tracer& tr, TraceState st, int start_vertex_slot, Vec2 u,
                      double T, const std::function<void(const TraceState&, double)>& on_cross) {
    TraceResult res;
    double traveled = 0;
    int pending_vertex = start_vertex_slot;  // >= 0 when starting at a vertex

    auto is_marked = [&](int cls) { return q.singularities[cls].marked; };

    for (std::uint64_t step = 0; step < 1000000; ++step) {
        if (pending_vertex >= 0) {
            int cls = tr.cx.faces[st.face].vclass[pending_vertex];
            if (traveled > tr.eps() && is_marked(cls)) {
                res.hit_marked = true;
                res.hit_class = cls;
                res.length = traveled;
                return res;
            }
            int m = pending_vertex;
            pending_vertex = -1;
            if (!tr.fan_continue(st, m, u))
                throw std::logic_error("ray tracing lost at a vertex fan");
            continue;
        }
        if (traveled >= T - tr.eps()) { res.length = traveled; return res; }
        if (st.kind == TraceState::Kind::Edge) {
            Vec2 target = tr.gpos(st, st.edge_target);
            double dist = (target - st.z).norm();
            if (traveled + dist > T) {
                st.z = st.z + u * (T - traveled);
                traveled = T;
                if (on_cross) on_cross(st, traveled);
                res.length = traveled;
                return res;
            }
            traveled += dist;
            st.z = target;
            pending_vertex = st.edge_target;
            if (on_cross) on_cross(st, traveled);
            continue;
        }
        // Face / FaceAtVertex
        double advanced = 0;
        int out_vertex = -3;
        if (!tr.step_face(st, u, T - traveled, advanced, out_vertex))
            throw std::logic_error("ray tracing found no exit from a face");
        traveled += advanced;
        if (out_vertex == -2) {
            if (on_cross) on_cross(st, traveled);
            res.length = traveled;
            return res;
        }
        if (out_vertex >= 0) {
            pending_vertex = out_vertex;
            if (on_cross) on_cross(st, traveled);
            continue;
        }
        if (on_cross) on_cross(st, traveled);
    }
    throw resource_error("ray tracing exceeded the step budget", 1000000);
}

}  // namespace

std::optional<RayHit> trace_separatrix(const Surface& q, int face, int corner, Vec2 dir,
                                       double max_len) {
    if (!q.complex) throw std::logic_error("trace_separatrix requires a flat complex");
    Tracer tr(*q.complex);
    double n = dir.norm();
    Vec2 u = {dir.x / n, dir.y / n};
    TraceState st;
    st.face = face;
    st.offset = Vec2{0, 0} - q.complex->faces[face].pos[corner];
    st.z = {0, 0};
    TraceResult res = run_trace(q, tr, st, corner, u, max_len * (1 + 1e-9), nullptr);
    if (!res.hit_marked) return std::nullopt;
    return RayHit{res.length, res.hit_class};
}

bool trace_on_complex(const Surface& q, int start_face, Vec2 chart_point, Vec2 dir, double T,
                      const std::function<void(int, Vec2, double)>& cb) {
    if (!q.complex) throw std::logic_error("trace_on_complex requires a flat complex");
    Tracer tr(*q.complex);
    double n = dir.norm();
    Vec2 u = {dir.x / n, dir.y / n};
    TraceState st;
    st.face = start_face;
    st.offset = {0, 0};
    st.z = chart_point;
    auto forward = [&](const TraceState& s, double len) {
        if (cb) cb(s.face, s.z - s.offset, len);
    };
    TraceResult res = run_trace(q, tr, st, -1, u, T, forward);
    return !res.hit_marked;
}

int locate_face(const Surface& q, int copy, Vec2 p) {
    if (!q.complex) throw std::logic_error("locate_face requires a flat complex");
    const auto& faces = q.complex->faces;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
        if (faces[f].copy != copy) continue;
        const auto& fc = faces[f];
        double e = 1e-9 * (1 + fc.pos[0].norm());
        double d1 = (fc.pos[1] - fc.pos[0]).cross(p - fc.pos[0]);
        double d2 = (fc.pos[2] - fc.pos[1]).cross(p - fc.pos[1]);
        double d3 = (fc.pos[0] - fc.pos[2]).cross(p - fc.pos[2]);
        if (d1 >= -e && d2 >= -e && d3 >= -e) return f;
    }
    throw std::invalid_argument("point is not inside the given copy");
}

// ---------------------------------------------------------------------------
// Unfolded enumeration: breadth-first development collects candidate
// directions; each is verified by exact ray tracing.

namespace {

struct SnapKey {
    long long a, b, c;
    bool operator<(const SnapKey& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
};

SaddleSet enumerate_unfolded(const Surface& q, double L, const EnumerateOptions& opt) {
    if (!q.complex) throw std::logic_error("unfolded surface lacks its complex");
    const FlatComplex& cx = *q.complex;
    Tracer tr(cx);
    double R = std::sqrt(2.0) * L * q.frame.inverse().opnorm() * (1 + 1e-9);
    double quantum = 1e-7 * (1 + R);

    std::map<SnapKey, long long> counts;  // canonical effective holonomy -> trace count
    std::map<SnapKey, Holonomy> reps;

    auto seg_dist0 = [](Vec2 A, Vec2 B) {
        Vec2 AB = B - A;
        double t = -A.dot(AB) / AB.dot(AB);
        t = std::fmin(1.0, std::fmax(0.0, t));
        return (A + AB * t).norm();
    };

    std::uint64_t states_used = 0;
    for (int f0 = 0; f0 < static_cast<int>(cx.faces.size()); ++f0) {
        for (int k0 = 0; k0 < 3; ++k0) {
            int cls0 = cx.faces[f0].vclass[k0];
            if (!q.singularities[cls0].marked) continue;

            // breadth-first development with the corner vertex at the origin
            std::map<SnapKey, char> visited;
            std::queue<std::pair<int, Vec2>> bfs;
            Vec2 o0 = Vec2{0, 0} - cx.faces[f0].pos[k0];
            auto key_of = [&](int f, Vec2 o) {
                return SnapKey{f, llround(o.x / quantum), llround(o.y / quantum)};
            };
            bfs.push({f0, o0});
            visited[key_of(f0, o0)] = 1;
            std::vector<Vec2> cand;
            while (!bfs.empty()) {
                auto [f, o] = bfs.front();
                bfs.pop();
                if (++states_used > opt.budget)
                    throw resource_error("unfolded enumeration exceeded its budget", opt.budget);
                const auto& fc = cx.faces[f];
                for (int m = 0; m < 3; ++m) {
                    Vec2 w = fc.pos[m] + o;
                    if (w.norm() > tr.eps() && w.norm() <= R && q.singularities[fc.vclass[m]].marked)
                        cand.push_back(w);
                }
                for (int j = 0; j < 3; ++j) {
                    Vec2 A = fc.pos[j] + o, B = fc.pos[(j + 1) % 3] + o;
                    if (seg_dist0(A, B) > R) continue;
                    int f2 = fc.nbr_face[j], j2 = fc.nbr_edge[j];
                    Vec2 o2 = A - cx.faces[f2].pos[(j2 + 1) % 3];
                    auto k = key_of(f2, o2);
                    if (!visited.count(k)) {
                        visited[k] = 1;
                        bfs.push({f2, o2});
                    }
                }
            }

            // candidate directions restricted to this corner's half-open wedge
            Vec2 e1 = cx.faces[f0].pos[(k0 + 1) % 3] - cx.faces[f0].pos[k0];
            Vec2 e2 = cx.faces[f0].pos[(k0 + 2) % 3] - cx.faces[f0].pos[k0];
            std::map<SnapKey, Vec2> dirs;
            for (const Vec2& w : cand) {
                double n = w.norm();
                Vec2 u = {w.x / n, w.y / n};
                double c1 = e1.cross(u), c2 = u.cross(e2);
                double t1 = 1e-9 * e1.norm(), t2 = 1e-9 * e2.norm();
                bool in_from_e1 = c1 >= -t1;
                bool strictly_before_e2 = c2 > t2 || (std::fabs(c2) <= t2 && e2.dot(u) < 0);
                if (!(in_from_e1 && strictly_before_e2)) continue;
                SnapKey dk{llround(u.x * 1e9), llround(u.y * 1e9), 0};
                dirs.emplace(dk, u);
            }

            for (const auto& [dk, u] : dirs) {
                auto hit = trace_separatrix(q, f0, k0, u, R);
                if (!hit) continue;
                Vec2 raw = u * hit->length;
                raw.x = std::llround(raw.x * 1e9) / 1e9;
                raw.y = std::llround(raw.y * 1e9) / 1e9;
                Holonomy eff = act(q.frame, {raw.x, raw.y});
                if (eff.length() > L * (1 + 1e-9)) continue;
                SnapKey hk{llround(eff.x * 1e9), llround(eff.y * 1e9), 0};
                counts[hk] += 1;
                reps.emplace(hk, eff);
            }
        }
    }

    std::vector<SaddleEntry> out;
    for (const auto& [hk, cnt] : counts) {
        if (cnt % 2 != 0)
            throw std::logic_error("saddle connection traced an odd number of times");
        out.push_back({reps[hk], cnt / 2});
    }
    std::sort(out.begin(), out.end(),
              [](const SaddleEntry& x, const SaddleEntry& y) { return holonomy_less(x.v, y.v); });
    return {q.name, L, std::move(out)};
}

}  // namespace

SaddleSet enumerate_saddles(const Surface& q, double L, const EnumerateOptions& opt) {
    if (L <= 0) throw std::domain_error("enumerate requires a positive cutoff");
    switch (q.kind) {
        case SurfaceKind::Torus: return enumerate_lattice(q, L, opt);
        case SurfaceKind::SquareTiled: return enumerate_square_tiled(q, L, opt);
        case SurfaceKind::Unfolded:
            if (q.cover_basis) {
                return enumerate_lattice(q, L, opt);
            }
            return enumerate_unfolded(q, L, opt);
    }
    throw std::logic_error("unknown surface kind");
}

// ---------------------------------------------------------------------------
// Systole

namespace {

Systole systole_lattice(const Surface& q, const Mat2& A, std::pair<long long, long long> hint,
                        const EnumerateOptions& opt, std::pair<long long, long long>* hint_out) {
    Mat2 F0 = lattice_matrix(q);  // effective holonomies
    Mat2 C = A * F0;              // transformed holonomies

    const std::pair<long long, long long> seeds[] = {{1, 0}, {0, 1}, {1, 1},  {1, -1},
                                                     {2, 1}, {1, 2}, {2, -1}, {1, -2}};
    double M = 1e300;
    long long ba = 1, bb = 0;
    auto consider = [&](long long a, long long b) {
        if (a == 0 && b == 0) return;
        long long g = std::gcd(std::llabs(a), std::llabs(b));
        if (g > 1) { a /= g; b /= g; }
        double v = mul(C, a, b).length();
        if (v < M) { M = v; ba = a; bb = b; }
    };
    for (auto [a, b] : seeds) consider(a, b);
    if (hint.first != 0 || hint.second != 0) consider(hint.first, hint.second);

    // Exhaustive sweep of { v : length(C v) <= M }; the bound shrinks as
    // better witnesses appear but the outer range is fixed by the initial M.
    double M0 = M * (1 + 1e-12);
    Mat2 Ci = C.inverse();
    double amin = 1e18, amax = -1e18, bmin = 1e18, bmax = -1e18;
    for (double u1 : {-M0, M0}) {
        for (double u2 : {-M0, M0}) {
            double a = Ci.a11 * u1 + Ci.a12 * u2;
            double b = Ci.a21 * u1 + Ci.a22 * u2;
            amin = std::fmin(amin, a); amax = std::fmax(amax, a);
            bmin = std::fmin(bmin, b); bmax = std::fmax(bmax, b);
        }
    }
    bool outer_is_a = (amax - amin) <= (bmax - bmin);
    double o_lo = outer_is_a ? amin : bmin, o_hi = outer_is_a ? amax : bmax;
    o_lo -= 1e-9 * (1 + std::fabs(o_lo));
    o_hi += 1e-9 * (1 + std::fabs(o_hi));
    if (o_hi - o_lo > static_cast<double>(opt.budget))
        throw resource_error("systole scan range exceeds work budget", opt.budget);
    double r1o = outer_is_a ? C.a11 : C.a12, r1i = outer_is_a ? C.a12 : C.a11;
    double r2o = outer_is_a ? C.a21 : C.a22, r2i = outer_is_a ? C.a22 : C.a21;
    for (long long O = static_cast<long long>(std::ceil(o_lo));
         O <= static_cast<long long>(std::floor(o_hi)); ++O) {
        double Mw = M * (1 + 1e-12);
        Interval bi = intersect(solve_row(r1o, r1i, static_cast<double>(O), -Mw, Mw),
                                solve_row(r2o, r2i, static_cast<double>(O), -Mw, Mw));
        if (bi.empty()) continue;
        for (long long I = static_cast<long long>(std::ceil(bi.lo));
             I <= static_cast<long long>(std::floor(bi.hi)); ++I) {
            long long a = outer_is_a ? O : I, b = outer_is_a ? I : O;
            if (a == 0 && b == 0) continue;
            if (std::gcd(std::llabs(a), std::llabs(b)) != 1) continue;
            double v = mul(C, a, b).length();
            if (v < M) { M = v; ba = a; bb = b; }
            else if (v == M) {
                Holonomy cnew = canonical(mul(C, a, b).x, mul(C, a, b).y);
                Holonomy cold = canonical(mul(C, ba, bb).x, mul(C, ba, bb).y);
                if (witness_less(cnew, cold)) { ba = a; bb = b; }
            }
        }
    }
    if (hint_out) *hint_out = {ba, bb};
    Holonomy base = mul(F0, ba, bb);
    Holonomy w = mul(C, ba, bb);
    return {M, canonical(w.x, w.y), canonical(base.x, base.y)};
}

Systole systole_generic(const Surface& q, const Mat2& A, const EnumerateOptions& opt) {
    // any witness gives the certified cutoff
    double L = std::sqrt(q.area) / 2;
    SaddleSet probe;
    for (int it = 0; it < 24; ++it) {
        probe = enumerate_saddles(q, L, opt);
        if (!probe.vectors.empty()) break;
        L *= 2;
    }
    if (probe.vectors.empty()) throw std::logic_error("no saddle connections found");
    double M = 1e300;
    Holonomy wit, wit_base;
    auto scan = [&](const SaddleSet& s) {
        for (const auto& e : s.vectors) {
            Holonomy t = act(A, e.v);
            if (t.length() < M) { M = t.length(); wit = t; wit_base = e.v; }
        }
    };
    scan(probe);
    double Lfull = std::sqrt(2.0) * A.inverse().opnorm() * M * (1 + 1e-9);
    if (Lfull > probe.cutoff) scan(enumerate_saddles(q, Lfull, opt));
    return {M, wit, wit_base};
}

}  // namespace

Systole systole(const Surface& q, const Mat2& A, const EnumerateOptions& opt) {
    if (q.cover_basis) return systole_lattice(q, A, {0, 0}, opt, nullptr);
    return systole_generic(q, A, opt);
}

Systole systole_with_hint(const Surface& q, const Mat2& A, std::pair<long long, long long>& hint,
                          const EnumerateOptions& opt) {
    if (q.cover_basis) return systole_lattice(q, A, hint, opt, &hint);
    return systole_generic(q, A, opt);
}

// ---------------------------------------------------------------------------
// Certified bounds over horocycle intervals

double interval_vector_bound(const Holonomy& v, double t, double s_lo, double s_hi) {
    double x1 = v.x + s_lo * v.y, x2 = v.x + s_hi * v.y;
    if (x1 > x2) std::swap(x1, x2);
    double mx = (x1 <= 0 && x2 >= 0) ? 0 : std::fmin(std::fabs(x1), std::fabs(x2));
    double et = std::exp(t / 2);
    return std::fmax(et * mx, std::fabs(v.y) / et);
}

namespace {

// Collects vectors whose certified bound is below cap, lattice path.
void interval_scan(const Surface& q, double t, double s_lo, double s_hi, double cap,
                   const EnumerateOptions& opt, const std::function<void(const Holonomy&)>& out) {
    double et = std::exp(t / 2);
    double Ymax = cap * et * (1 + 1e-9);
    double W = cap / et * (1 + 1e-9);
    double slack = (s_hi - s_lo) * Ymax;
    Mat2 rows = horocycle(s_lo);  // u1 = x + s_lo*y, u2 = y
    Mat2 F = lattice_matrix(q);
    scan_box(rows * F, -(W + slack), W + slack, -Ymax, Ymax, opt.budget,
             [&](long long a, long long b) {
                 Holonomy v = mul(F, a, b);
                 if (!canonical_sign(v.x, v.y)) return;
                 if (interval_vector_bound(v, t, s_lo, s_hi) < cap) out(v);
             });
}

}  // namespace

std::vector<Holonomy> interval_candidates(const Surface& q, double t, double s_lo, double s_hi,
                                          double cap, const EnumerateOptions& opt) {
    std::vector<Holonomy> res;
    interval_scan(q, t, s_lo, s_hi, cap, opt, [&](const Holonomy& v) { res.push_back(v); });
    return res;
}

double systole_interval_bound_capped(const Surface& q, double t, double s_lo, double s_hi,
                                     double cap, const EnumerateOptions& opt) {
    if (s_lo > s_hi) throw std::domain_error("interval bound requires s_lo <= s_hi");
    double best = cap;
    if (q.cover_basis) {
        interval_scan(q, t, s_lo, s_hi, cap, opt, [&](const Holonomy& v) {
            best = std::fmin(best, interval_vector_bound(v, t, s_lo, s_hi));
        });
        return best;
    }
    // generic path: certified cutoff from the operator norm over the interval
    double op = std::fmax((geodesic(t) * horocycle(s_lo)).opnorm(),
                          (geodesic(t) * horocycle(s_hi)).opnorm());
    double L = std::sqrt(2.0) * cap * op * (1 + 1e-9);
    SaddleSet set = enumerate_saddles(q, L, opt);
    for (const auto& e : set.vectors)
        best = std::fmin(best, interval_vector_bound(e.v, t, s_lo, s_hi));
    return best;
}

double systole_lower_bound_on_interval(const Surface& q, double t, double s_lo, double s_hi,
                                       const EnumerateOptions& opt) {
    if (s_lo > s_hi) throw std::domain_error("interval bound requires s_lo <= s_hi");
    double mid = 0.5 * (s_lo + s_hi);
    Systole at_mid = systole(q, geodesic(t) * horocycle(mid), opt);
    double cap = at_mid.value * (1 + 1e-12) + 1e-300;
    return systole_interval_bound_capped(q, t, s_lo, s_hi, cap, opt);
}

std::string saddle_csv(const SaddleSet& s) {
    std::ostringstream os;
    os << "x,y,multiplicity\n";
    for (const auto& e : s.vectors)
        os << format_double(e.v.x) << "," << format_double(e.v.y) << "," << e.multiplicity << "\n";
    return os.str();
}

}  // namespace flatlab
