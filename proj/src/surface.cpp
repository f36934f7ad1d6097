#include "flatlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "flatlab/util.hpp"

namespace flatlab {

double Vec2::norm() const { return std::hypot(x, y); }

Vec2 apply(const Mat2& m, const Vec2& v) {
    return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}

// ---------------------------------------------------------------------------
// PolygonSpec

double PolygonSpec::area() const {
    double a = 0;
    std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& u = vertices[i];
        const Vec2& v = vertices[(i + 1) % n];
        a += u.cross(v);
    }
    return 0.5 * a;
}

PolygonSpec PolygonSpec::unit_square() {
    PolygonSpec p;
    p.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.angles = {{1, 2}, {1, 2}, {1, 2}, {1, 2}};
    return p;
}

void PolygonSpec::validate() const {
    std::size_t n = vertices.size();
    if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (angles.size() != n) throw std::invalid_argument("polygon needs one angle per vertex");

    long long sp = 0, sq = 1;  // running sum of p/q as a fraction sp/sq
    for (const auto& a : angles) {
        if (a.p <= 0 || a.q <= 0) throw std::invalid_argument("angles must be positive rationals");
        if (std::gcd(a.p, a.q) != 1) throw std::invalid_argument("angle p/q must be in lowest terms");
        if (a.p >= 2 * a.q) throw std::invalid_argument("angle must be less than 2*pi");
        long long g = std::gcd(sq, a.q);
        long long nq = sq / g * a.q;
        sp = sp * (nq / sq) + a.p * (nq / a.q);
        sq = nq;
    }
    if (sp != static_cast<long long>(n - 2) * sq)
        throw std::invalid_argument("interior angles must sum to (n-2)*pi");

    if (area() <= 0) throw std::invalid_argument("polygon must be counterclockwise with positive area");

    double scale = 0;
    for (const auto& v : vertices) scale = std::fmax(scale, std::fmax(std::fabs(v.x), std::fabs(v.y)));
    // coordinates consistent with declared angles
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 out = vertices[(i + 1) % n] - vertices[i];
        Vec2 in = vertices[(i + n - 1) % n] - vertices[i];
        if (out.norm() < 1e-12 * scale || in.norm() < 1e-12 * scale)
            throw std::invalid_argument("degenerate polygon edge");
        double ang = std::atan2(out.cross(in), out.dot(in));
        if (ang <= 0) ang += 2 * M_PI;
        double want = M_PI * static_cast<double>(angles[i].p) / static_cast<double>(angles[i].q);
        if (std::fabs(ang - want) > 1e-9)
            throw std::invalid_argument("vertex coordinates disagree with declared angle at vertex " +
                                        std::to_string(i));
    }

    // simplicity: no two non-adjacent edges intersect
    auto seg_intersect = [](Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).cross(r - p); };
        double o1 = orient(a, b, c), o2 = orient(a, b, d);
        double o3 = orient(c, d, a), o4 = orient(c, d, b);
        return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (seg_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
                throw std::invalid_argument("polygon is not simple");
        }
    }
}

// ---------------------------------------------------------------------------
// Origami vertex data

std::vector<std::vector<int>> commutator_cycles(const std::vector<int>& right,
                                                const std::vector<int>& up) {
    int n = static_cast<int>(right.size());
    std::vector<int> rinv(n), uinv(n), comm(n);
    for (int i = 0; i < n; ++i) rinv[right[i]] = i;
    for (int i = 0; i < n; ++i) uinv[up[i]] = i;
    for (int i = 0; i < n; ++i) comm[i] = right[up[rinv[uinv[i]]]];
    std::vector<std::vector<int>> cycles;
    std::vector<bool> seen(n, false);
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        int j = i;
        while (!seen[j]) {
            seen[j] = true;
            cyc.push_back(j);
            j = comm[j];
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

namespace {

void validate_perm(const std::vector<int>& p, const char* which) {
    int n = static_cast<int>(p.size());
    std::vector<bool> hit(n, false);
    for (int v : p) {
        if (v < 0 || v >= n || hit[v])
            throw std::invalid_argument(std::string(which) + " is not a permutation");
        hit[v] = true;
    }
}

bool jointly_transitive(const std::vector<int>& r, const std::vector<int>& u) {
    int n = static_cast<int>(r.size());
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    std::vector<int> rinv(n), uinv(n);
    for (int i = 0; i < n; ++i) rinv[r[i]] = i;
    for (int i = 0; i < n; ++i) uinv[u[i]] = i;
    while (!q.empty()) {
        int i = q.front();
        q.pop();
        for (int j : {r[i], u[i], rinv[i], uinv[i]}) {
            if (!seen[j]) {
                seen[j] = true;
                ++count;
                q.push(j);
            }
        }
    }
    return count == n;
}

}  // namespace

Surface make_square_tiled(const std::vector<int>& right, const std::vector<int>& up) {
    if (right.size() != up.size() || right.empty())
        throw std::invalid_argument("permutations must be non-empty and of equal degree");
    validate_perm(right, "right");
    validate_perm(up, "up");
    if (!jointly_transitive(right, up))
        throw std::invalid_argument("permutations do not act transitively: disconnected surface");

    Surface s;
    int n = static_cast<int>(right.size());
    s.kind = SurfaceKind::SquareTiled;
    s.name = "square_tiled_n" + std::to_string(n);
    s.n_squares = n;
    s.perm_right = right;
    s.perm_up = up;
    s.area = n;

    auto cycles = commutator_cycles(right, up);
    s.square_class.assign(n, -1);
    long long excess = 0;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        for (int sq : cycles[c]) s.square_class[sq] = static_cast<int>(c);
        Singularity sing;
        sing.class_id = static_cast<int>(c);
        sing.cone_angle_over_pi = 2 * static_cast<long long>(cycles[c].size());
        sing.marked = true;  // all vertex classes are marked on an origami
        excess += sing.cone_angle_over_pi - 2;
        s.singularities.push_back(sing);
    }
    if (excess % 4 != 0) throw std::logic_error("Gauss-Bonnet parity violated");
    s.genus = 1 + static_cast<int>(excess / 4);

    // every primitive integer vector is realized from each of the n prongs
    // in its direction (verified against the separatrix tracer in tests)
    s.cover_basis = Basis2{1, 0, 0, 1};
    s.lattice_multiplicity = n;
    return s;
}

Surface make_torus() {
    Surface s = make_square_tiled({0}, {0});
    s.kind = SurfaceKind::Torus;
    s.name = "torus";
    return s;
}

// ---------------------------------------------------------------------------
// Unfolding

int dihedral_compose(int N, int a, int b) {  // a after b
    bool ra = a < N, rb = b < N;
    int ka = ra ? a : a - N, kb = rb ? b : b - N;
    if (ra && rb) return (ka + kb) % N;
    if (ra && !rb) return N + (kb + ka) % N;
    if (!ra && rb) return N + ((ka - kb) % N + N) % N;
    return ((ka - kb) % N + N) % N;
}

namespace {

// Dihedral group of order 2N: indices [0,N) are rotations by 2*pi*k/N,
// [N,2N) are reflections across the axis at angle psi0 + (k-N)*pi/N.
struct Dihedral {
    int N;

    int compose(int a, int b) const { return dihedral_compose(N, a, b); }

    Mat2 matrix(int g, double psi0) const {
        if (g < N) {
            double th = 2 * M_PI * g / N;
            return rotation(th);
        }
        double phi = psi0 + M_PI * (g - N) / N;
        double c = std::cos(2 * phi), s = std::sin(2 * phi);
        return {c, s, s, -c};
    }
};

struct LatticeBuilder {
    Vec2 b1{0, 0}, b2{0, 0};
    bool has1 = false, has2 = false;
    double tol;

    explicit LatticeBuilder(double scale) : tol(1e-9 * std::fmax(scale, 1.0)) {}

    void gauss() {
        if (!has2) return;
        for (int it = 0; it < 64; ++it) {
            if (b1.dot(b1) > b2.dot(b2)) std::swap(b1, b2);
            double mu = std::round(b1.dot(b2) / b1.dot(b1));
            if (mu == 0) break;
            b2 = b2 - b1 * mu;
        }
        if (b1.dot(b1) > b2.dot(b2)) std::swap(b1, b2);
    }

    void add(Vec2 v) {
        for (int guard = 0; guard < 128; ++guard) {
            if (v.norm() < tol) return;
            if (!has1) { b1 = v; has1 = true; return; }
            if (!has2) {
                if (std::fabs(b1.cross(v)) > tol * (b1.norm() + 1)) {
                    b2 = v;
                    has2 = true;
                    gauss();
                    return;
                }
                // parallel: one-dimensional euclid on collinear vectors
                Vec2 u = b1, w = v;
                for (int it = 0; it < 200 && w.norm() >= tol; ++it) {
                    double k = std::round(u.dot(w) / w.dot(w));
                    Vec2 r = u - w * k;
                    u = w;
                    w = r;
                }
                b1 = u;
                return;
            }
            double det = b1.cross(b2);
            double c1 = v.cross(b2) / det;
            double c2 = b1.cross(v) / det;
            Vec2 r = v - b1 * std::round(c1) - b2 * std::round(c2);
            if (r.norm() < tol) return;
            // enlarge the lattice: restart with the three generators
            Vec2 g1 = b1, g2 = b2;
            has1 = has2 = false;
            b1 = b2 = {0, 0};
            add(r);
            add(g1);
            add(g2);
            return;
        }
        throw std::logic_error("period lattice reduction did not converge");
    }

    bool contains(Vec2 v) const {
        if (!has2) return false;
        double det = b1.cross(b2);
        double c1 = v.cross(b2) / det;
        double c2 = b1.cross(v) / det;
        return std::fabs(c1 - std::round(c1)) < 1e-7 && std::fabs(c2 - std::round(c2)) < 1e-7;
    }
};

// Ear-clipping triangulation of a simple ccw polygon; returns index triples.
std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& poly) {
    int n = static_cast<int>(poly.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::array<int, 3>> tris;
    double scale = 0;
    for (const auto& v : poly) scale = std::fmax(scale, std::fmax(std::fabs(v.x), std::fabs(v.y)));
    double eps = 1e-12 * std::fmax(scale, 1.0);

    auto inside = [&](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
        double d1 = (b - a).cross(p - a);
        double d2 = (c - b).cross(p - b);
        double d3 = (a - c).cross(p - c);
        return d1 > eps && d2 > eps && d3 > eps;
    };

    int guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        int m = static_cast<int>(idx.size());
        for (int i = 0; i < m; ++i) {
            int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
            Vec2 a = poly[ia], b = poly[ib], c = poly[ic];
            if ((b - a).cross(c - b) < eps) continue;  // reflex or straight corner
            bool ear = true;
            for (int j : idx) {
                if (j == ia || j == ib || j == ic) continue;
                if (inside(poly[j], a, b, c)) { ear = false; break; }
            }
            if (!ear) continue;
            tris.push_back({ia, ib, ic});
            idx.erase(idx.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped || ++guard > 4 * n)
            throw std::invalid_argument("polygon triangulation failed (is the polygon simple?)");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

}  // namespace

Surface unfold(const PolygonSpec& p) {
    p.validate();
    int n = static_cast<int>(p.vertices.size());

    long long N = 1;
    for (const auto& a : p.angles) N = std::lcm(N, a.q);
    Dihedral D{static_cast<int>(N)};
    int order = 2 * D.N;

    // Edge direction indices k_i (units of pi/N, relative to edge 0), exact.
    std::vector<int> kdir(n);
    kdir[0] = 0;
    for (int i = 1; i < n; ++i) {
        long long turn = N - p.angles[i].p * (N / p.angles[i].q);
        kdir[i] = static_cast<int>(((kdir[i - 1] + turn) % N + N) % N);
    }
    Vec2 e0 = p.vertices[1] - p.vertices[0];
    double psi0 = std::atan2(e0.y, e0.x);
    // lambda_i = reflection across the direction of edge i
    std::vector<int> lambda(n);
    for (int i = 0; i < n; ++i) lambda[i] = D.N + kdir[i];

    Surface s;
    s.kind = SurfaceKind::Unfolded;
    s.name = "unfolded_" + std::to_string(n) + "gon";
    s.polygon = p;
    s.dihedral_n = D.N;
    s.n_squares = 0;
    s.area = 2.0 * D.N * p.area();

    s.copies.resize(order);
    for (int g = 0; g < order; ++g) s.copies[g] = {D.matrix(g, psi0), g};
    s.edge_lambda = lambda;

    // Vertex classes: orbits of corners (copy, vertex) under crossing the two
    // incident edges; crossing edge j from (c, *) lands in copy c . lambda_j.
    std::vector<int> corner_class(static_cast<std::size_t>(order) * n, -1);
    auto cidx = [&](int copy, int v) { return static_cast<std::size_t>(copy) * n + v; };
    int n_classes = 0;
    std::vector<Singularity> sings;
    for (int v = 0; v < n; ++v) {
        for (int c0 = 0; c0 < order; ++c0) {
            if (corner_class[cidx(c0, v)] >= 0) continue;
            int id = n_classes++;
            std::queue<int> q;
            q.push(c0);
            corner_class[cidx(c0, v)] = id;
            long long orbit = 0;
            while (!q.empty()) {
                int c = q.front();
                q.pop();
                ++orbit;
                int e_in = (v + n - 1) % n;  // edge ending at v
                for (int e : {v, e_in}) {    // edge v starts at v
                    int c2 = D.compose(c, lambda[e]);
                    if (corner_class[cidx(c2, v)] < 0) {
                        corner_class[cidx(c2, v)] = id;
                        q.push(c2);
                    }
                }
            }
            long long num = orbit * p.angles[v].p;
            if (num % p.angles[v].q != 0)
                throw std::logic_error("non-integral cone angle in unfolding");
            Singularity sing;
            sing.class_id = id;
            sing.cone_angle_over_pi = num / p.angles[v].q;
            if (sing.cone_angle_over_pi % 2 != 0)
                throw std::logic_error("odd cone angle: unfolding is not orientable");
            sing.marked = sing.cone_angle_over_pi != 2;
            sings.push_back(sing);
        }
    }

    bool any_cone = false;
    for (const auto& sg : sings) any_cone |= sg.is_cone_point();
    if (!any_cone) {
        // mark the class of vertex 0 of the identity copy so that the
        // saddle-connection set is nonempty
        int id = corner_class[cidx(0, 0)];
        for (auto& sg : sings)
            if (sg.class_id == id) sg.marked = true;
    }
    s.singularities = sings;

    long long excess = 0;
    for (const auto& sg : sings) excess += sg.cone_angle_over_pi - 2;
    if (excess % 4 != 0) throw std::logic_error("Gauss-Bonnet parity violated in unfolding");
    s.genus = 1 + static_cast<int>(excess / 4);

    // Triangulated complex with per-face charts.
    auto tris = triangulate(p.vertices);
    auto cx = std::make_shared<FlatComplex>();
    cx->n_classes = n_classes;
    int tper = static_cast<int>(tris.size());
    cx->faces.resize(static_cast<std::size_t>(order) * tper);
    // face of (copy c, triangle t) at index c*tper + t; reflected copies get
    // reversed vertex order so every face is ccw in its chart
    for (int c = 0; c < order; ++c) {
        bool refl = s.copies[c].grp >= D.N;
        for (int t = 0; t < tper; ++t) {
            FlatComplex::Face f;
            f.copy = c;
            std::array<int, 3> ids = tris[t];
            if (refl) std::swap(ids[1], ids[2]);
            for (int k = 0; k < 3; ++k) {
                f.pos[k] = apply(s.copies[c].lin, p.vertices[ids[k]]);
                f.vclass[k] = corner_class[cidx(c, ids[k])];
            }
            cx->faces[static_cast<std::size_t>(c) * tper + t] = f;
        }
    }
    // gluings: match edges by underlying polygon-vertex pairs
    // key: (copy, vertex id lo, vertex id hi) for interior diagonals;
    // boundary edge i of copy c matches edge i of copy c.lambda_i
    std::map<std::array<int, 3>, std::pair<int, int>> open_edges;
    auto tri_ids = [&](int face) {
        int c = cx->faces[face].copy;
        std::array<int, 3> ids = tris[face % tper];
        if (s.copies[c].grp >= D.N) std::swap(ids[1], ids[2]);
        return ids;
    };
    for (int f = 0; f < static_cast<int>(cx->faces.size()); ++f) {
        auto ids = tri_ids(f);
        int c = cx->faces[f].copy;
        for (int j = 0; j < 3; ++j) {
            int a = ids[j], b = ids[(j + 1) % 3];
            bool boundary = (b == (a + 1) % n) || (a == (b + 1) % n);
            int edge_id = boundary ? (b == (a + 1) % n ? a : b) : -1;
            std::array<int, 3> key;
            if (boundary) {
                int c2 = D.compose(c, lambda[edge_id]);
                // canonical key shared by both sides of the boundary gluing
                int lo = std::min(c, c2), hi = std::max(c, c2);
                key = {-(1 + edge_id), lo, hi};
            } else {
                key = {c, std::min(a, b), std::max(a, b)};
            }
            auto it = open_edges.find(key);
            if (it == open_edges.end()) {
                open_edges.emplace(key, std::make_pair(f, j));
            } else {
                auto [f2, j2] = it->second;
                cx->faces[f].nbr_face[j] = f2;
                cx->faces[f].nbr_edge[j] = j2;
                cx->faces[f2].nbr_face[j2] = f;
                cx->faces[f2].nbr_edge[j2] = j;
                open_edges.erase(it);
            }
        }
    }
    if (!open_edges.empty()) throw std::logic_error("unfolding produced unglued edges");
    s.complex = cx;

    // Period lattice when the surface has no cone points (integrable table):
    // develop copies along a spanning tree, non-tree gluings give periods.
    if (!any_cone) {
        std::vector<char> placed(order, 0);
        std::vector<Vec2> tau(order, {0, 0});
        placed[0] = 1;
        std::queue<int> bfs;
        bfs.push(0);
        double scale = std::sqrt(s.area);
        LatticeBuilder lat(scale);
        std::vector<std::array<int, 2>> later;
        while (!bfs.empty()) {
            int c = bfs.front();
            bfs.pop();
            for (int e = 0; e < n; ++e) {
                int c2 = D.compose(c, lambda[e]);
                Vec2 anchor = apply(s.copies[c].lin, p.vertices[e]) + tau[c];
                Vec2 img = apply(s.copies[c2].lin, p.vertices[e]);
                if (!placed[c2]) {
                    placed[c2] = 1;
                    tau[c2] = anchor - img;
                    bfs.push(c2);
                } else {
                    later.push_back({c, e});
                }
            }
        }
        for (auto [c, e] : later) {
            int c2 = D.compose(c, lambda[e]);
            Vec2 anchor = apply(s.copies[c].lin, p.vertices[e]) + tau[c];
            Vec2 img = apply(s.copies[c2].lin, p.vertices[e]) + tau[c2];
            lat.add(anchor - img);
        }
        if (lat.has2) {
            lat.gauss();
            double det = std::fabs(lat.b1.cross(lat.b2));
            if (std::fabs(det - s.area) < 1e-6 * s.area && s.marked_count() == 1) {
                Basis2 g{lat.b1.x, lat.b1.y, lat.b2.x, lat.b2.y};
                double sc = 1e-9 * std::sqrt(s.area);
                for (double* c : {&g.x1, &g.y1, &g.x2, &g.y2})
                    if (std::fabs(*c) < sc) *c = 0;
                s.cover_basis = g;
                s.lattice_multiplicity = 1;
            }
        }
    }
    return s;
}

Surface Surface::transformed(const Mat2& a) const {
    Surface s = *this;
    s.frame = a * frame;
    return s;
}

long long Surface::marked_count() const {
    long long k = 0;
    for (const auto& sg : singularities) k += sg.marked ? 1 : 0;
    return k;
}

std::string Surface::describe() const {
    std::ostringstream os;
    os << "surface: " << name << "\n";
    os << "kind: "
       << (kind == SurfaceKind::Torus ? "torus"
                                      : kind == SurfaceKind::SquareTiled ? "square_tiled" : "unfolded")
       << "\n";
    os << "area: " << format_double(area) << "\n";
    os << "genus: " << genus << "\n";
    os << "vertex classes: " << singularities.size() << "\n";
    for (const auto& sg : singularities) {
        os << "  class " << sg.class_id << ": cone angle " << sg.cone_angle_over_pi
           << "*pi, prongs " << sg.prongs() << ", zero order " << sg.zero_order()
           << (sg.is_cone_point() ? "" : " (regular)") << (sg.marked ? ", marked" : "") << "\n";
    }
    if (kind == SurfaceKind::Unfolded)
        os << "copies: " << copies.size() << " (dihedral group of order " << 2 * dihedral_n << ")\n";
    if (cover_basis) {
        os << "cover lattice: [" << format_double(cover_basis->x1) << ", "
           << format_double(cover_basis->y1) << "], [" << format_double(cover_basis->x2) << ", "
           << format_double(cover_basis->y2) << "], multiplicity " << lattice_multiplicity << "\n";
    }
    Mat2 id;
    if (frame.a11 != id.a11 || frame.a12 != id.a12 || frame.a21 != id.a21 || frame.a22 != id.a22) {
        os << "frame: [" << format_double(frame.a11) << ", " << format_double(frame.a12) << ", "
           << format_double(frame.a21) << ", " << format_double(frame.a22) << "]\n";
    }
    return os.str();
}

}  // namespace flatlab
