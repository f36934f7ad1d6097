#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/flows.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

struct SaddleEntry {
    Holonomy v;  // canonical representative, frame applied
    long long multiplicity = 1;
};

struct SaddleSet {
    std::string surface;
    double cutoff = 0;
    std::vector<SaddleEntry> vectors;  // sorted by (length, x, y)

    bool contains(const Holonomy& h, double tol = 1e-9) const;
};

struct EnumerateOptions {
    std::uint64_t budget = 200'000'000;  // outer-loop / BFS state budget
};

// All saddle-connection holonomies with max-norm length <= L, canonical
// signs, with multiplicity. Torus: primitive integer vectors. SquareTiled:
// integer separatrix tracing. Unfolded: developed straight segments between
// marked-point lifts (breadth-first development plus exact ray verification).
SaddleSet enumerate_saddles(const Surface& q, double L, const EnumerateOptions& opt = {});

struct Systole {
    double value = 0;
    Holonomy witness;       // act(A, witness_base); value == witness.length()
    Holonomy witness_base;  // holonomy of the realizing connection on q
};

// min over saddle connections of length(act(A, v)), certified: a witness
// gives the upper bound M, and every competitor lies in the region
// {v : length(A v) <= M}, which is searched exhaustively.
Systole systole(const Surface& q, const Mat2& A = {}, const EnumerateOptions& opt = {});

// Variant for sweeps along a matrix path: hint holds the lattice coordinates
// of the previous witness and is updated in place ((0,0) = no hint).
Systole systole_with_hint(const Surface& q, const Mat2& A, std::pair<long long, long long>& hint,
                          const EnumerateOptions& opt = {});

// Certified lower bound for inf over s in [s_lo, s_hi] of
// systole(q, geodesic(t) * horocycle(s)). The x-range of each vector over
// the interval is the exact range of an affine map, so the per-vector bound
// max(e^{t/2} min|x-range|, e^{-t/2}|y|) is sound.
double systole_lower_bound_on_interval(const Surface& q, double t, double s_lo, double s_hi,
                                       const EnumerateOptions& opt = {});

// Same bound with an explicit cap: a return value >= cap certifies that no
// saddle connection has a certified interval bound below cap.
double systole_interval_bound_capped(const Surface& q, double t, double s_lo, double s_hi,
                                     double cap, const EnumerateOptions& opt = {});

// Effective holonomies whose certified bound over [s_lo, s_hi] at time t is
// below cap (lattice surfaces). Used to test many subintervals of a parent
// interval against one candidate list.
std::vector<Holonomy> interval_candidates(const Surface& q, double t, double s_lo, double s_hi,
                                          double cap, const EnumerateOptions& opt = {});

// Per-vector certified bound over an s-interval at time t.
double interval_vector_bound(const Holonomy& v, double t, double s_lo, double s_hi);

// Visits every saddle-connection holonomy w (frame applied, both signs) with
// rows.w componentwise in [l1,h1] x [l2,h2]. Lattice surfaces only.
void scan_lattice_box(const Surface& q, const Mat2& rows, double l1, double h1, double l2,
                      double h2, std::uint64_t budget,
                      const std::function<void(const Holonomy&)>& visit);

std::string saddle_csv(const SaddleSet& s);

// --- flat-complex ray tracing (unfolded surfaces) ------------------------

struct RayHit {
    double length = 0;
    int vclass = -1;
};

// Traces the separatrix from the given corner of the complex in direction
// dir (which must lie in the corner's wedge) until the first marked vertex.
std::optional<RayHit> trace_separatrix(const Surface& q, int face, int corner, Vec2 dir,
                                       double max_len);

// Straight-line trace from a point in a face chart; cb is called at every
// edge crossing and at the endpoint with (face, chart position, length so
// far). Returns false if the ray ran into a marked vertex before time T.
bool trace_on_complex(const Surface& q, int start_face, Vec2 chart_point, Vec2 dir, double T,
                      const std::function<void(int, Vec2, double)>& cb);

// Face of the complex containing a point given in the chart of one copy.
int locate_face(const Surface& q, int copy, Vec2 chart_point);

}  // namespace flatlab
