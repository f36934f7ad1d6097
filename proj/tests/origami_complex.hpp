#pragma once

// Test-only helper: builds an origami as a triangulated flat complex so that
// saddle-connection enumeration runs through the breadth-first development
// route instead of the integer separatrix tracer. Used as the independent
// all-directions tracer in cross-checks.

#include <memory>
#include <string>
#include <vector>

#include "flatlab/surface.hpp"

namespace flatlab_test {

inline flatlab::Surface origami_complex_surface(const std::vector<int>& right,
                                                const std::vector<int>& up) {
    using namespace flatlab;
    Surface base = make_square_tiled(right, up);
    int n = static_cast<int>(right.size());
    std::vector<int> rinv(n), uinv(n);
    for (int i = 0; i < n; ++i) rinv[right[i]] = i;
    for (int i = 0; i < n; ++i) uinv[up[i]] = i;

    auto cx = std::make_shared<FlatComplex>();
    cx->n_classes = static_cast<int>(base.singularities.size());
    cx->faces.resize(2 * n);
    auto cls = [&](int sq) { return base.square_class[sq]; };
    for (int i = 0; i < n; ++i) {
        FlatComplex::Face lo, hi;
        lo.copy = i;
        hi.copy = i;
        lo.pos = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}};
        hi.pos = {Vec2{0, 0}, Vec2{1, 1}, Vec2{0, 1}};
        lo.vclass = {cls(i), cls(right[i]), cls(up[right[i]])};
        hi.vclass = {cls(i), cls(up[right[i]]), cls(up[i])};
        lo.nbr_face[0] = 2 * uinv[i] + 1;  // bottom meets the top of the square below
        lo.nbr_edge[0] = 1;
        lo.nbr_face[1] = 2 * right[i] + 1;  // right meets the left of right(i)
        lo.nbr_edge[1] = 2;
        lo.nbr_face[2] = 2 * i + 1;  // diagonal
        lo.nbr_edge[2] = 0;
        hi.nbr_face[0] = 2 * i;
        hi.nbr_edge[0] = 2;
        hi.nbr_face[1] = 2 * up[i];
        hi.nbr_edge[1] = 0;
        hi.nbr_face[2] = 2 * rinv[i];
        hi.nbr_edge[2] = 1;
        cx->faces[2 * i] = lo;
        cx->faces[2 * i + 1] = hi;
    }
    Surface s;
    s.kind = SurfaceKind::Unfolded;
    s.name = "origami_complex_n" + std::to_string(n);
    s.n_squares = n;
    s.singularities = base.singularities;
    s.area = n;
    s.genus = base.genus;
    s.complex = cx;
    return s;  // no cover_basis: forces the generic enumeration path
}

}  // namespace flatlab_test
