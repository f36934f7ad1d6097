#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/cf_oracle.hpp"
#include "flatlab/flows.hpp"

namespace flatlab {

struct Vec2 {
    double x = 0, y = 0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const;
};

Vec2 apply(const Mat2& m, const Vec2& v);

// Interior angle p*pi/q in lowest terms.
struct RationalAngle {
    long long p = 1, q = 2;
};

struct PolygonSpec {
    std::vector<Vec2> vertices;         // simple polygon, counterclockwise
    std::vector<RationalAngle> angles;  // interior angle at vertex i

    // Checks: lowest terms, each angle in (0, 2pi), exact angle sum (n-2)pi,
    // simple ccw polygon, coordinates consistent with the declared angles.
    void validate() const;
    double area() const;

    static PolygonSpec unit_square();
};

// A vertex class of the flat complex. Cone angle is an exact integer
// multiple of pi; the prong count equals cone_angle_over_pi and the
// (quadratic-differential) zero order is cone_angle_over_pi - 2.
struct Singularity {
    int class_id = 0;
    long long cone_angle_over_pi = 2;
    bool marked = true;  // belongs to Sigma (saddle connection endpoints)

    long long prongs() const { return cone_angle_over_pi; }
    long long zero_order() const { return cone_angle_over_pi - 2; }
    bool is_cone_point() const { return cone_angle_over_pi != 2; }
};

enum class SurfaceKind { Torus, SquareTiled, Unfolded };

// Triangulated flat complex with translation gluings, built for unfolded
// surfaces. Faces carry their own chart coordinates; crossing a glued edge
// translates charts so that matching endpoints coincide.
struct FlatComplex {
    struct Face {
        int copy = 0;
        std::array<Vec2, 3> pos;
        std::array<int, 3> vclass{-1, -1, -1};
        std::array<int, 3> nbr_face{-1, -1, -1};  // across edge j = (pos[j], pos[j+1])
        std::array<int, 3> nbr_edge{-1, -1, -1};
    };
    std::vector<Face> faces;
    int n_classes = 0;
};

class Surface {
public:
    SurfaceKind kind = SurfaceKind::Torus;
    std::string name = "torus";

    // Square-tiled data (torus is the n = 1 case); images are 0-based.
    int n_squares = 1;
    std::vector<int> perm_right, perm_up;
    std::vector<int> square_class;  // vertex class of the bottom-left corner of square i

    // Unfolded data.
    PolygonSpec polygon;
    int dihedral_n = 0;  // group order is 2 * dihedral_n
    struct Copy {
        Mat2 lin;      // linear part (rotation or reflection)
        int grp = 0;   // group element index: [0,N) rotations, [N,2N) reflections
    };
    std::vector<Copy> copies;
    std::vector<int> edge_lambda;  // group index of the reflection across edge i
    std::shared_ptr<const FlatComplex> complex;

    std::vector<Singularity> singularities;
    double area = 1;
    int genus = 1;

    // Set when the saddle-connection support is exactly
    // { cover_basis * (a,b) : gcd(a,b) = 1 }, each with lattice_multiplicity.
    std::optional<Basis2> cover_basis;
    long long lattice_multiplicity = 1;

    // Pre-transform applied to all holonomies (the surface A*q).
    Mat2 frame;

    Surface transformed(const Mat2& a) const;

    long long marked_count() const;
    std::string describe() const;
};

// Unit-square torus with one marked point; saddle-connection holonomies are
// the primitive integer vectors.
Surface make_torus();

// Origami from right/up permutations (0-based images, equal degree,
// jointly transitive). Vertex classes are the commutator cycles; all vertex
// classes are marked.
Surface make_square_tiled(const std::vector<int>& right, const std::vector<int>& up);

// Katok-Zemlyakov unfolding of a rational polygon: 2N copies indexed by the
// dihedral group, N = lcm of the angle denominators. Marks cone points only;
// when none exist the class of vertex 0 of the identity copy is marked.
Surface unfold(const PolygonSpec& p);

// Exact vertex-class data of an origami: cycles of the commutator
// right o up o right^-1 o up^-1 acting on squares.
std::vector<std::vector<int>> commutator_cycles(const std::vector<int>& right,
                                                const std::vector<int>& up);

// Composition a o b in the dihedral group of order 2N: indices [0,N) are
// rotations by 2 pi k / N, [N,2N) reflections across psi0 + (k-N) pi / N.
int dihedral_compose(int N, int a, int b);

}  // namespace flatlab
