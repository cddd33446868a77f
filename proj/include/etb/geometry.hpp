#ifndef ETB_GEOMETRY_HPP
#define ETB_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace etb {

/// Boundary tolerance (meters) used by every closed-set membership test.
inline constexpr double kGeomTol = 1e-9;
/// Distance-difference offsets at or below this are treated as plain bisectors.
inline constexpr double kExactDelta = 1e-12;

/// Default number of chord samples per hyperbolic cell boundary.
inline constexpr int kDefaultChords = 16;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 &operator+=(const Point2 &o) { x += o.x; y += o.y; return *this; }
    Point2 &operator-=(const Point2 &o) { x -= o.x; y -= o.y; return *this; }
    Point2 &operator*=(double s) { x *= s; y *= s; return *this; }

    friend Point2 operator+(Point2 a, const Point2 &b) { return a += b; }
    friend Point2 operator-(Point2 a, const Point2 &b) { return a -= b; }
    friend Point2 operator*(Point2 a, double s) { return a *= s; }
    friend Point2 operator*(double s, Point2 a) { return a *= s; }
    friend Point2 operator/(Point2 a, double s) { return a *= (1.0 / s); }
    friend Point2 operator-(const Point2 &a) { return {-a.x, -a.y}; }
    friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline double dot(const Point2 &a, const Point2 &b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2 &a, const Point2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2 &a) { return std::hypot(a.x, a.y); }
inline double dist(const Point2 &a, const Point2 &b) { return norm(a - b); }
inline double dist2(const Point2 &a, const Point2 &b) { return dot(a - b, a - b); }
/// Counter-clockwise quarter turn.
inline Point2 perp(const Point2 &a) { return {-a.y, a.x}; }

/// Counter-clockwise simple polygon. An empty vertex list is the empty set.
struct SimplePolygon {
    std::vector<Point2> vertices;

    SimplePolygon() = default;
    explicit SimplePolygon(std::vector<Point2> v) : vertices(std::move(v)) {}

    bool empty() const { return vertices.empty(); }
    std::size_t size() const { return vertices.size(); }
    const Point2 &operator[](std::size_t i) const { return vertices[i]; }
    const Point2 &wrap(std::size_t i) const { return vertices[i % vertices.size()]; }

    static SimplePolygon rectangle(double x0, double y0, double x1, double y1);
};

/// The closed set {q : q . normal <= offset}.
struct HalfPlane {
    Point2 normal;
    double offset = 0.0;

    HalfPlane() = default;
    HalfPlane(Point2 n, double c);

    /// Points at least as close to `keep` as to `other`.
    static HalfPlane bisector(const Point2 &keep, const Point2 &other);
    /// Left side of the directed line a -> b.
    static HalfPlane left_of(const Point2 &a, const Point2 &b);

    double signed_distance(const Point2 &q) const { return dot(q, normal) - offset; }
    bool contains(const Point2 &q, double tol = kGeomTol) const { return signed_distance(q) <= tol; }
};

struct Circle {
    Point2 center;
    double radius = 0.0;

    bool contains(const Point2 &q, double tol = kGeomTol) const {
        return dist(q, center) <= radius + tol;
    }
};

double signed_area(const SimplePolygon &poly);
double area(const SimplePolygon &poly);
bool is_convex(const SimplePolygon &poly);

/// Drops repeated and collinear vertices; returns empty when the area vanishes.
SimplePolygon cleaned(const SimplePolygon &poly, double tol = kGeomTol);

/// Andrew monotone chain; CCW, no collinear vertices.
SimplePolygon convex_hull(std::span<const Point2> points);

SimplePolygon clip_halfplane(const SimplePolygon &poly, const HalfPlane &h);

/// Welzl's algorithm with a fixed shuffle seed, so results are reproducible.
Circle min_enclosing_circle(std::span<const Point2> points);

/// Samples K points on the branch of {q : |q-f_far| - |q-f_near| = delta}
/// that wraps f_near, symmetric about the focal axis and extending past
/// `window` on both sides.
std::vector<Point2> hyperbola_branch(const Point2 &f_near, const Point2 &f_far, double delta,
                                     const SimplePolygon &window, int chords);

/// Convex polygon contained in the focal region {q : |q-f_far| - |q-f_near| >= delta}
/// that agrees with it on the part of the plane occupied by `window`, up to chord error.
SimplePolygon focal_region_inner(const Point2 &f_near, const Point2 &f_far, double delta,
                                 const SimplePolygon &window, int chords);

/// poly ∩ (inner chord approximation of the focal region around f_near).
SimplePolygon clip_focal_inner(const SimplePolygon &poly, const Point2 &f_near,
                               const Point2 &f_far, double delta, int chords);

struct SubtractResult {
    SimplePolygon polygon;
    /// The cut was skipped because it would split `polygon`; the result is
    /// still a superset of the exact one.
    bool fallback = false;
};

/// poly minus an inner approximation of the focal region around `f_remove`.
/// Always a superset of poly ∩ {q : |q-f_keep| - |q-f_remove| <= delta}.
SubtractResult subtract_focal_outer(const SimplePolygon &poly, const Point2 &f_keep,
                                    const Point2 &f_remove, double delta, int chords);

/// Closest point of B(c1,b) ∩ B(c2,b) to p.
Point2 project_onto_lens(const Point2 &p, const Point2 &c1, const Point2 &c2, double b);

double farthest_vertex_distance(const SimplePolygon &poly, const Point2 &p);

/// Closed-set membership; points within kGeomTol of the boundary count as inside.
bool point_in_polygon(const Point2 &p, const SimplePolygon &poly);

/// Separating-axis test on the convex hulls; touching counts as intersecting.
bool convex_hulls_intersect(const SimplePolygon &a, const SimplePolygon &b, double tol = kGeomTol);

/// Triangles covering the polygon: a fan for convex input, ear clipping otherwise.
std::vector<std::array<Point2, 3>> triangulate(const SimplePolygon &poly);

}  // namespace etb

#endif  // ETB_GEOMETRY_HPP
