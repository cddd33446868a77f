#ifndef ETB_PARTITION_HPP
#define ETB_PARTITION_HPP

#include <set>
#include <span>
#include <vector>

#include "etb/geometry.hpp"

namespace etb {

/// Closed ball guaranteed to contain an agent's true position.
struct UncertaintyDisk {
    Point2 center;
    double radius = 0.0;

    static UncertaintyDisk exact(const Point2 &p) { return {p, 0.0}; }
    bool contains(const Point2 &q, double tol = kGeomTol) const { return dist(q, center) <= radius + tol; }
};

/// Inner (guaranteed) and outer (dual-guaranteed) cell approximations.
struct CellPair {
    SimplePolygon guaranteed;
    SimplePolygon dual;
};

/// Exact Voronoi cell of site i within the convex region.
SimplePolygon voronoi_cell(std::size_t i, std::span<const Point2> positions, const SimplePolygon &region);

/// Sites whose exact Voronoi cells touch (shared edge or corner).
std::vector<std::set<int>> voronoi_neighbors(std::span<const Point2> positions, const SimplePolygon &region);

/// Points guaranteed closer to `own` than to every realization of `others`.
/// The result is contained in the exact guaranteed cell.
SimplePolygon guaranteed_cell(const UncertaintyDisk &own, std::span<const UncertaintyDisk> others,
                              const SimplePolygon &region, int chords = kDefaultChords);
SimplePolygon guaranteed_cell(const Point2 &own, std::span<const UncertaintyDisk> others,
                              const SimplePolygon &region, int chords = kDefaultChords);

/// Points that some realization could assign to `own`. The result contains the
/// exact dual-guaranteed cell; it can be non-convex but stays star-shaped about own.
SimplePolygon dual_guaranteed_cell(const UncertaintyDisk &own, std::span<const UncertaintyDisk> others,
                                   const SimplePolygon &region, int chords = kDefaultChords);
SimplePolygon dual_guaranteed_cell(const Point2 &own, std::span<const UncertaintyDisk> others,
                                   const SimplePolygon &region, int chords = kDefaultChords);

CellPair cell_pair(const Point2 &own, std::span<const UncertaintyDisk> others, const SimplePolygon &region,
                   int chords = kDefaultChords);

/// Dual-guaranteed neighbor test: the two dual cells intersect (hull test, touching counts).
bool dg_neighbor(std::size_t i, std::size_t j, std::span<const SimplePolygon> dual_cells);

/// Agents outside this distance from `own` cannot be dual-guaranteed neighbors.
double exclusion_radius(const Point2 &own, const SimplePolygon &dual);

}  // namespace etb

#endif  // ETB_PARTITION_HPP
