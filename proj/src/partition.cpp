#include "etb/partition.hpp"

#include <algorithm>

namespace etb {

namespace {

// Exact (radius-0) constraints are plain bisector cuts; doing them first keeps
// the working polygon convex for as long as possible.
std::vector<std::size_t> exact_first(std::span<const UncertaintyDisk> others, double own_radius) {
    std::vector<std::size_t> order(others.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t k) { return own_radius + others[k].radius <= kExactDelta; });
    return order;
}

}  // namespace

SimplePolygon voronoi_cell(std::size_t i, std::span<const Point2> positions, const SimplePolygon &region) {
    if (i >= positions.size()) throw GeometryError("agent index out of range");
    SimplePolygon cell = region;
    for (std::size_t j = 0; j < positions.size() && !cell.empty(); ++j) {
        if (j == i) continue;
        if (positions[j] == positions[i]) throw GeometryError("degenerate configuration");
        cell = clip_halfplane(cell, HalfPlane::bisector(positions[i], positions[j]));
    }
    return cell;
}

std::vector<std::set<int>> voronoi_neighbors(std::span<const Point2> positions, const SimplePolygon &region) {
    const std::size_t n = positions.size();
    std::vector<SimplePolygon> cells;
    cells.reserve(n);
    for (std::size_t i = 0; i < n; ++i) cells.push_back(voronoi_cell(i, positions, region));
    std::vector<std::set<int>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (convex_hulls_intersect(cells[i], cells[j])) {
                out[i].insert(static_cast<int>(j));
                out[j].insert(static_cast<int>(i));
            }
        }
    }
    return out;
}

SimplePolygon guaranteed_cell(const UncertaintyDisk &own, std::span<const UncertaintyDisk> others,
                              const SimplePolygon &region, int chords) {
    SimplePolygon cell = region;
    for (std::size_t k : exact_first(others, own.radius)) {
        if (cell.empty()) break;
        const UncertaintyDisk &d = others[k];
        const double delta = own.radius + d.radius;
        if (delta >= dist(own.center, d.center)) return {};
        cell = clip_focal_inner(cell, own.center, d.center, delta, chords);
    }
    return cell;
}

SimplePolygon guaranteed_cell(const Point2 &own, std::span<const UncertaintyDisk> others,
                              const SimplePolygon &region, int chords) {
    return guaranteed_cell(UncertaintyDisk::exact(own), others, region, chords);
}

SimplePolygon dual_guaranteed_cell(const UncertaintyDisk &own, std::span<const UncertaintyDisk> others,
                                   const SimplePolygon &region, int chords) {
    SimplePolygon cell = region;
    for (std::size_t k : exact_first(others, own.radius)) {
        if (cell.empty()) break;
        const UncertaintyDisk &d = others[k];
        const double delta = own.radius + d.radius;
        if (delta >= dist(own.center, d.center)) continue;
        cell = subtract_focal_outer(cell, own.center, d.center, delta, chords).polygon;
    }
    return cell;
}

SimplePolygon dual_guaranteed_cell(const Point2 &own, std::span<const UncertaintyDisk> others,
                                   const SimplePolygon &region, int chords) {
    return dual_guaranteed_cell(UncertaintyDisk::exact(own), others, region, chords);
}

CellPair cell_pair(const Point2 &own, std::span<const UncertaintyDisk> others, const SimplePolygon &region,
                   int chords) {
    return {guaranteed_cell(own, others, region, chords), dual_guaranteed_cell(own, others, region, chords)};
}

bool dg_neighbor(std::size_t i, std::size_t j, std::span<const SimplePolygon> dual_cells) {
    if (i >= dual_cells.size() || j >= dual_cells.size()) throw GeometryError("agent index out of range");
    return convex_hulls_intersect(dual_cells[i], dual_cells[j]);
}

double exclusion_radius(const Point2 &own, const SimplePolygon &dual) {
    return 2.0 * farthest_vertex_distance(dual, own);
}

}  // namespace etb
