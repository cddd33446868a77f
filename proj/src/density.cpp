#include "etb/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "etb/partition.hpp"

namespace etb {

namespace {

struct GaussNode {
    double l1, l2, l3, w;
};

// Symmetric 6-point rule on the reference triangle, exact for degree 4.
constexpr double kA1 = 0.445948490915965;
constexpr double kB1 = 0.108103018168070;
constexpr double kW1 = 0.223381589678011;
constexpr double kA2 = 0.091576213509771;
constexpr double kB2 = 0.816847572980459;
constexpr double kW2 = 0.109951743655322;

constexpr std::array<GaussNode, 6> kRule{{
    {kA1, kA1, kB1, kW1},
    {kA1, kB1, kA1, kW1},
    {kB1, kA1, kA1, kW1},
    {kA2, kA2, kB2, kW2},
    {kA2, kB2, kA2, kW2},
    {kB2, kA2, kA2, kW2},
}};

// Triangles longer than this are split 1:4 before the rule is applied; the
// exponential bumps have a gradient kink at their centres.
constexpr double kMaxEdge = 10.0;

template <typename F>
void integrate_triangle(const Point2 &a, const Point2 &b, const Point2 &c, F &visit) {
    const double longest = std::max({dist2(a, b), dist2(b, c), dist2(c, a)});
    if (longest > kMaxEdge * kMaxEdge) {
        const Point2 ab = (a + b) * 0.5, bc = (b + c) * 0.5, ca = (c + a) * 0.5;
        integrate_triangle(a, ab, ca, visit);
        integrate_triangle(ab, b, bc, visit);
        integrate_triangle(ca, bc, c, visit);
        integrate_triangle(ab, bc, ca, visit);
        return;
    }
    const double tri_area = 0.5 * cross(b - a, c - a);
    for (const GaussNode &g : kRule) visit(g.l1 * a + g.l2 * b + g.l3 * c, g.w * tri_area);
}

template <typename F>
void for_each_node(const SimplePolygon &poly, F &&visit) {
    for (const auto &tri : triangulate(poly)) integrate_triangle(tri[0], tri[1], tri[2], visit);
}

}  // namespace

DensityField::DensityField(Kind kind) : kind_(std::move(kind)) {
    if (const auto *u = std::get_if<UniformDensity>(&kind_)) {
        if (!(u->value >= 0.0) || !std::isfinite(u->value)) throw DensityError("uniform density must be >= 0");
    } else if (const auto *e = std::get_if<ExponentialSumDensity>(&kind_)) {
        if (!(e->scale > 0.0)) throw DensityError("exponential scale must be positive");
    } else if (const auto *g = std::get_if<GridDensity>(&kind_)) {
        if (g->nx < 2 || g->ny < 2) throw DensityError("grid needs at least 2x2 nodes");
        if (!(g->dx > 0.0) || !(g->dy > 0.0)) throw DensityError("grid spacing must be positive");
        if (g->values.size() != static_cast<std::size_t>(g->nx) * static_cast<std::size_t>(g->ny)) {
            throw DensityError("grid value count does not match nx*ny");
        }
        for (double v : g->values) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw DensityError("grid values must be finite and >= 0");
        }
    }
}

DensityField DensityField::exponential_sum(std::vector<Point2> centers, double scale) {
    return DensityField(ExponentialSumDensity{std::move(centers), scale});
}

DensityField DensityField::reference_field() {
    return exponential_sum({{20.0, 30.0}, {30.0, 10.0}}, 100.0);
}

DensityField DensityField::load_grid(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw DensityError("cannot open density grid " + path.string());
    GridDensity g;
    if (!(in >> g.nx >> g.ny >> g.origin.x >> g.origin.y >> g.dx >> g.dy)) {
        throw DensityError("malformed density grid header in " + path.string());
    }
    if (g.nx < 2 || g.ny < 2) throw DensityError("grid needs at least 2x2 nodes");
    g.values.resize(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny));
    for (double &v : g.values) {
        if (!(in >> v)) throw DensityError("density grid " + path.string() + " has too few values");
    }
    return DensityField(std::move(g));
}

double DensityField::operator()(const Point2 &q) const {
    struct Eval {
        const Point2 &q;
        double operator()(const UniformDensity &u) const { return u.value; }
        double operator()(const ExponentialSumDensity &e) const {
            double s = 0.0;
            for (const Point2 &c : e.centers) s += std::exp(-dist(q, c) / e.scale);
            return s;
        }
        double operator()(const GridDensity &g) const {
            // Clamp to the grid so the field is defined (constant extension) outside it.
            const double fx = std::clamp((q.x - g.origin.x) / g.dx, 0.0, static_cast<double>(g.nx - 1));
            const double fy = std::clamp((q.y - g.origin.y) / g.dy, 0.0, static_cast<double>(g.ny - 1));
            const int ix = std::min(static_cast<int>(fx), g.nx - 2);
            const int iy = std::min(static_cast<int>(fy), g.ny - 2);
            const double u = fx - ix;
            const double v = fy - iy;
            return (1 - u) * (1 - v) * g.at(ix, iy) + u * (1 - v) * g.at(ix + 1, iy) +
                   (1 - u) * v * g.at(ix, iy + 1) + u * v * g.at(ix + 1, iy + 1);
        }
    };
    return std::visit(Eval{q}, kind_);
}

const Point2 &MassCentroid::centroid() const {
    if (empty()) throw DensityError("centroid of a massless region is undefined");
    return centroid_;
}

MassCentroid mass_centroid(const SimplePolygon &poly, const DensityField &field) {
    double m = 0.0;
    Point2 first;
    for_each_node(poly, [&](const Point2 &q, double w) {
        const double f = field(q) * w;
        m += f;
        first += f * q;
    });
    if (!(m > 0.0)) return {};
    return {m, first / m};
}

double second_moment(const SimplePolygon &poly, const Point2 &p, const DensityField &field) {
    double s = 0.0;
    for_each_node(poly, [&](const Point2 &q, double w) { s += dist2(q, p) * field(q) * w; });
    return s;
}

double objective_H(std::span<const Point2> positions, const SimplePolygon &region,
                   const DensityField &field) {
    double h = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        h += second_moment(voronoi_cell(i, positions, region), positions[i], field);
    }
    return h;
}

}  // namespace etb
