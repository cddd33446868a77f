#ifndef ETB_DENSITY_HPP
#define ETB_DENSITY_HPP

#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "etb/geometry.hpp"

namespace etb {

class DensityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UniformDensity {
    double value = 1.0;
};

/// phi(q) = sum_k exp(-|q - c_k| / scale)
struct ExponentialSumDensity {
    std::vector<Point2> centers;
    double scale = 100.0;
};

/// Bilinear interpolation over a regular grid; values are row-major with x fastest.
struct GridDensity {
    int nx = 0;
    int ny = 0;
    Point2 origin;
    double dx = 1.0;
    double dy = 1.0;
    std::vector<double> values;

    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
};

class DensityField {
public:
    using Kind = std::variant<UniformDensity, ExponentialSumDensity, GridDensity>;

    DensityField() : kind_(UniformDensity{}) {}
    explicit DensityField(Kind kind);

    static DensityField uniform(double value = 1.0) { return DensityField(UniformDensity{value}); }
    static DensityField exponential_sum(std::vector<Point2> centers, double scale);
    /// Two exponential bumps at (20,30) and (30,10) with a 100 m length scale.
    static DensityField reference_field();

    /// Plain-text grid: header `nx ny x0 y0 dx dy`, then nx*ny row-major values.
    static DensityField load_grid(const std::filesystem::path &path);

    double operator()(const Point2 &q) const;
    const Kind &kind() const { return kind_; }

private:
    Kind kind_;
};

class MassCentroid {
public:
    MassCentroid() = default;
    MassCentroid(double mass, Point2 centroid) : mass_(mass), centroid_(centroid) {}

    double mass() const { return mass_; }
    /// Throws DensityError when the region has no mass.
    const Point2 &centroid() const;
    bool empty() const { return mass_ <= 0.0; }

private:
    double mass_ = 0.0;
    Point2 centroid_;
};

/// Degree-4, 6-point Gauss rule applied per triangle of the polygon's triangulation.
MassCentroid mass_centroid(const SimplePolygon &poly, const DensityField &field);

/// Integral over the polygon of |q - p|^2 phi(q).
double second_moment(const SimplePolygon &poly, const Point2 &p, const DensityField &field);

/// Locational cost: sum over Voronoi cells of the second moment about each site.
double objective_H(std::span<const Point2> positions, const SimplePolygon &region,
                   const DensityField &field);

}  // namespace etb

#endif  // ETB_DENSITY_HPP
