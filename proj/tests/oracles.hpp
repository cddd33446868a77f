// Brute-force reference computations shared by the unit and acceptance suites.
#ifndef ETB_TESTS_ORACLES_HPP
#define ETB_TESTS_ORACLES_HPP

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "etb/density.hpp"
#include "etb/geometry.hpp"
#include "etb/partition.hpp"

namespace oracle {

using etb::Point2;
using etb::SimplePolygon;

inline bool circle_covers(const Point2 &c, double r, const std::vector<Point2> &pts) {
    for (const Point2 &p : pts) {
        if (etb::dist(c, p) > r + 1e-9) return false;
    }
    return true;
}

/// O(n^4): every circle through 2 or 3 of the points, smallest one covering all.
inline double brute_mec_radius(const std::vector<Point2> &pts) {
    if (pts.size() == 1) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 c = (pts[i] + pts[j]) * 0.5;
            const double r = etb::dist(pts[i], pts[j]) * 0.5;
            if (r < best && circle_covers(c, r, pts)) best = r;
            for (std::size_t k = j + 1; k < n; ++k) {
                const Point2 a = pts[i], b = pts[j], q = pts[k];
                const double d = 2.0 * (a.x * (b.y - q.y) + b.x * (q.y - a.y) + q.x * (a.y - b.y));
                if (std::abs(d) < 1e-12) continue;
                const double a2 = etb::dot(a, a), b2 = etb::dot(b, b), q2 = etb::dot(q, q);
                const Point2 cc{(a2 * (b.y - q.y) + b2 * (q.y - a.y) + q2 * (a.y - b.y)) / d,
                                (a2 * (q.x - b.x) + b2 * (a.x - q.x) + q2 * (b.x - a.x)) / d};
                const double rr = etb::dist(cc, a);
                if (rr < best && circle_covers(cc, rr, pts)) best = rr;
            }
        }
    }
    return best;
}

struct Box {
    double x0, y0, x1, y1;
};

inline Box bounds(const SimplePolygon &poly) {
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point2 &v : poly.vertices) {
        b.x0 = std::min(b.x0, v.x);
        b.y0 = std::min(b.y0, v.y);
        b.x1 = std::max(b.x1, v.x);
        b.y1 = std::max(b.y1, v.y);
    }
    return b;
}

/// n x n cell-centred grid over a box.
inline std::vector<Point2> grid(const Box &b, int n) {
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            out.push_back({b.x0 + (ix + 0.5) * (b.x1 - b.x0) / n, b.y0 + (iy + 0.5) * (b.y1 - b.y0) / n});
        }
    }
    return out;
}

/// Midpoint rule over an axis-aligned rectangle.
inline double grid_mass(const Box &b, const etb::DensityField &phi, int n) {
    const double cell = (b.x1 - b.x0) * (b.y1 - b.y0) / (static_cast<double>(n) * n);
    double m = 0.0;
    for (const Point2 &q : grid(b, n)) m += phi(q);
    return m * cell;
}

inline std::size_t nearest(const Point2 &q, const std::vector<Point2> &sites) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sites.size(); ++k) {
        const double d = etb::dist2(q, sites[k]);
        if (d < bd) { bd = d; best = k; }
    }
    return best;
}

/// Monte Carlo estimate of the coverage cost over a rectangle.
inline double monte_carlo_H(const std::vector<Point2> &sites, const Box &b, const etb::DensityField &phi,
                            int samples, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> ux(b.x0, b.x1), uy(b.y0, b.y1);
    double s = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Point2 q{ux(rng), uy(rng)};
        s += etb::dist2(q, sites[nearest(q, sites)]) * phi(q);
    }
    return s / samples * (b.x1 - b.x0) * (b.y1 - b.y0);
}

/// Closest of `samples` lens points (rejection sampled) to p.
inline Point2 lens_argmin(const Point2 &p, const Point2 &c1, const Point2 &c2, double r, int samples,
                          std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> ux(c1.x - r, c1.x + r), uy(c1.y - r, c1.y + r);
    Point2 best = c1;
    double bd = std::numeric_limits<double>::infinity();
    int kept = 0;
    while (kept < samples) {
        const Point2 q{ux(rng), uy(rng)};
        if (etb::dist(q, c1) > r || etb::dist(q, c2) > r) continue;
        ++kept;
        const double d = etb::dist(q, p);
        if (d < bd) { bd = d; best = q; }
    }
    return best;
}

/// Closest to p among `samples` points spread over the lens boundary arcs
/// (or p itself when it lies in the lens).
inline Point2 lens_boundary_argmin(const Point2 &p, const Point2 &c1, const Point2 &c2, double r, int samples) {
    if (etb::dist(p, c1) <= r && etb::dist(p, c2) <= r) return p;
    Point2 best = c1;
    double bd = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        const double a = 2.0 * M_PI * k / samples;
        const Point2 u{std::cos(a), std::sin(a)};
        for (const auto &[c, other] : {std::pair{c1, c2}, std::pair{c2, c1}}) {
            const Point2 q = c + r * u;
            if (etb::dist(q, other) > r * (1.0 + 1e-12)) continue;
            const double d = etb::dist(q, p);
            if (d < bd) { bd = d; best = q; }
        }
    }
    return best;
}

inline Point2 sample_in_disk(const etb::UncertaintyDisk &d, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = d.radius * std::sqrt(u(rng));
    const double a = 2.0 * M_PI * u(rng);
    return d.center + Point2{r * std::cos(a), r * std::sin(a)};
}

inline Point2 random_point(const Box &b, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> ux(b.x0, b.x1), uy(b.y0, b.y1);
    return {ux(rng), uy(rng)};
}

/// Random convex polygon: hull of a handful of points in the box.
inline SimplePolygon random_convex(const Box &b, std::mt19937_64 &rng, int points = 8) {
    std::vector<Point2> pts;
    for (int k = 0; k < points; ++k) pts.push_back(random_point(b, rng));
    return etb::convex_hull(pts);
}

struct Sandwich {
    std::vector<Point2> truth;
    std::vector<etb::UncertaintyDisk> disks;
};

/// Random sites in the box; every disk contains its true position, site 0 is exact.
inline Sandwich random_sandwich(std::mt19937_64 &rng, const Box &b, int n, double max_radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Sandwich in;
    for (int k = 0; k < n; ++k) {
        const Point2 p = random_point(b, rng);
        const double r = k == 0 ? 0.0 : max_radius * u(rng);
        const double a = 2.0 * M_PI * u(rng);
        const double s = r * std::sqrt(u(rng));
        in.truth.push_back(p);
        in.disks.push_back({p + Point2{s * std::cos(a), s * std::sin(a)}, r});
    }
    return in;
}

}  // namespace oracle

#endif  // ETB_TESTS_ORACLES_HPP
