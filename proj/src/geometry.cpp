#include "etb/geometry.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <random>

namespace etb {

namespace {

// Relative threshold below which an edge cross product counts as collinear.
constexpr double kCollinearTol = 1e-12;

double point_segment_distance(const Point2 &p, const Point2 &a, const Point2 &b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return dist(p, a + t * ab);
}

Circle circle_from_two(const Point2 &a, const Point2 &b) {
    return {(a + b) * 0.5, dist(a, b) * 0.5};
}

Circle circle_from_three(const Point2 &a, const Point2 &b, const Point2 &c) {
    const Point2 ab = b - a;
    const Point2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double scale = std::max({dot(ab, ab), dot(ac, ac), 1e-300});
    if (std::abs(d) <= 1e-14 * scale) {
        // Collinear: the diameter is the farthest pair.
        Circle best = circle_from_two(a, b);
        for (const Circle &c2 : {circle_from_two(a, c), circle_from_two(b, c)}) {
            if (c2.radius > best.radius) best = c2;
        }
        return best;
    }
    const double ab2 = dot(ab, ab);
    const double ac2 = dot(ac, ac);
    const Point2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
    return {a + off, norm(off)};
}

bool mec_contains(const Circle &c, const Point2 &p) {
    return dist(c.center, p) <= c.radius * (1.0 + 1e-12) + 1e-12;
}

// Local frame of the hyperbola with foci f_near/f_far; the near branch is
// q(t) = center - a cosh(t) e + b sinh(t) n.
struct BranchFrame {
    Point2 center;
    Point2 e;  // unit, f_near -> f_far
    Point2 n;  // unit normal
    double a = 0.0;
    double b = 0.0;
    double half_focal = 0.0;

    Point2 at(double t) const { return center - a * std::cosh(t) * e + b * std::sinh(t) * n; }
    double local_y(const Point2 &q) const { return dot(q - center, n); }
};

BranchFrame make_frame(const Point2 &f_near, const Point2 &f_far, double delta) {
    const double d = dist(f_near, f_far);
    if (!(delta >= 0.0) || delta >= d) {
        throw GeometryError("uncertainty swallows bisector");
    }
    BranchFrame f;
    f.center = (f_near + f_far) * 0.5;
    f.e = (f_far - f_near) / d;
    f.n = perp(f.e);
    f.half_focal = 0.5 * d;
    f.a = 0.5 * delta;
    f.b = std::sqrt((f.half_focal - f.a) * (f.half_focal + f.a));
    return f;
}

std::vector<Point2> sample_branch(const BranchFrame &f, double t0, double t1, int chords) {
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(chords));
    for (int k = 0; k < chords; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(chords - 1);
        pts.push_back(f.at(t));
    }
    return pts;
}

std::pair<double, double> window_y_range(const BranchFrame &f, const SimplePolygon &window) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Point2 &v : window.vertices) {
        const double y = f.local_y(v);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    return {lo, hi};
}

double window_radius(const Point2 &c, const SimplePolygon &window) {
    double r = 0.0;
    for (const Point2 &v : window.vertices) r = std::max(r, dist(c, v));
    return r;
}

// Hull of branch samples, the two asymptotic rays leaving the end samples,
// and a point deep on the axis. Every hull point lies in the (convex) focal region.
SimplePolygon inner_hull(const BranchFrame &f, std::vector<Point2> samples, double reach) {
    const Point2 up = (-f.a * f.e + f.b * f.n) / f.half_focal;
    const Point2 down = (-f.a * f.e - f.b * f.n) / f.half_focal;
    const Point2 first = samples.front();
    const Point2 last = samples.back();
    samples.push_back(last + reach * up);
    samples.push_back(first + reach * down);
    samples.push_back(f.center - (reach + f.half_focal) * f.e);
    return convex_hull(samples);
}

double focal_slack(const Point2 &q, const Point2 &f_near, const Point2 &f_far, double delta) {
    return dist(q, f_far) - dist(q, f_near) - delta;
}

struct SegmentSpan {
    double t_in = 0.0;
    double t_out = 1.0;
    int enter = -1;
    int exit = -1;
};

// Cyrus-Beck clip of segment a->b against the convex CCW polygon `hull`.
std::optional<SegmentSpan> clip_segment(const Point2 &a, const Point2 &b, const SimplePolygon &hull) {
    SegmentSpan s;
    const std::size_t m = hull.size();
    for (std::size_t k = 0; k < m; ++k) {
        const Point2 p = hull[k];
        const Point2 edge = hull.wrap(k + 1) - p;
        const double len = norm(edge);
        const double sa = cross(edge, a - p) / len;
        const double sb = cross(edge, b - p) / len;
        const double denom = sb - sa;
        if (std::abs(denom) < 1e-300) {
            if (sa < 0.0) return std::nullopt;
            continue;
        }
        const double t = -sa / denom;
        if (denom > 0.0) {
            if (t > s.t_in) { s.t_in = t; s.enter = static_cast<int>(k); }
        } else {
            if (t < s.t_out) { s.t_out = t; s.exit = static_cast<int>(k); }
        }
        if (s.t_in > s.t_out) return std::nullopt;
    }
    return s;
}

double min_edge_slack(const Point2 &q, const SimplePolygon &hull) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const Point2 p = hull[k];
        const Point2 edge = hull.wrap(k + 1) - p;
        m = std::min(m, cross(edge, q - p) / norm(edge));
    }
    return m;
}

}  // namespace

SimplePolygon SimplePolygon::rectangle(double x0, double y0, double x1, double y1) {
    return SimplePolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

HalfPlane::HalfPlane(Point2 n, double c) : normal(n), offset(c) {
    const double len = norm(n);
    if (!(len > 0.0)) throw GeometryError("half-plane normal must be non-zero");
    normal = n / len;
    offset = c / len;
}

HalfPlane HalfPlane::bisector(const Point2 &keep, const Point2 &other) {
    const Point2 n = other - keep;
    const Point2 mid = (keep + other) * 0.5;
    return HalfPlane(n, dot(n, mid));
}

HalfPlane HalfPlane::left_of(const Point2 &a, const Point2 &b) {
    const Point2 n = perp(a - b);  // right-hand normal of a->b
    return HalfPlane(n, dot(n, a));
}

double signed_area(const SimplePolygon &poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly.wrap(i + 1));
    return 0.5 * s;
}

double area(const SimplePolygon &poly) { return std::abs(signed_area(poly)); }

bool is_convex(const SimplePolygon &poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly.wrap(i + 1);
        const Point2 c = poly.wrap(i + 2);
        const double cr = cross(b - a, c - b);
        if (cr < -kCollinearTol * std::max(1.0, dist2(a, b) + dist2(b, c))) return false;
    }
    return true;
}

SimplePolygon cleaned(const SimplePolygon &poly, double tol) {
    std::vector<Point2> v;
    v.reserve(poly.size());
    for (const Point2 &p : poly.vertices) {
        if (v.empty() || dist(v.back(), p) > tol) v.push_back(p);
    }
    while (v.size() > 1 && dist(v.front(), v.back()) <= tol) v.pop_back();

    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
            const Point2 &a = v[(i + v.size() - 1) % v.size()];
            const Point2 &b = v[i];
            const Point2 &c = v[(i + 1) % v.size()];
            const double base = dist(a, c);
            const double h = base > 0.0 ? std::abs(cross(c - a, b - a)) / base : dist(a, b);
            // Drop b when it sits on segment ac (not a spike back along it).
            if (h <= tol && dot(b - a, c - b) >= 0.0) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    SimplePolygon out(std::move(v));
    if (out.size() < 3 || signed_area(out) <= tol * tol) return {};
    return out;
}

SimplePolygon convex_hull(std::span<const Point2> points) {
    std::vector<Point2> p(points.begin(), points.end());
    std::sort(p.begin(), p.end(), [](const Point2 &a, const Point2 &b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return {};
    std::vector<Point2> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);
    SimplePolygon out(std::move(h));
    if (out.size() < 3) return {};
    return out;
}

SimplePolygon clip_halfplane(const SimplePolygon &poly, const HalfPlane &h) {
    const std::size_t n = poly.size();
    if (n < 3) return {};
    std::vector<Point2> out;
    out.reserve(n + 2);
    bool all_inside = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (h.signed_distance(poly[i]) > 0.0) { all_inside = false; break; }
    }
    if (all_inside) return poly;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 &a = poly[i];
        const Point2 &b = poly.wrap(i + 1);
        const double sa = h.signed_distance(a);
        const double sb = h.signed_distance(b);
        const bool in_a = sa <= 0.0;
        const bool in_b = sb <= 0.0;
        if (in_a) out.push_back(a);
        if (in_a != in_b) out.push_back(a + (b - a) * (sa / (sa - sb)));
    }
    return cleaned(SimplePolygon(std::move(out)));
}

Circle min_enclosing_circle(std::span<const Point2> points) {
    if (points.empty()) throw GeometryError("degenerate set");
    std::vector<Point2> p(points.begin(), points.end());
    std::mt19937 rng(0x5eedu);
    std::shuffle(p.begin(), p.end(), rng);

    Circle c{p[0], 0.0};
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (mec_contains(c, p[i])) continue;
        c = {p[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (mec_contains(c, p[j])) continue;
            c = circle_from_two(p[i], p[j]);
            for (std::size_t k = 0; k < j; ++k) {
                if (!mec_contains(c, p[k])) c = circle_from_three(p[i], p[j], p[k]);
            }
        }
    }
    return c;
}

std::vector<Point2> hyperbola_branch(const Point2 &f_near, const Point2 &f_far, double delta,
                                     const SimplePolygon &window, int chords) {
    if (chords < 2) throw GeometryError("need at least two branch samples");
    if (window.empty()) throw GeometryError("empty window");
    const BranchFrame f = make_frame(f_near, f_far, delta);
    const auto [lo, hi] = window_y_range(f, window);
    const double extent = std::max(std::abs(lo), std::abs(hi));
    const double span = extent * (1.0 + 1e-3) + 1e-6;
    const double t = std::asinh(span / f.b);
    return sample_branch(f, -t, t, chords);
}

SimplePolygon focal_region_inner(const Point2 &f_near, const Point2 &f_far, double delta,
                                 const SimplePolygon &window, int chords) {
    if (chords < 2) throw GeometryError("need at least two branch samples");
    if (window.empty()) throw GeometryError("empty window");
    const BranchFrame f = make_frame(f_near, f_far, delta);
    auto [lo, hi] = window_y_range(f, window);
    const double pad = 1e-3 * (hi - lo) + 1e-6;
    lo -= pad;
    hi += pad;
    const double reach = 4.0 * (window_radius(f.center, window) + 2.0 * f.half_focal) + 1.0;
    return inner_hull(f, sample_branch(f, std::asinh(lo / f.b), std::asinh(hi / f.b), chords), reach);
}

SimplePolygon clip_focal_inner(const SimplePolygon &poly, const Point2 &f_near,
                               const Point2 &f_far, double delta, int chords) {
    if (poly.empty()) return {};
    if (delta >= dist(f_near, f_far)) throw GeometryError("uncertainty swallows bisector");
    if (delta <= kExactDelta && is_convex(poly)) {
        return clip_halfplane(poly, HalfPlane::bisector(f_near, f_far));
    }
    bool inside = true;
    for (const Point2 &v : poly.vertices) {
        if (focal_slack(v, f_near, f_far, delta) < 0.0) { inside = false; break; }
    }
    if (inside) return poly;

    const SimplePolygon hull = focal_region_inner(f_near, f_far, delta, poly, chords);
    SimplePolygon out = poly;
    for (std::size_t k = 0; k < hull.size() && !out.empty(); ++k) {
        out = clip_halfplane(out, HalfPlane::left_of(hull[k], hull.wrap(k + 1)));
    }
    return out;
}

SubtractResult subtract_focal_outer(const SimplePolygon &poly, const Point2 &f_keep,
                                    const Point2 &f_remove, double delta, int chords) {
    if (poly.empty()) return {};
    if (delta >= dist(f_keep, f_remove)) throw GeometryError("uncertainty swallows bisector");
    if (delta <= kExactDelta && is_convex(poly)) {
        return {clip_halfplane(poly, HalfPlane::bisector(f_keep, f_remove)), false};
    }

    const SimplePolygon hull = focal_region_inner(f_remove, f_keep, delta, poly, chords);
    const std::size_t n = poly.size();

    struct Piece {
        std::size_t edge;
        SegmentSpan span;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly.wrap(i + 1);
        const auto span = clip_segment(a, b, hull);
        if (!span) continue;
        const double len = (span->t_out - span->t_in) * dist(a, b);
        const Point2 mid = a + (b - a) * (0.5 * (span->t_in + span->t_out));
        if (len <= kGeomTol || min_edge_slack(mid, hull) <= kGeomTol) continue;
        pieces.push_back({i, *span});
    }
    if (pieces.empty()) return {poly, false};

    // Merge pieces that continue through a shared polygon vertex.
    struct Run {
        Piece first;
        Piece last;
    };
    std::vector<Run> runs;
    constexpr double kJoin = 1e-12;
    for (const Piece &p : pieces) {
        if (!runs.empty()) {
            Piece &prev = runs.back().last;
            if (prev.edge + 1 == p.edge && prev.span.t_out >= 1.0 - kJoin && p.span.t_in <= kJoin) {
                prev = p;
                continue;
            }
        }
        runs.push_back({p, p});
    }
    if (runs.size() > 1) {
        const Run &head = runs.front();
        const Run &tail = runs.back();
        if (head.first.edge == 0 && head.first.span.t_in <= kJoin && tail.last.edge == n - 1 &&
            tail.last.span.t_out >= 1.0 - kJoin) {
            runs.front().first = tail.first;
            runs.pop_back();
        }
    }
    if (runs.size() == 1 && runs.front().first.span.enter < 0 && runs.front().last.span.exit < 0) {
        // Every boundary point lies in the removed region.
        return {SimplePolygon{}, false};
    }
    if (runs.size() != 1) return {poly, true};

    const Run &run = runs.front();
    const int enter = run.first.span.enter;
    const int exit = run.last.span.exit;
    if (enter < 0 || exit < 0) return {poly, true};

    const Point2 entry = poly[run.first.edge] +
                         (poly.wrap(run.first.edge + 1) - poly[run.first.edge]) * run.first.span.t_in;
    const Point2 leave = poly[run.last.edge] +
                         (poly.wrap(run.last.edge + 1) - poly[run.last.edge]) * run.last.span.t_out;

    std::vector<Point2> out;
    out.push_back(leave);
    // Boundary outside the removed region: vertices after the exit edge up to the entry edge.
    std::size_t j = (run.last.edge + 1) % n;
    const std::size_t stop = (run.first.edge + 1) % n;
    do {
        out.push_back(poly[j]);
        j = (j + 1) % n;
    } while (j != stop);
    out.push_back(entry);

    // Removed region's boundary from entry back to exit, walked clockwise.
    const std::size_t m = hull.size();
    std::vector<Point2> arc;
    if (enter == exit) {
        const Point2 base = hull[static_cast<std::size_t>(enter)];
        const Point2 dir = hull.wrap(static_cast<std::size_t>(enter) + 1) - base;
        if (dot(leave - base, dir) > dot(entry - base, dir)) {
            for (std::size_t k = 0; k < m; ++k) {
                arc.push_back(hull[(static_cast<std::size_t>(enter) + m - k) % m]);
            }
        }
    } else {
        std::size_t k = static_cast<std::size_t>(enter);
        while (k != static_cast<std::size_t>(exit)) {
            arc.push_back(hull[k]);
            k = (k + m - 1) % m;
        }
    }
    const Point2 probe = arc.empty() ? (entry + leave) * 0.5 : (entry + arc.front()) * 0.5;
    if (!point_in_polygon(probe, poly)) return {poly, true};
    for (const Point2 &q : arc) {
        if (!point_in_polygon(q, poly)) return {poly, true};
    }
    out.insert(out.end(), arc.begin(), arc.end());

    SimplePolygon result = cleaned(SimplePolygon(std::move(out)));
    const double a_in = signed_area(poly);
    const double a_out = signed_area(result);
    if (result.empty() || a_out <= 0.0 || a_out > a_in * (1.0 + 1e-12) + kGeomTol) {
        return {poly, true};
    }
    return {std::move(result), false};
}

Point2 project_onto_lens(const Point2 &p, const Point2 &c1, const Point2 &c2, double b) {
    if (!(b >= 0.0)) throw GeometryError("inconsistent centroid bound");
    const double d = dist(c1, c2);
    const double slack = kGeomTol + 1e-9 * std::max(1.0, b);
    if (d > 2.0 * b + slack) throw GeometryError("inconsistent centroid bound");
    if (d >= 2.0 * b) return (c1 + c2) * 0.5;  // lens has collapsed to a point

    const auto in_disk = [b](const Point2 &q, const Point2 &c) { return dist(q, c) <= b + kGeomTol; };
    if (in_disk(p, c1) && in_disk(p, c2)) return p;

    std::optional<Point2> best;
    double best_d = std::numeric_limits<double>::infinity();
    const auto consider = [&](const Point2 &q) {
        const double dq = dist(p, q);
        if (dq < best_d) { best_d = dq; best = q; }
    };
    const auto radial = [&](const Point2 &c) {
        const Point2 v = p - c;
        const double len = norm(v);
        return len > 0.0 ? c + v * (b / len) : c + Point2{b, 0.0};
    };
    const Point2 r1 = radial(c1);
    if (in_disk(r1, c2)) consider(r1);
    const Point2 r2 = radial(c2);
    if (in_disk(r2, c1)) consider(r2);
    if (d > 0.0) {
        const Point2 mid = (c1 + c2) * 0.5;
        const double h = std::sqrt(std::max(0.0, b * b - 0.25 * d * d));
        const Point2 off = perp((c2 - c1) / d) * h;
        consider(mid + off);
        consider(mid - off);
    }
    if (!best) return c1;  // b == 0 with coincident centers
    return *best;
}

double farthest_vertex_distance(const SimplePolygon &poly, const Point2 &p) {
    if (poly.empty()) throw GeometryError("empty polygon");
    double r = 0.0;
    for (const Point2 &v : poly.vertices) r = std::max(r, dist(v, p));
    return r;
}

bool point_in_polygon(const Point2 &p, const SimplePolygon &poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 &a = poly[i];
        const Point2 &b = poly[j];
        if (point_segment_distance(p, a, b) <= kGeomTol) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool convex_hulls_intersect(const SimplePolygon &a, const SimplePolygon &b, double tol) {
    if (a.empty() || b.empty()) return false;
    const SimplePolygon ha = is_convex(a) ? a : convex_hull(a.vertices);
    const SimplePolygon hb = is_convex(b) ? b : convex_hull(b.vertices);
    if (ha.empty() || hb.empty()) return false;
    const auto separated_by = [tol](const SimplePolygon &edges, const SimplePolygon &other) {
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const Point2 p = edges[k];
            const Point2 e = edges.wrap(k + 1) - p;
            const Point2 outward{e.y, -e.x};
            const double len = norm(outward);
            double lo = std::numeric_limits<double>::infinity();
            for (const Point2 &q : other.vertices) lo = std::min(lo, dot(q - p, outward) / len);
            if (lo > tol) return true;
        }
        return false;
    };
    return !separated_by(ha, hb) && !separated_by(hb, ha);
}

std::vector<std::array<Point2, 3>> triangulate(const SimplePolygon &poly) {
    std::vector<std::array<Point2, 3>> tris;
    const std::size_t n = poly.size();
    if (n < 3) return tris;
    if (is_convex(poly)) {
        for (std::size_t i = 1; i + 1 < n; ++i) tris.push_back({poly[0], poly[i], poly[i + 1]});
        return tris;
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    const auto strictly_inside = [](const Point2 &q, const Point2 &a, const Point2 &b, const Point2 &c) {
        return cross(b - a, q - a) > 0.0 && cross(c - b, q - b) > 0.0 && cross(a - c, q - c) > 0.0;
    };
    while (idx.size() > 3) {
        bool clipped = false;
        const std::size_t m = idx.size();
        for (std::size_t k = 0; k < m; ++k) {
            const Point2 &a = poly[idx[(k + m - 1) % m]];
            const Point2 &b = poly[idx[k]];
            const Point2 &c = poly[idx[(k + 1) % m]];
            if (cross(b - a, c - b) <= 0.0) continue;
            bool blocked = false;
            for (std::size_t r = 0; r < m && !blocked; ++r) {
                if (r == k || r == (k + 1) % m || r == (k + m - 1) % m) continue;
                blocked = strictly_inside(poly[idx[r]], a, b, c);
            }
            if (blocked) continue;
            tris.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
            clipped = true;
            break;
        }
        if (!clipped) {
            // Numerically degenerate remainder; fall back to a fan over it.
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
                tris.push_back({poly[idx[0]], poly[idx[k]], poly[idx[k + 1]]});
            }
            return tris;
        }
    }
    tris.push_back({poly[idx[0]], poly[idx[1]], poly[idx[2]]});
    return tris;
}

}  // namespace etb
