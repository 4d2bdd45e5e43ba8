#include "pe/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pe {

namespace {
constexpr double kTieTol = 1e-9;
}

TargetShape TargetShape::disk(Vec c, double r) {
    TargetShape s;
    s.kind = Kind::Disk;
    s.center = std::move(c);
    s.radius = r;
    return s;
}

TargetShape TargetShape::box(Vec lo, Vec hi) {
    TargetShape s;
    s.kind = Kind::Box;
    s.box_min = std::move(lo);
    s.box_max = std::move(hi);
    return s;
}

TargetShape TargetShape::polygon(std::vector<Vec> verts) {
    TargetShape s;
    s.kind = Kind::Polygon;
    s.vertices = std::move(verts);
    return s;
}

TargetShape TargetShape::union_of(std::vector<TargetShape> parts) {
    TargetShape s;
    s.kind = Kind::Union;
    s.members = std::move(parts);
    return s;
}

namespace {

double box_sdf(const TargetShape& s, const Vec& x) {
    const Eigen::Index n = x.size();
    double outside2 = 0.0;
    double inside = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        double lo = s.box_min[i] - x[i];
        double hi = x[i] - s.box_max[i];
        double q = std::max(lo, hi); // positive outside along this axis
        if (q > 0.0)
            outside2 += q * q;
        inside = std::max(inside, q);
    }
    if (outside2 > 0.0) return std::sqrt(outside2);
    return inside; // <= 0
}

std::optional<Vec> box_grad(const TargetShape& s, const Vec& x) {
    const Eigen::Index n = x.size();
    Vec q(n);
    bool outside = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        double lo = s.box_min[i] - x[i];
        double hi = x[i] - s.box_max[i];
        double v = std::max(lo, hi);
        q[i] = v;
        if (v > 0.0) outside = true;
    }
    if (outside) {
        Vec g = Vec::Zero(n);
        double norm2 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (q[i] > 0.0) {
                double sgn = (x[i] > s.box_max[i]) ? 1.0 : -1.0;
                g[i] = sgn * q[i];
                norm2 += q[i] * q[i];
            } else if (std::abs(q[i]) < kTieTol) {
                return std::nullopt; // grazing a face plane
            }
        }
        return Vec(g / std::sqrt(norm2));
    }
    // Inside: gradient points out of the closest face; ridge points are kinks.
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (q[i] > q[best]) best = i;
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != best && q[best] - q[i] < kTieTol) return std::nullopt;
    Vec g = Vec::Zero(n);
    g[best] = (x[best] - s.box_min[best] < s.box_max[best] - x[best]) ? -1.0 : 1.0;
    return g;
}

struct EdgeHit {
    double dist;
    Vec closest;
};

EdgeHit segment_closest(const Vec& a, const Vec& b, const Vec& x) {
    Vec ab = b - a;
    double t = ab.squaredNorm() > 0 ? (x - a).dot(ab) / ab.squaredNorm() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    Vec c = a + t * ab;
    return {(x - c).norm(), c};
}

bool polygon_inside(const std::vector<Vec>& v, const Vec& x) {
    // Crossing-number test; works for any simple polygon.
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        bool cross = (v[i][1] > x[1]) != (v[j][1] > x[1]);
        if (cross) {
            double t = (x[1] - v[i][1]) / (v[j][1] - v[i][1]);
            double xi = v[i][0] + t * (v[j][0] - v[i][0]);
            if (x[0] < xi) in = !in;
        }
    }
    return in;
}

double polygon_boundary_dist(const std::vector<Vec>& v, const Vec& x, Vec* closest = nullptr,
                             double* second = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    double next = best;
    Vec bc;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        EdgeHit h = segment_closest(v[j], v[i], x);
        if (h.dist < best) {
            // Only count as a distinct feature if the closest points differ.
            if (best < std::numeric_limits<double>::infinity() && (bc - h.closest).norm() > kTieTol)
                next = best;
            best = h.dist;
            bc = h.closest;
        } else if ((bc - h.closest).norm() > kTieTol && h.dist < next) {
            next = h.dist;
        }
    }
    if (closest) *closest = bc;
    if (second) *second = next;
    return best;
}

} // namespace

double signed_distance(const TargetShape& shape, const Vec& x) {
    switch (shape.kind) {
        case TargetShape::Kind::Disk:
            return (x - shape.center).norm() - shape.radius;
        case TargetShape::Kind::Box:
            return box_sdf(shape, x);
        case TargetShape::Kind::Polygon: {
            double d = polygon_boundary_dist(shape.vertices, x);
            return polygon_inside(shape.vertices, x) ? -d : d;
        }
        case TargetShape::Kind::Union: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& m : shape.members)
                best = std::min(best, signed_distance(m, x));
            return best;
        }
    }
    return 0.0;
}

std::optional<Vec> signed_distance_gradient(const TargetShape& shape, const Vec& x) {
    switch (shape.kind) {
        case TargetShape::Kind::Disk: {
            Vec d = x - shape.center;
            double n = d.norm();
            if (n < kTieTol) return std::nullopt; // center
            return Vec(d / n);
        }
        case TargetShape::Kind::Box:
            return box_grad(shape, x);
        case TargetShape::Kind::Polygon: {
            Vec closest;
            double second;
            double d = polygon_boundary_dist(shape.vertices, x, &closest, &second);
            if (second - d < kTieTol) return std::nullopt; // equidistant features
            if (d < kTieTol) return std::nullopt;          // on the boundary
            Vec g = (x - closest) / d;
            return polygon_inside(shape.vertices, x) ? Vec(-g) : g;
        }
        case TargetShape::Kind::Union: {
            double best = std::numeric_limits<double>::infinity();
            double second = best;
            const TargetShape* arg = nullptr;
            for (const auto& m : shape.members) {
                double d = signed_distance(m, x);
                if (d < best) {
                    second = best;
                    best = d;
                    arg = &m;
                } else if (d < second) {
                    second = d;
                }
            }
            if (!arg || second - best < kTieTol) return std::nullopt;
            return signed_distance_gradient(*arg, x);
        }
    }
    return std::nullopt;
}

} // namespace pe
