#pragma once

#include <optional>
#include <vector>

#include "pe/geometry.hpp"

namespace pe {

/// Closed target set, negative side of its signed distance function.
/// Unions may be nonconvex; polygons are planar (n = 2) and convex.
struct TargetShape {
    enum class Kind { Disk, Box, Polygon, Union };

    Kind kind = Kind::Disk;

    // Disk
    Vec center;
    double radius = 1.0;

    // Box (axis-aligned)
    Vec box_min;
    Vec box_max;

    // Polygon, n = 2, counterclockwise vertices
    std::vector<Vec> vertices;

    // Union
    std::vector<TargetShape> members;

    static TargetShape disk(Vec c, double r);
    static TargetShape box(Vec lo, Vec hi);
    static TargetShape polygon(std::vector<Vec> verts);
    static TargetShape union_of(std::vector<TargetShape> parts);
};

/// Signed distance to the shape: negative inside, zero on the boundary,
/// positive outside. 1-Lipschitz. For overlapping unions the interior depth
/// is a conservative bound; the zero level set is exact.
double signed_distance(const TargetShape& shape, const Vec& x);

/// Classical gradient of the signed distance where it exists; nullopt on
/// the (measure-zero) nondifferentiability locus of the shape kind.
std::optional<Vec> signed_distance_gradient(const TargetShape& shape, const Vec& x);

} // namespace pe
