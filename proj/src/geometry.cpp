#include "pe/geometry.hpp"

#include <cmath>

namespace pe {

Vec unit_direction(const Vec& e) {
    double n = e.norm();
    if (std::abs(n - 1.0) > 1e-6)
        throw InvalidConfig("direction is not a unit vector (|e| = " + std::to_string(n) + ")");
    return e / n;
}

double margin(const Vec& x, const OvalConfig& cfg) {
    return -(x - cfg.x_p).norm() + cfg.params.alpha * (x - cfg.x_e).norm() +
           cfg.params.capture_radius;
}

std::pair<double, double> smooth_margins(const Vec& x, const OvalConfig& cfg) {
    const double a2 = cfg.params.alpha * cfg.params.alpha;
    const double l = cfg.params.capture_radius;
    const double rp2 = (x - cfg.x_p).squaredNorm();
    const double re2 = (x - cfg.x_e).squaredNorm();
    const double A = rp2 - a2 * re2 - l * l;
    if (l == 0.0) {
        // The quartic form degenerates at l = 0; the substituted constraint
        // -(x-x_P)^2 + alpha^2 (x-x_E)^2 <= 0 is exact there.
        return {-A, -A};
    }
    const double d_hat = -A * A + 4.0 * a2 * l * l * re2;
    return {d_hat, -A};
}

SmoothMarginGradients smooth_margin_gradients(const Vec& x, const OvalConfig& cfg) {
    const double a2 = cfg.params.alpha * cfg.params.alpha;
    const double l = cfg.params.capture_radius;
    const Vec dp = x - cfg.x_p;
    const Vec de = x - cfg.x_e;
    SmoothMarginGradients g;
    if (l == 0.0) {
        g.wrt_x = -2.0 * dp + 2.0 * a2 * de;
        g.wrt_pursuer = 2.0 * dp;
        g.wrt_evader = -2.0 * a2 * de;
        return g;
    }
    const double A = dp.squaredNorm() - a2 * de.squaredNorm() - l * l;
    // d_hat = -A^2 + 4 a^2 l^2 |x - x_E|^2
    g.wrt_x = -2.0 * A * (2.0 * dp - 2.0 * a2 * de) + 8.0 * a2 * l * l * de;
    g.wrt_pursuer = 4.0 * A * dp;
    g.wrt_evader = -4.0 * a2 * (A + 2.0 * l * l) * de;
    return g;
}

double rho(const OvalConfig& cfg, const Vec& e) {
    if (!cfg.valid())
        throw InvalidConfig("oval config invalid: pursuer within capture radius or bad params");
    const Vec u = unit_direction(e);
    const double alpha = cfg.params.alpha;
    const double l = cfg.params.capture_radius;
    const Vec sep = cfg.x_p - cfg.x_e;
    const double b = alpha * l + u.dot(sep);
    const double c = sep.squaredNorm() - l * l;
    const double disc = b * b + (alpha * alpha - 1.0) * c;
    return (-b + std::sqrt(disc)) / (alpha * alpha - 1.0);
}

bool region_contains(const Vec& x, std::span<const OvalConfig> cfgs) {
    for (const auto& cfg : cfgs)
        if (margin(x, cfg) > 0.0) return false;
    return true;
}

std::pair<double, std::size_t> star_rho(std::span<const OvalConfig> cfgs, const Vec& e) {
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        double r = rho(cfgs[i], e);
        if (i == 0 || r < best) {
            best = r;
            best_i = i;
        }
    }
    return {best, best_i};
}

double bounding_radius(std::span<const OvalConfig> cfgs) {
    double m = 0.0;
    bool first = true;
    for (const auto& cfg : cfgs) {
        if (!cfg.valid())
            throw InvalidConfig("oval config invalid in bounding_radius");
        double r = (cfg.separation() - cfg.params.capture_radius) / (cfg.params.alpha - 1.0);
        if (first || r < m) m = r;
        first = false;
    }
    if (first) throw InvalidConfig("bounding_radius requires at least one pursuer");
    return m;
}

double angle_gap(const Vec& x1, const Vec& x2, const OvalConfig& cfg) {
    const double tol = boundary_tolerance(cfg);
    if (std::abs(margin(x1, cfg)) > tol || std::abs(margin(x2, cfg)) > tol)
        throw NotOnBoundary("angle_gap expects both points on the oval boundary");
    const Vec a1 = x1 - cfg.x_p, a2 = x2 - cfg.x_p;
    const Vec b1 = x1 - cfg.x_e, b2 = x2 - cfg.x_e;
    const double lhs = a1.dot(a2) / (a1.norm() * a2.norm());
    const double rhs = b1.dot(b2) / (b1.norm() * b2.norm());
    return lhs - rhs;
}

} // namespace pe
