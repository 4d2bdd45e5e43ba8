#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "pe/errors.hpp"

namespace pe {

using Vec = Eigen::VectorXd;

/// Speed ratio and capture radius of one pursuer.
struct PursuerParams {
    double alpha = 2.0;          // > 1, evader speed is normalized to 1
    double capture_radius = 0.0; // l >= 0

    bool valid() const { return alpha > 1.0 && capture_radius >= 0.0; }
};

/// A pursuer/evader position pair together with the pursuer's parameters.
/// Defines one dominance-region oval { x : margin(x) <= 0 }.
struct OvalConfig {
    Vec x_p;
    Vec x_e;
    PursuerParams params;

    double separation() const { return (x_p - x_e).norm(); }

    // The oval is only defined while the state is nonterminal.
    bool valid() const {
        return params.valid() && x_p.size() == x_e.size() &&
               separation() > params.capture_radius;
    }
};

inline double boundary_tolerance(const OvalConfig& cfg) {
    return 1e-8 * (1.0 + cfg.separation());
}

/// Normalizes e, rejecting vectors more than 1e-6 away from unit length.
Vec unit_direction(const Vec& e);

/// d_i(x) = -|x - x_P| + alpha |x - x_E| + l.
/// Negative inside the open dominance region, zero on its boundary.
double margin(const Vec& x, const OvalConfig& cfg);

/// Smooth constraint pair (d_hat, d_bar) equivalent to the margin sign
/// classification for l > 0. For l = 0 both entries are the substituted
/// quartic-free constraint -(x-x_P)^2 + alpha^2 (x-x_E)^2.
std::pair<double, double> smooth_margins(const Vec& x, const OvalConfig& cfg);

struct SmoothMarginGradients {
    Vec wrt_x;
    Vec wrt_pursuer;
    Vec wrt_evader;
};

/// Analytic partial derivatives of the smooth constraint d_hat.
SmoothMarginGradients smooth_margin_gradients(const Vec& x, const OvalConfig& cfg);

/// Distance from x_E to the oval boundary along unit direction e.
double rho(const OvalConfig& cfg, const Vec& e);

/// True iff x lies in the intersection of all dominance regions.
bool region_contains(const Vec& x, std::span<const OvalConfig> cfgs);

/// min_i rho_i along e, with the argmin index (ties to the smallest index).
std::pair<double, std::size_t> star_rho(std::span<const OvalConfig> cfgs, const Vec& e);

/// M(y) = min_i (|x_Pi - x_E| - l_i) / (alpha_i - 1); every point of the
/// intersection region lies within this distance of the evader.
double bounding_radius(std::span<const OvalConfig> cfgs);

/// For boundary points x1, x2: cosine of the angle they subtend at the
/// pursuer minus the cosine at the evader. Nonnegative, zero iff x1 == x2.
double angle_gap(const Vec& x1, const Vec& x2, const OvalConfig& cfg);

} // namespace pe
