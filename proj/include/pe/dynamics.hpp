#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pe/value.hpp"

namespace pe {

/// Enforces |u| <= 1, clamping overshoots within 1e-9 and rejecting larger.
Vec clamp_control(Vec u);

/// Pursuit control aiming at the dominance-region boundary point along the
/// evader's current heading; aims at the evader when it stands still.
Vec pursuit_control(const OvalConfig& cfg, const Vec& u_e);

/// Unit control toward the target point until within arrival_tol, then zero.
Vec evader_control_toward(const Vec& x_e, const Vec& target, double arrival_tol = 1e-9);

/// Unit control toward result.optima[selection] of a solved game.
Vec evader_optimal_control(const GameState& y, const ValueResult& result, std::size_t selection,
                           double arrival_tol = 1e-9);

using PursuerPolicy =
    std::function<Vec(std::size_t pursuer, const GameState& y, const Vec& u_e)>;
using EvaderPolicy = std::function<Vec(double t, const GameState& y)>;

/// The pursuit strategy applied to every pursuer.
PursuerPolicy pursuit_policy(std::span<const PursuerParams> params);

struct TrajectorySample {
    double t;
    GameState state;
    std::vector<Vec> pursuer_controls;
    Vec evader_control;
};

struct CaptureEvent {
    double time;
    std::size_t pursuer;
    GameState state; // linearly interpolated within the capture step
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::optional<CaptureEvent> capture;
};

/// Forward-Euler simulation of the equations of motion; stops at capture
/// (located by linear interpolation of the margin) or t_max. With
/// delay_steps > 0 pursuers see the evader's control from that many steps
/// earlier.
Trajectory simulate(const GameState& y0, std::span<const PursuerParams> params,
                    const PursuerPolicy& pursuers, const EvaderPolicy& evader, double dt,
                    double t_max, int delay_steps = 0);

struct ShrinkageReport {
    double max_closing_rate;      // must stay below 1 - alpha_i (+ tolerance)
    double max_nesting_violation; // max d_i(t1-margin) over t2 boundary samples
};

/// Checks region shrinkage along a trajectory generated with the pursuit
/// strategy for pursuer cfg_index.
ShrinkageReport monitor_shrinkage(const Trajectory& traj, std::span<const PursuerParams> params,
                                  std::size_t cfg_index, int directions = 360);

/// Advances the pursuer by eps*alpha and the evader by eps toward a boundary
/// point x_hat; verifies x_hat stays on the new boundary and the new region
/// nests in the old one.
bool epsilon_advance_check(const OvalConfig& cfg, const Vec& x_hat, double eps,
                           int directions = 360);

} // namespace pe
