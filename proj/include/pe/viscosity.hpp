#pragma once

#include <functional>
#include <span>

#include "pe/value.hpp"

namespace pe {

/// H(p) = -sum_i alpha_i |p_Pi| + |p_E|.
double hamiltonian(const CovectorP& p, std::span<const PursuerParams> params);

struct FdResult {
    CovectorP gradient;
    double differentiability_score; // max forward/backward slope disagreement
};

/// Central differences of a value function over all (m+1)*n coordinates.
/// Requires terminal margin > 2 * step.
FdResult fd_gradient(const std::function<double(const GameState&)>& value_fn, const GameState& y,
                     std::span<const PursuerParams> params, double step);

struct PdeOptions {
    double step_scale = 1e-4;     // step = step_scale * (1 + |y|_inf)
    double pde_tol = 1e-2;
    double kink_factor = 50.0;    // kink threshold = kink_factor * step
    SolveOptions solve;
};

struct PdeCheckReport {
    enum class Verdict { Pass, Skip, Fail };
    GameState state;
    CovectorP fd_grad;
    double hamiltonian_residual = 0.0;
    double differentiability_score = 0.0;
    double step = 0.0;
    Verdict verdict = Verdict::Skip;
};

/// Evaluates the PDE residual of the value function at an interior state via
/// finite differences; kinks are detected and reported as skips.
PdeCheckReport check_pde_at(const GameState& y, std::span<const PursuerParams> params,
                            const TerminalCost& cost, const PdeOptions& opts = {});

/// H(p) <= tol for every gradient sample and every pairwise convex
/// combination on an 11-point segment grid.
bool check_subsolution_samples(const ValueResult& result, std::span<const PursuerParams> params);

/// |H(p)| <= tol for every single-optimum gradient sample.
bool check_supersolution_equality(const ValueResult& result,
                                  std::span<const PursuerParams> params);

} // namespace pe
