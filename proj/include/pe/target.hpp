#pragma once

#include <span>
#include <vector>

#include "pe/shapes.hpp"
#include "pe/value.hpp"

namespace pe {

/// Pursuers win the target defense game iff the value of the game with the
/// target's signed distance as terminal cost is nonnegative.
/// Returns (win, value).
std::pair<bool, double> winning_indicator(const GameState& y,
                                          std::span<const PursuerParams> params,
                                          const TargetShape& shape,
                                          const SolveOptions& opts = {});

struct SweepCell {
    Vec evader;   // cell evader position
    bool terminal = false;
    bool win = false;
    double value = 0.0; // NaN for terminal cells
};

struct EvaderGrid {
    Vec lo;
    Vec hi;
    std::vector<int> counts; // per axis; cell centers are uniform including endpoints
};

/// Evaluates the winning indicator over a grid of evader positions with the
/// pursuers fixed. Cells are emitted in row-major order (last axis fastest).
std::vector<SweepCell> sweep_winning_set(const std::vector<Vec>& pursuers,
                                         std::span<const PursuerParams> params,
                                         const TargetShape& shape, const EvaderGrid& grid,
                                         const SolveOptions& opts = {});

} // namespace pe
