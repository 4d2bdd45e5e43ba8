#include "pe/target.hpp"

#include <cmath>
#include <limits>

namespace pe {

std::pair<bool, double> winning_indicator(const GameState& y,
                                          std::span<const PursuerParams> params,
                                          const TargetShape& shape, const SolveOptions& opts) {
    SolveOptions o = opts;
    o.with_multipliers = false;
    ValueResult r = solve_value(y, params, TerminalCost::shape_signed_distance(shape), o);
    return {r.value >= 0.0, r.value};
}

std::vector<SweepCell> sweep_winning_set(const std::vector<Vec>& pursuers,
                                         std::span<const PursuerParams> params,
                                         const TargetShape& shape, const EvaderGrid& grid,
                                         const SolveOptions& opts) {
    const std::size_t dims = grid.counts.size();
    std::size_t total = 1;
    for (int c : grid.counts) {
        if (c < 1) throw InvalidConfig("sweep grid counts must be >= 1");
        total *= std::size_t(c);
    }

    std::vector<SweepCell> cells;
    cells.reserve(total);
    std::vector<int> index(dims, 0);
    for (std::size_t cell = 0; cell < total; ++cell) {
        SweepCell out;
        out.evader = Vec(Eigen::Index(dims));
        for (std::size_t a = 0; a < dims; ++a) {
            double t = grid.counts[a] > 1 ? double(index[a]) / (grid.counts[a] - 1) : 0.5;
            out.evader[Eigen::Index(a)] = grid.lo[Eigen::Index(a)] +
                                          t * (grid.hi[Eigen::Index(a)] - grid.lo[Eigen::Index(a)]);
        }

        GameState y{pursuers, out.evader};
        if (!is_interior(y, params)) {
            out.terminal = true;
            out.win = false;
            out.value = std::numeric_limits<double>::quiet_NaN();
        } else {
            auto [win, v] = winning_indicator(y, params, shape, opts);
            out.win = win;
            out.value = v;
        }
        cells.push_back(std::move(out));

        // row-major advance, last axis fastest
        for (std::size_t a = dims; a-- > 0;) {
            if (++index[a] < grid.counts[a]) break;
            index[a] = 0;
        }
    }
    return cells;
}

} // namespace pe
