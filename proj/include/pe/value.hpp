#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pe/geometry.hpp"
#include "pe/shapes.hpp"

namespace pe {

/// Joint game state: pursuer positions and the evader position.
struct GameState {
    std::vector<Vec> pursuers;
    Vec evader;

    Eigen::Index dimension() const { return evader.size(); }
    std::size_t pursuer_count() const { return pursuers.size(); }
};

/// min_i (|x_Pi - x_E| - l_i); the state is terminal when this is <= 0.
double terminal_margin(const GameState& y, std::span<const PursuerParams> params);
bool is_interior(const GameState& y, std::span<const PursuerParams> params);

std::vector<OvalConfig> oval_configs(const GameState& y, std::span<const PursuerParams> params);

/// Parametric locally-Lipschitz terminal cost.
struct TerminalCost {
    enum class Kind { PointDistance, ShapeSignedDistance, WeightedMinDistances, FixedAffine };

    Kind kind = Kind::PointDistance;

    Vec anchor;                 // PointDistance
    TargetShape shape;          // ShapeSignedDistance
    std::vector<Vec> anchors;   // WeightedMinDistances
    std::vector<double> weights;
    Vec affine_slope;           // FixedAffine: g(x) = slope . x + offset
    double affine_offset = 0.0;

    static TerminalCost point_distance(Vec a);
    static TerminalCost shape_signed_distance(TargetShape s);
    static TerminalCost weighted_min(std::vector<Vec> anchors, std::vector<double> weights);
    static TerminalCost affine(Vec slope, double offset);

    double evaluate(const Vec& x) const;
    /// Classical gradient where the cost is differentiable, nullopt on the
    /// kind's nondifferentiability locus.
    std::optional<Vec> gradient(const Vec& x) const;
    /// Valid Lipschitz rank on any bounded query region.
    double lipschitz_bound() const;
};

/// One generalized-gradient sample p = (p_P1, ..., p_Pm, p_E), tagged with
/// the optimum it was constructed from.
struct CovectorP {
    std::vector<Vec> pursuer;
    Vec evader;
    int optimum_index = 0;

    double norm() const;
    Vec flat() const;
};

struct SolveOptions {
    int grid_angular = 96;
    int grid_radial = 16;
    int refine_passes = 48;
    int multistart = 32;   // n > 3 fallback
    unsigned seed = 0;
    bool with_multipliers = true;
};

inline double opt_tol(double value) { return 1e-6 * (1.0 + std::abs(value)); }
inline double kkt_tol(double grad_norm) { return 1e-5 * (1.0 + grad_norm); }

struct ValueResult {
    double value = 0.0;
    std::vector<Vec> optima; // cluster representatives, lexicographically sorted
    std::vector<std::vector<int>> active_sets;
    std::vector<std::vector<Vec>> multipliers; // per optimum, >= 1 lambda vectors
    std::vector<CovectorP> gradient_samples;
    bool clarke_sampled = false;    // multipliers from offset gradient probes
    bool multiplier_failure = false; // some optimum had no certified multipliers
};

/// Minimizes the terminal cost over the dominance-region intersection.
ValueResult solve_value(const GameState& y, std::span<const PursuerParams> params,
                        const TerminalCost& cost, const SolveOptions& opts = {});

struct OracleResult {
    double value;
    Vec minimizer;
    double mesh; // bound on the image grid spacing
};

/// Independent brute-force oracle on a dense (direction, radius) grid, with
/// boundary radii located by bisection on the margin. n <= 3 only.
OracleResult oracle_value(const GameState& y, std::span<const PursuerParams> params,
                          const TerminalCost& cost, int resolution);

struct MultiplierRecovery {
    std::vector<Vec> lambdas; // one per usable cost-gradient sample
    std::vector<int> active_set;
    bool clarke_sampled = false;
    bool failed = false;
    double best_residual = 0.0;
};

/// Nonnegative multipliers certifying stationarity of the smooth program at
/// an optimum. The d_bar multipliers are identically zero and never solved for.
MultiplierRecovery recover_multipliers(const Vec& x_opt, const GameState& y,
                                       std::span<const PursuerParams> params,
                                       const TerminalCost& cost);

/// Builds the generalized-gradient sample set from the optima and their
/// multipliers; one covector per (optimum, lambda vector) pair.
std::vector<CovectorP> gradient_set(const GameState& y, std::span<const PursuerParams> params,
                                    const ValueResult& result);

} // namespace pe
