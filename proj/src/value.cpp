#include "pe/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pe {

double terminal_margin(const GameState& y, std::span<const PursuerParams> params) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.pursuers.size(); ++i)
        m = std::min(m, (y.pursuers[i] - y.evader).norm() - params[i].capture_radius);
    return m;
}

bool is_interior(const GameState& y, std::span<const PursuerParams> params) {
    return terminal_margin(y, params) > 0.0;
}

std::vector<OvalConfig> oval_configs(const GameState& y, std::span<const PursuerParams> params) {
    std::vector<OvalConfig> cfgs;
    cfgs.reserve(y.pursuers.size());
    for (std::size_t i = 0; i < y.pursuers.size(); ++i)
        cfgs.push_back({y.pursuers[i], y.evader, params[i]});
    return cfgs;
}

// ---------------------------------------------------------------------------
// TerminalCost

TerminalCost TerminalCost::point_distance(Vec a) {
    TerminalCost c;
    c.kind = Kind::PointDistance;
    c.anchor = std::move(a);
    return c;
}

TerminalCost TerminalCost::shape_signed_distance(TargetShape s) {
    TerminalCost c;
    c.kind = Kind::ShapeSignedDistance;
    c.shape = std::move(s);
    return c;
}

TerminalCost TerminalCost::weighted_min(std::vector<Vec> anchors, std::vector<double> weights) {
    TerminalCost c;
    c.kind = Kind::WeightedMinDistances;
    c.anchors = std::move(anchors);
    c.weights = std::move(weights);
    return c;
}

TerminalCost TerminalCost::affine(Vec slope, double offset) {
    TerminalCost c;
    c.kind = Kind::FixedAffine;
    c.affine_slope = std::move(slope);
    c.affine_offset = offset;
    return c;
}

double TerminalCost::evaluate(const Vec& x) const {
    switch (kind) {
        case Kind::PointDistance:
            return (x - anchor).norm();
        case Kind::ShapeSignedDistance:
            return signed_distance(shape, x);
        case Kind::WeightedMinDistances: {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < anchors.size(); ++i)
                best = std::min(best, weights[i] * (x - anchors[i]).norm());
            return best;
        }
        case Kind::FixedAffine:
            return affine_slope.dot(x) + affine_offset;
    }
    return 0.0;
}

std::optional<Vec> TerminalCost::gradient(const Vec& x) const {
    constexpr double kTieTol = 1e-9;
    switch (kind) {
        case Kind::PointDistance: {
            Vec d = x - anchor;
            double n = d.norm();
            if (n < kTieTol) return std::nullopt;
            return Vec(d / n);
        }
        case Kind::ShapeSignedDistance:
            return signed_distance_gradient(shape, x);
        case Kind::WeightedMinDistances: {
            double best = std::numeric_limits<double>::infinity(), second = best;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < anchors.size(); ++i) {
                double v = weights[i] * (x - anchors[i]).norm();
                if (v < best) {
                    second = best;
                    best = v;
                    arg = i;
                } else if (v < second) {
                    second = v;
                }
            }
            if (second - best < kTieTol) return std::nullopt; // kink locus
            Vec d = x - anchors[arg];
            double n = d.norm();
            if (n < kTieTol) return std::nullopt; // at the anchor
            return Vec(weights[arg] * d / n);
        }
        case Kind::FixedAffine:
            return affine_slope;
    }
    return std::nullopt;
}

double TerminalCost::lipschitz_bound() const {
    switch (kind) {
        case Kind::PointDistance:
        case Kind::ShapeSignedDistance:
            return 1.0;
        case Kind::WeightedMinDistances: {
            double w = 0.0;
            for (double wi : weights) w = std::max(w, wi);
            return w;
        }
        case Kind::FixedAffine:
            return affine_slope.norm();
    }
    return 1.0;
}

double CovectorP::norm() const { return flat().norm(); }

Vec CovectorP::flat() const {
    Eigen::Index n = evader.size();
    Vec out((Eigen::Index(pursuer.size()) + 1) * n);
    for (std::size_t i = 0; i < pursuer.size(); ++i)
        out.segment(Eigen::Index(i) * n, n) = pursuer[i];
    out.tail(n) = evader;
    return out;
}

// ---------------------------------------------------------------------------
// Optimizer over the star-shaped chart x = x_E + s * rho*(e) * e

namespace {

bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

Vec dir2(double theta) {
    Vec e(2);
    e << std::cos(theta), std::sin(theta);
    return e;
}

Vec dir3(double theta, double phi) {
    Vec e(3);
    e << std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi);
    return e;
}

struct ChartObjective {
    const std::vector<OvalConfig>& cfgs;
    const TerminalCost& cost;
    const Vec& x_e;
    int n;

    Vec point(std::span<const double> p) const {
        Vec e = (n == 2) ? dir2(p[0]) : dir3(p[0], p[1]);
        double s = std::clamp(p[n - 1], 0.0, 1.0);
        auto [r, idx] = star_rho(cfgs, e);
        (void)idx;
        return x_e + s * r * e;
    }

    double operator()(std::span<const double> p) const { return cost.evaluate(point(p)); }
};

// One-dimensional golden-section minimization of f on [a, b].
template <typename F>
double golden_min(F&& f, double a, double b, int iters) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int k = 0; k < iters; ++k) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

// Repeated coordinate-wise golden-section passes with a shrinking bracket.
template <typename F>
void coordinate_refine(F&& f, std::vector<double>& p, std::vector<double> width,
                       std::span<const std::pair<double, double>> bounds, int passes) {
    for (int pass = 0; pass < passes; ++pass) {
        for (std::size_t c = 0; c < p.size(); ++c) {
            double lo = p[c] - width[c];
            double hi = p[c] + width[c];
            if (bounds[c].first > -1e18) lo = std::max(lo, bounds[c].first);
            if (bounds[c].second < 1e18) hi = std::min(hi, bounds[c].second);
            if (hi - lo < 1e-15) continue;
            auto f1d = [&](double v) {
                std::vector<double> q = p;
                q[c] = v;
                return f(q);
            };
            p[c] = golden_min(f1d, lo, hi, 22);
        }
        for (auto& w : width) w *= 0.6;
    }
}

struct Candidate {
    double value;
    Vec x;
};

std::vector<Candidate> optimize_chart(const std::vector<OvalConfig>& cfgs, const TerminalCost& cost,
                                      const Vec& x_e, int n, const SolveOptions& opts) {
    ChartObjective obj{cfgs, cost, x_e, n};
    const double two_pi = 2.0 * M_PI;
    const int na = std::max(8, opts.grid_angular);
    const int ns = std::max(3, opts.grid_radial);
    const int nphi = (n == 3) ? std::max(4, na / 2) : 1;

    struct Seed {
        double value;
        std::vector<double> p;
    };
    std::vector<double> values;
    std::vector<std::vector<double>> points;

    auto idx = [&](int j, int k, int r) { return (j * nphi + k) * ns + r; };
    values.resize(std::size_t(na) * nphi * ns);
    points.resize(values.size());
    for (int j = 0; j < na; ++j) {
        double theta = two_pi * j / na;
        for (int k = 0; k < nphi; ++k) {
            double phi = (n == 3) ? M_PI * (k + 0.5) / nphi : 0.0;
            for (int r = 0; r < ns; ++r) {
                double s = double(r) / (ns - 1);
                std::vector<double> p = (n == 3) ? std::vector<double>{theta, phi, s}
                                                 : std::vector<double>{theta, s};
                values[idx(j, k, r)] = obj(p);
                points[idx(j, k, r)] = std::move(p);
            }
        }
    }

    double best = *std::min_element(values.begin(), values.end());
    double worst = *std::max_element(values.begin(), values.end());
    double slack = 0.05 * (worst - best) + 1e-3;

    // Grid-local minima (theta wraps, phi and s clamp) near the global best.
    std::vector<Seed> seeds;
    for (int j = 0; j < na; ++j) {
        for (int k = 0; k < nphi; ++k) {
            for (int r = 0; r < ns; ++r) {
                double v = values[idx(j, k, r)];
                if (v > best + slack) continue;
                bool is_min = true;
                for (int dj = -1; dj <= 1 && is_min; ++dj)
                    for (int dk = -1; dk <= 1 && is_min; ++dk)
                        for (int dr = -1; dr <= 1 && is_min; ++dr) {
                            if (!dj && !dk && !dr) continue;
                            int jj = (j + dj + na) % na;
                            int kk = k + dk, rr = r + dr;
                            if (kk < 0 || kk >= nphi || rr < 0 || rr >= ns) continue;
                            if (values[idx(jj, kk, rr)] < v) is_min = false;
                        }
                if (is_min) seeds.push_back({v, points[idx(j, k, r)]});
            }
        }
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const Seed& a, const Seed& b) { return a.value < b.value; });
    if (seeds.size() > 16) seeds.resize(16);

    std::vector<std::pair<double, double>> bounds;
    std::vector<double> width;
    bounds.emplace_back(-1e19, 1e19); // theta, wraps
    width.push_back(two_pi / na);
    if (n == 3) {
        bounds.emplace_back(-1e19, 1e19); // phi; out-of-range values still map to a direction
        width.push_back(M_PI / nphi);
    }
    bounds.emplace_back(0.0, 1.0);
    width.push_back(1.0 / (ns - 1));

    std::vector<Candidate> out;
    for (auto& seed : seeds) {
        std::vector<double> p = seed.p;
        coordinate_refine(obj, p, width, bounds, opts.refine_passes);
        out.push_back({obj(p), obj.point(p)});
    }
    return out;
}

// n > 3 fallback: seeded multi-start coordinate descent on an unconstrained
// chart vector u, mapped by radial clamping onto the region.
std::vector<Candidate> optimize_multistart(const std::vector<OvalConfig>& cfgs,
                                           const TerminalCost& cost, const Vec& x_e, int n,
                                           const SolveOptions& opts) {
    auto point_of = [&](const std::vector<double>& u) {
        Vec uv = Eigen::Map<const Vec>(u.data(), n);
        double nu = uv.norm();
        if (nu < 1e-14) return x_e;
        Vec e = uv / nu;
        auto [r, idx] = star_rho(cfgs, e);
        (void)idx;
        double s = std::min(nu, 1.0);
        return Vec(x_e + s * r * e);
    };
    auto obj = [&](const std::vector<double>& u) { return cost.evaluate(point_of(u)); };

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<std::pair<double, double>> bounds(n, {-1e19, 1e19});
    std::vector<Candidate> out;
    for (int k = 0; k < opts.multistart; ++k) {
        std::vector<double> u(n);
        double norm2 = 0.0;
        for (auto& ui : u) {
            ui = gauss(rng);
            norm2 += ui * ui;
        }
        double scale = unif(rng) / std::max(std::sqrt(norm2), 1e-12);
        for (auto& ui : u) ui *= scale;
        std::vector<double> width(n, 0.5);
        coordinate_refine(obj, u, width, bounds, opts.refine_passes);
        out.push_back({obj(u), point_of(u)});
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Multiplier recovery

namespace {

// Least-squares lambda >= 0 minimizing |q + G lambda| by subset enumeration;
// the active sets here are tiny.
bool nnls_small(const Eigen::MatrixXd& G, const Vec& q, Vec& lambda, double& residual) {
    const int k = int(G.cols());
    double best = q.norm();
    Vec best_lambda = Vec::Zero(k);
    for (int mask = 1; mask < (1 << k); ++mask) {
        std::vector<int> cols;
        for (int i = 0; i < k; ++i)
            if (mask & (1 << i)) cols.push_back(i);
        Eigen::MatrixXd Gs(G.rows(), cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) Gs.col(c) = G.col(cols[c]);
        Vec sol = Gs.colPivHouseholderQr().solve(-q);
        bool ok = true;
        for (Eigen::Index c = 0; c < sol.size(); ++c)
            if (sol[c] < -1e-12) ok = false;
        if (!ok) continue;
        Vec full = Vec::Zero(k);
        for (std::size_t c = 0; c < cols.size(); ++c) full[cols[c]] = std::max(sol[c], 0.0);
        double r = (q + G * full).norm();
        if (r < best) {
            best = r;
            best_lambda = full;
        }
    }
    lambda = best_lambda;
    residual = best;
    return true;
}

} // namespace

MultiplierRecovery recover_multipliers(const Vec& x_opt, const GameState& y,
                                       std::span<const PursuerParams> params,
                                       const TerminalCost& cost) {
    auto cfgs = oval_configs(y, params);
    const int m = int(cfgs.size());
    MultiplierRecovery rec;

    for (int i = 0; i < m; ++i) {
        double act_eps = 1e-6 * (1.0 + cfgs[i].separation());
        if (std::abs(margin(x_opt, cfgs[i])) <= act_eps) rec.active_set.push_back(i);
    }

    // Cost gradient sample(s); fall back to offset probes at a kink.
    std::vector<Vec> grads;
    if (auto g = cost.gradient(x_opt)) {
        grads.push_back(*g);
    } else {
        rec.clarke_sampled = true;
        const double h = 1e-6;
        for (Eigen::Index k = 0; k < x_opt.size(); ++k) {
            for (double sgn : {1.0, -1.0}) {
                Vec probe = x_opt;
                probe[k] += sgn * h;
                if (auto g = cost.gradient(probe)) {
                    bool dup = false;
                    for (const auto& seen : grads)
                        if ((seen - *g).norm() < 1e-8) dup = true;
                    if (!dup) grads.push_back(*g);
                }
            }
        }
        if (rec.active_set.empty()) {
            // Interior optimum of a nonsmooth cost: certify 0 in the Clarke
            // gradient by checking local minimality instead of stationarity.
            double g0 = cost.evaluate(x_opt);
            bool local_min = true;
            for (Eigen::Index k = 0; k < x_opt.size() && local_min; ++k) {
                for (double sgn : {1.0, -1.0}) {
                    Vec probe = x_opt;
                    probe[k] += sgn * h;
                    if (cost.evaluate(probe) < g0 - 1e-12) local_min = false;
                }
            }
            rec.lambdas.push_back(Vec::Zero(m));
            rec.best_residual = 0.0;
            rec.failed = !local_min;
            return rec;
        }
    }

    Eigen::MatrixXd G(x_opt.size(), rec.active_set.size());
    for (std::size_t c = 0; c < rec.active_set.size(); ++c)
        G.col(Eigen::Index(c)) = smooth_margin_gradients(x_opt, cfgs[rec.active_set[c]]).wrt_x;

    rec.best_residual = std::numeric_limits<double>::infinity();
    for (const auto& q : grads) {
        Vec lam_active;
        double res;
        if (rec.active_set.empty()) {
            lam_active = Vec::Zero(0);
            res = q.norm();
        } else {
            nnls_small(G, q, lam_active, res);
        }
        if (res <= kkt_tol(q.norm())) {
            Vec lam = Vec::Zero(m);
            for (std::size_t c = 0; c < rec.active_set.size(); ++c)
                lam[rec.active_set[c]] = lam_active[Eigen::Index(c)];
            rec.lambdas.push_back(lam);
        }
        rec.best_residual = std::min(rec.best_residual, res);
    }
    rec.failed = rec.lambdas.empty();
    return rec;
}

std::vector<CovectorP> gradient_set(const GameState& y, std::span<const PursuerParams> params,
                                    const ValueResult& result) {
    const Eigen::Index n = y.dimension();
    const int m = int(y.pursuer_count());
    std::vector<CovectorP> out;
    for (std::size_t oi = 0; oi < result.optima.size(); ++oi) {
        const Vec& x = result.optima[oi];
        const double r_e = (x - y.evader).norm();
        for (const auto& lam : result.multipliers[oi]) {
            CovectorP p;
            p.optimum_index = int(oi);
            p.pursuer.resize(m, Vec::Zero(n));
            p.evader = Vec::Zero(n);
            for (int i = 0; i < m; ++i) {
                if (lam[i] <= 0.0) continue;
                const double alpha = params[i].alpha;
                const double l = params[i].capture_radius;
                const Vec dp = x - y.pursuers[i];
                const double r_p = dp.norm();
                if (l > 0.0) {
                    p.pursuer[i] = 8.0 * alpha * l * lam[i] * r_e * dp;
                    p.evader -= 8.0 * alpha * alpha * l * lam[i] * r_p * (x - y.evader);
                } else {
                    // Substituted constraint for l = 0; the pursuer block is
                    // scaled onto the boundary identity |x - x_P| = alpha r_e.
                    p.pursuer[i] = 2.0 * lam[i] * alpha * r_e * (dp / std::max(r_p, 1e-300));
                    p.evader -= 2.0 * alpha * alpha * lam[i] * (x - y.evader);
                }
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// solve_value

ValueResult solve_value(const GameState& y, std::span<const PursuerParams> params,
                        const TerminalCost& cost, const SolveOptions& opts) {
    if (y.pursuers.size() != params.size())
        throw InvalidConfig("pursuer count mismatch between state and params");
    for (const auto& p : params)
        if (!p.valid()) throw InvalidConfig("pursuer params invalid (alpha <= 1 or l < 0)");
    if (!is_interior(y, params)) throw TerminalState("state is terminal, value is g(x_E)");

    auto cfgs = oval_configs(y, params);
    const int n = int(y.dimension());

    std::vector<Candidate> cands = (n <= 3) ? optimize_chart(cfgs, cost, y.evader, n, opts)
                                            : optimize_multistart(cfgs, cost, y.evader, n, opts);

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) best = std::min(best, c.value);
    const double tol = opt_tol(best);

    // Cluster near-optimal candidates within 1e-4 spatial distance.
    std::vector<Candidate> reps;
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    for (const auto& c : cands) {
        if (c.value > best + tol) continue;
        bool merged = false;
        for (auto& r : reps)
            if ((r.x - c.x).norm() < 1e-4) merged = true;
        if (!merged && reps.size() < 16) reps.push_back(c);
    }
    std::sort(reps.begin(), reps.end(),
              [](const Candidate& a, const Candidate& b) { return lex_less(a.x, b.x); });

    ValueResult result;
    result.value = best;
    for (auto& r : reps) result.optima.push_back(std::move(r.x));

    if (opts.with_multipliers) {
        for (const auto& x : result.optima) {
            MultiplierRecovery rec = recover_multipliers(x, y, params, cost);
            result.active_sets.push_back(rec.active_set);
            if (rec.lambdas.empty()) rec.lambdas.push_back(Vec::Zero(Eigen::Index(params.size())));
            result.multipliers.push_back(rec.lambdas);
            result.clarke_sampled = result.clarke_sampled || rec.clarke_sampled;
            result.multiplier_failure = result.multiplier_failure || rec.failed;
        }
        result.gradient_samples = gradient_set(y, params, result);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

OracleResult oracle_value(const GameState& y, std::span<const PursuerParams> params,
                          const TerminalCost& cost, int resolution) {
    const int n = int(y.dimension());
    if (n > 3) throw UnsupportedDimension("oracle_value supports n in {2, 3}");
    if (!is_interior(y, params)) throw TerminalState("state is terminal");
    auto cfgs = oval_configs(y, params);
    const double M = bounding_radius(cfgs);

    // Boundary radius by bisection on the pointwise-max margin, independent
    // of the closed-form radius used by the solver path.
    auto boundary_radius = [&](const Vec& e) {
        auto star_margin = [&](double t) {
            Vec x = y.evader + t * e;
            double worst = -std::numeric_limits<double>::infinity();
            for (const auto& cfg : cfgs) worst = std::max(worst, margin(x, cfg));
            return worst;
        };
        double lo = 0.0, hi = 1.05 * M + 1e-12;
        while (star_margin(hi) < 0.0) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (star_margin(mid) <= 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    const int na = std::max(8, resolution);
    const int ns = std::max(3, resolution / 8);
    const int nphi = (n == 3) ? std::max(4, na / 2) : 1;

    double best = std::numeric_limits<double>::infinity();
    Vec best_x = y.evader;
    double max_adjacent = 0.0;
    Vec prev_boundary;
    for (int k = 0; k < nphi; ++k) {
        double phi = (n == 3) ? M_PI * (k + 0.5) / nphi : 0.0;
        bool have_prev = false;
        for (int j = 0; j < na; ++j) {
            double theta = 2.0 * M_PI * j / na;
            Vec e = (n == 3) ? dir3(theta, phi) : dir2(theta);
            double r = boundary_radius(e);
            Vec bpt = y.evader + r * e;
            if (have_prev) max_adjacent = std::max(max_adjacent, (bpt - prev_boundary).norm());
            prev_boundary = bpt;
            have_prev = true;
            for (int s = 0; s < ns; ++s) {
                Vec x = y.evader + (double(s) / (ns - 1)) * r * e;
                double v = cost.evaluate(x);
                if (v < best) {
                    best = v;
                    best_x = x;
                }
            }
        }
    }
    double mesh = max_adjacent + M / (ns - 1);
    if (n == 3) mesh += M * M_PI / nphi; // spacing between phi rings
    return {best, best_x, mesh};
}

} // namespace pe
