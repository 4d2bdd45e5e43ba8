// Acceptance battery: one pass/fail line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "pe/dynamics.hpp"
#include "pe/scenario.hpp"
#include "pe/target.hpp"
#include "pe/viscosity.hpp"

using namespace pe;

namespace {

std::mt19937_64 rng(20240817);

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

Vec random_unit(int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec e(n);
    do {
        for (int i = 0; i < n; ++i) e[i] = g(rng);
    } while (e.norm() < 1e-6);
    return e.normalized();
}

OvalConfig random_cfg(int n, double alpha_lo = 1.05, double alpha_hi = 4.0, double l_hi = 0.9) {
    std::uniform_real_distribution<double> ua(alpha_lo, alpha_hi);
    std::uniform_real_distribution<double> ul(0.0, l_hi);
    std::uniform_real_distribution<double> up(-2.0, 2.0);
    for (;;) {
        Vec xp(n), xe(n);
        for (int i = 0; i < n; ++i) {
            xp[i] = up(rng);
            xe[i] = up(rng);
        }
        OvalConfig cfg{xp, xe, {ua(rng), ul(rng)}};
        if (cfg.separation() > cfg.params.capture_radius + 0.2) return cfg;
    }
}

struct RandomScenario {
    GameState y;
    std::vector<PursuerParams> params;
    TerminalCost cost;
};

// Random interior n=2 scenario with moderate speed ratios and a cost drawn
// from the point / min-of-points / union-target families.
RandomScenario random_scenario(int max_pursuers, bool smooth_cost_only = false) {
    std::uniform_int_distribution<int> um(1, max_pursuers);
    std::uniform_real_distribution<double> ua(1.5, 3.5);
    std::uniform_real_distribution<double> ul(0.0, 0.4);
    std::uniform_real_distribution<double> up(-2.0, 2.0);
    std::uniform_int_distribution<int> ukind(0, 2);

    for (;;) {
        RandomScenario s;
        int m = um(rng);
        s.y.evader = v2(up(rng) * 0.3, up(rng) * 0.3);
        for (int i = 0; i < m; ++i) {
            s.params.push_back({ua(rng), ul(rng)});
            s.y.pursuers.push_back(v2(up(rng), up(rng)));
        }
        if (terminal_margin(s.y, s.params) < 0.4) continue;

        int kind = smooth_cost_only ? 0 : ukind(rng);
        if (kind == 0) {
            s.cost = TerminalCost::point_distance(v2(up(rng) * 3, up(rng) * 3));
        } else if (kind == 1) {
            s.cost = TerminalCost::weighted_min({v2(up(rng) * 3, up(rng) * 3),
                                                 v2(up(rng) * 3, up(rng) * 3)},
                                                {1.0, 1.3});
        } else {
            s.cost = TerminalCost::shape_signed_distance(TargetShape::union_of(
                {TargetShape::disk(v2(up(rng) * 2 + 4, up(rng) * 2), 1.0),
                 TargetShape::disk(v2(up(rng) * 2 - 4, up(rng) * 2), 1.5)}));
        }
        return s;
    }
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<bool(std::string&)> run;
};

// --- 1 -----------------------------------------------------------------
bool c1_oval_boundary(std::string& note) {
    int checked = 0;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        int n = (k % 2) ? 3 : 2;
        auto cfg = random_cfg(n);
        Vec e = random_unit(n);
        double r = rho(cfg, e);
        worst = std::max(worst, std::abs(margin(cfg.x_e + r * e, cfg)));
        ++checked;
    }
    note = "max residual " + sci(worst) + " over " + std::to_string(checked) + " pairs";
    return worst <= 1e-10;
}

// --- 2 -----------------------------------------------------------------
bool c2_constraint_equivalence(std::string& note) {
    std::uniform_real_distribution<double> ur(0.0, 3.0);
    int mismatches = 0;
    for (int k = 0; k < 100000; ++k) {
        auto cfg = random_cfg(2);
        Vec x = cfg.x_e + ur(rng) * random_unit(2);
        auto [dh, db] = smooth_margins(x, cfg);
        bool a = margin(x, cfg) <= 0.0;
        bool b = dh <= 0.0 && db <= 0.0;
        if (a != b) ++mismatches;
    }
    note = std::to_string(mismatches) + " mismatches / 100000";
    return mismatches == 0;
}

// --- 3 -----------------------------------------------------------------
bool c3_angle_inequality(std::string& note) {
    double worst = std::numeric_limits<double>::infinity();
    long positive = 0, total = 0;
    for (int n : {2, 3}) {
        for (int k = 0; k < 10000; ++k) {
            auto cfg = random_cfg(n);
            Vec e1 = random_unit(n), e2 = random_unit(n);
            if ((e1 - e2).norm() < 1e-9) continue;
            Vec x1 = cfg.x_e + rho(cfg, e1) * e1;
            Vec x2 = cfg.x_e + rho(cfg, e2) * e2;
            double gap = angle_gap(x1, x2, cfg);
            worst = std::min(worst, gap);
            if (gap > 0.0) ++positive;
            ++total;
        }
    }
    double frac = double(positive) / double(total);
    note = "min gap " + sci(worst) + ", positive fraction " + std::to_string(frac);
    return worst >= -1e-9 && frac >= 0.999;
}

// --- 4 -----------------------------------------------------------------
bool c4_shrinkage(std::string& note) {
    double worst_rate_excess = -std::numeric_limits<double>::infinity();
    double worst_nesting = 0.0;
    for (int k = 0; k < 20; ++k) {
        auto s = random_scenario(2, true);
        double M = bounding_radius(oval_configs(s.y, s.params));
        const double dt = 1e-3 * M;

        std::uniform_real_distribution<double> uth(0, 2 * M_PI);
        double th = uth(rng);
        int steps = 0;
        auto evader = [&](double, const GameState&) {
            if (++steps % 100 == 0) th = uth(rng);
            return v2(std::cos(th), std::sin(th));
        };
        Trajectory traj = simulate(s.y, s.params, pursuit_policy(s.params), evader, dt,
                                   1000.0 * dt);
        for (std::size_t i = 0; i < s.params.size(); ++i) {
            ShrinkageReport rep = monitor_shrinkage(traj, s.params, i, 180);
            worst_rate_excess = std::max(
                worst_rate_excess, rep.max_closing_rate - (1.0 - s.params[i].alpha) - 5.0 * dt);
            worst_nesting = std::max(worst_nesting, rep.max_nesting_violation);
        }
    }
    note = "rate excess " + sci(worst_rate_excess) + ", nesting " + sci(worst_nesting);
    return worst_rate_excess < 0.0 && worst_nesting <= 1e-6;
}

// --- 5, 6, 7: share the 50-scenario batch ------------------------------
std::vector<RandomScenario> g_batch;
std::vector<ValueResult> g_batch_results;

bool c5_oracle_agreement(std::string& note) {
    g_batch.clear();
    g_batch_results.clear();
    double worst_ratio = 0.0;
    bool ok = true;
    for (int k = 0; k < 50; ++k) {
        auto s = random_scenario(3);
        ValueResult r = solve_value(s.y, s.params, s.cost);
        OracleResult o = oracle_value(s.y, s.params, s.cost, 720);
        double bound = opt_tol(r.value) + s.cost.lipschitz_bound() * o.mesh;
        double disc = std::abs(r.value - o.value);
        worst_ratio = std::max(worst_ratio, disc / bound);
        if (disc > bound) ok = false;
        g_batch.push_back(std::move(s));
        g_batch_results.push_back(std::move(r));
    }
    note = "worst discrepancy/bound ratio " + std::to_string(worst_ratio);
    return ok;
}

bool c6_supersolution(std::string& note) {
    long samples = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < g_batch.size(); ++k) {
        const auto& r = g_batch_results[k];
        for (const auto& p : r.gradient_samples) {
            if (p.optimum_index < 0) continue;
            double lhs = 0.0;
            for (std::size_t i = 0; i < p.pursuer.size(); ++i)
                lhs += g_batch[k].params[i].alpha * p.pursuer[i].norm();
            double resid = std::abs(lhs - p.evader.norm()) / (1.0 + p.norm());
            worst = std::max(worst, resid);
            ++samples;
        }
        if (!check_supersolution_equality(r, g_batch[k].params)) {
            note = "equality violated in scenario " + std::to_string(k);
            return false;
        }
    }
    note = std::to_string(samples) + " covectors, worst scaled residual " + sci(worst);
    return worst <= 1e-8 && samples > 0;
}

bool c7_subsolution(std::string& note) {
    for (std::size_t k = 0; k < g_batch.size(); ++k) {
        if (!check_subsolution_samples(g_batch_results[k], g_batch[k].params)) {
            note = "inequality violated in scenario " + std::to_string(k);
            return false;
        }
    }

    // Constructed symmetric two-optimum scenario: combinations across optima
    // must be strictly negative.
    std::vector<PursuerParams> params{{2.0, 0.0}};
    GameState y{{v2(0, 1)}, v2(0, 0)};
    auto cost = TerminalCost::weighted_min({v2(-10, 0), v2(10, 0)}, {1.0, 1.0});
    ValueResult r = solve_value(y, params, cost);
    if (r.optima.size() != 2 || !check_subsolution_samples(r, params)) {
        note = "two-optimum scenario did not produce two optima";
        return false;
    }
    const CovectorP* a = nullptr;
    const CovectorP* b = nullptr;
    for (const auto& p : r.gradient_samples) {
        if (p.optimum_index == 0 && !a) a = &p;
        if (p.optimum_index == 1 && !b) b = &p;
    }
    if (!a || !b) {
        note = "missing per-optimum covectors";
        return false;
    }
    CovectorP mid;
    mid.pursuer = {Vec(0.5 * (a->pursuer[0] + b->pursuer[0]))};
    mid.evader = 0.5 * (a->evader + b->evader);
    double h_mid = hamiltonian(mid, params);
    note = "all samples within tolerance; midpoint H = " + std::to_string(h_mid);
    return h_mid < -1e-3;
}

// --- 8 -----------------------------------------------------------------
bool c8_pde_residual(std::string& note) {
    const char* files[] = {"point_cost.json", "two_pursuers.json"};
    long within = 0, marginal = 0, fail = 0, skip = 0;
    double worst = 0.0;
    for (const char* file : files) {
        Scenario sc = load_scenario(std::string(PEGAME_FIXTURE_DIR) + "/" + file);
        double scale = bounding_radius(sc.configs());
        std::mt19937_64 local(42);
        std::normal_distribution<double> g(0.0, 1.0);
        PdeOptions po;
        po.solve.with_multipliers = false;
        int produced = 0;
        while (produced < 200) {
            GameState y = sc.initial;
            for (auto& p : y.pursuers)
                for (Eigen::Index a = 0; a < p.size(); ++a) p[a] += 0.25 * scale * g(local);
            for (Eigen::Index a = 0; a < y.evader.size(); ++a)
                y.evader[a] += 0.25 * scale * g(local);
            if (terminal_margin(y, sc.params) <= 0.05 * scale) continue;
            ++produced;
            PdeCheckReport rep;
            try {
                rep = check_pde_at(y, sc.params, sc.cost, po);
            } catch (const TerminalProximity&) {
                ++skip;
                continue;
            }
            if (rep.verdict == PdeCheckReport::Verdict::Skip) {
                ++skip;
                continue;
            }
            double res = std::abs(rep.hamiltonian_residual);
            worst = std::max(worst, res);
            if (res <= 1e-2)
                ++within;
            else if (res <= 5e-2)
                ++marginal;
            else
                ++fail;
        }
    }
    long checked = within + marginal + fail;
    double frac = checked ? double(within) / double(checked) : 0.0;
    note = "within " + std::to_string(within) + "/" + std::to_string(checked) + ", skipped " +
           std::to_string(skip) + ", max residual " + sci(worst);
    return checked > 0 && fail == 0 && frac >= 0.95;
}

// --- 9 -----------------------------------------------------------------
bool c9_rollout(std::string& note) {
    double worst_eq = 0.0;
    double worst_lb = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        auto s = random_scenario(2, true);
        SolveOptions so;
        so.with_multipliers = false;
        ValueResult r = solve_value(s.y, s.params, s.cost, so);
        double M = bounding_radius(oval_configs(s.y, s.params));
        double min_alpha = s.params[0].alpha;
        for (const auto& p : s.params) min_alpha = std::min(min_alpha, p.alpha);
        const double dt = 1e-3 * M;
        const double t_max = 2.0 * M / (min_alpha - 1.0) + 1.0;
        const double tol = 1e-2 * (1.0 + std::abs(r.value)) + s.cost.lipschitz_bound() * 2.0 * dt;

        // Optimal evader: run to the first reported optimum.
        Vec target = r.optima[0];
        auto optimal = [&](double, const GameState& z) {
            return evader_control_toward(z.evader, target, dt);
        };
        Trajectory topt =
            simulate(s.y, s.params, pursuit_policy(s.params), optimal, dt, t_max);
        if (!topt.capture) {
            note = "optimal rollout " + std::to_string(k) + " did not terminate";
            return false;
        }
        double payoff = s.cost.evaluate(topt.capture->state.evader);
        worst_eq = std::max(worst_eq, std::abs(payoff - r.value) / tol);
        if (std::abs(payoff - r.value) > tol) {
            note = "optimal payoff off by " + std::to_string(payoff - r.value);
            return false;
        }

        // Random evaders can never push the payoff below the value.
        std::uniform_real_distribution<double> uth(0, 2 * M_PI);
        for (int run = 0; run < 20; ++run) {
            double th = uth(rng);
            int steps = 0;
            auto random_policy = [&](double, const GameState&) {
                if (++steps % 50 == 0) th = uth(rng);
                return v2(std::cos(th), std::sin(th));
            };
            Trajectory traj =
                simulate(s.y, s.params, pursuit_policy(s.params), random_policy, dt, t_max);
            if (!traj.capture) {
                note = "random rollout did not terminate before the capture deadline";
                return false;
            }
            double pay = s.cost.evaluate(traj.capture->state.evader);
            worst_lb = std::min(worst_lb, (pay - r.value) / tol);
            if (pay < r.value - tol) {
                note = "random-evader payoff " + std::to_string(pay) + " below value " +
                       std::to_string(r.value);
                return false;
            }
        }
    }
    note = "worst |payoff-V|/tol " + std::to_string(worst_eq) + ", min margin/tol " +
           std::to_string(worst_lb);
    return true;
}

// --- 10 ----------------------------------------------------------------
bool c10_target_defense(std::string& note) {
    std::vector<PursuerParams> params{{2.0, 0.0}};
    GameState y{{v2(1, 0)}, v2(0, 0)};
    auto [win, value] = winning_indicator(y, params, TargetShape::disk(v2(-10, 0), 9.0));
    if (!(std::abs(value) <= 1e-4 && win)) {
        note = "boundary case: value " + sci(value);
        return false;
    }

    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
        double r = 9.5 - 0.5 * k;
        auto [w, v] = winning_indicator(y, params, TargetShape::disk(v2(-10, 0), r));
        if (v < prev - 1e-9) {
            note = "erosion monotonicity violated at radius " + std::to_string(r);
            return false;
        }
        prev = v;
    }

    // Nonconvex two-disk union target, mirror-symmetric sweep.
    std::vector<PursuerParams> dparams{{2.0, 0.2}, {2.0, 0.2}};
    std::vector<Vec> pursuers{v2(1, 1), v2(-1, 1)};
    auto target = TargetShape::union_of(
        {TargetShape::disk(v2(2, -3), 1.2), TargetShape::disk(v2(-2, -3), 1.2)});
    EvaderGrid grid;
    grid.lo = v2(-2.5, -2.5);
    grid.hi = v2(2.5, 2.5);
    grid.counts = {9, 9};
    SolveOptions so;
    so.with_multipliers = false;
    auto cells = sweep_winning_set(pursuers, dparams, target, grid, so);
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const auto& a = cells[std::size_t(i * 9 + j)];
            const auto& b = cells[std::size_t((8 - i) * 9 + j)];
            if (a.terminal != b.terminal) {
                note = "terminal flags asymmetric";
                return false;
            }
            if (!a.terminal && (a.win != b.win || std::abs(a.value - b.value) > 1e-6)) {
                note = "sweep asymmetry at cell " + std::to_string(i * 9 + j);
                return false;
            }
        }
    }
    note = "boundary value " + sci(value) + ", erosion and sweep symmetric";
    return true;
}

} // namespace

int main() {
    std::vector<Criterion> criteria{
        {"oval boundary residual", 1.0, c1_oval_boundary},
        {"smooth-constraint equivalence", 5.0, c2_constraint_equivalence},
        {"boundary angle inequality", 10.0, c3_angle_inequality},
        {"pursuit shrinkage and nesting", 60.0, c4_shrinkage},
        {"solver vs oracle agreement", 120.0, c5_oracle_agreement},
        {"supersolution equality", 30.0, c6_supersolution},
        {"subsolution inequality", 30.0, c7_subsolution},
        {"finite-difference PDE residual", 300.0, c8_pde_residual},
        {"rollout payoff consistency", 300.0, c9_rollout},
        {"target defense winning set", 120.0, c10_target_defense},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        std::string note;
        bool ok = false;
        try {
            ok = criteria[i].run(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > criteria[i].budget_s) {
            ok = false;
            note += " [over budget]";
        }
        std::printf("criterion %2zu (%s): %s (%.2fs) -- %s\n", i + 1, criteria[i].name,
                    ok ? "PASS" : "FAIL", secs, note.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
