#include "pe/dynamics.hpp"

#include <cmath>
#include <random>

namespace pe {

Vec clamp_control(Vec u) {
    double n = u.norm();
    if (n > 1.0 + 1e-9) throw InvalidConfig("control norm exceeds 1");
    if (n > 1.0) u /= n;
    return u;
}

Vec pursuit_control(const OvalConfig& cfg, const Vec& u_e) {
    if (!cfg.valid()) throw InvalidConfig("pursuit_control: invalid oval config");
    const double n = u_e.norm();
    if (n == 0.0) {
        Vec d = cfg.x_e - cfg.x_p;
        return Vec(d / d.norm());
    }
    Vec e = u_e / n;
    Vec target = cfg.x_e + rho(cfg, e) * e;
    Vec d = target - cfg.x_p;
    return Vec(d / d.norm());
}

Vec evader_control_toward(const Vec& x_e, const Vec& target, double arrival_tol) {
    Vec d = target - x_e;
    double n = d.norm();
    if (n <= arrival_tol) return Vec::Zero(x_e.size());
    return Vec(d / n);
}

Vec evader_optimal_control(const GameState& y, const ValueResult& result, std::size_t selection,
                           double arrival_tol) {
    if (selection >= result.optima.size())
        throw std::out_of_range("optimum selection index out of range");
    return evader_control_toward(y.evader, result.optima[selection], arrival_tol);
}

PursuerPolicy pursuit_policy(std::span<const PursuerParams> params) {
    std::vector<PursuerParams> p(params.begin(), params.end());
    return [p](std::size_t i, const GameState& y, const Vec& u_e) {
        OvalConfig cfg{y.pursuers[i], y.evader, p[i]};
        return pursuit_control(cfg, u_e);
    };
}

Trajectory simulate(const GameState& y0, std::span<const PursuerParams> params,
                    const PursuerPolicy& pursuers, const EvaderPolicy& evader, double dt,
                    double t_max, int delay_steps) {
    if (dt <= 0.0) throw InvalidConfig("simulate: dt must be positive");
    if (!is_interior(y0, params)) throw TerminalState("simulate: initial state is terminal");

    Trajectory traj;
    GameState y = y0;
    double t = 0.0;
    std::vector<Vec> evader_history; // for the delayed information pattern

    while (true) {
        Vec u_e = clamp_control(evader(t, y));
        evader_history.push_back(u_e);
        Vec u_e_seen;
        if (delay_steps > 0) {
            int k = int(evader_history.size()) - 1 - delay_steps;
            u_e_seen = (k >= 0) ? evader_history[std::size_t(k)] : Vec(Vec::Zero(y.evader.size()));
        } else {
            u_e_seen = u_e;
        }

        TrajectorySample sample;
        sample.t = t;
        sample.state = y;
        sample.evader_control = u_e;
        for (std::size_t i = 0; i < y.pursuers.size(); ++i)
            sample.pursuer_controls.push_back(clamp_control(pursuers(i, y, u_e_seen)));
        traj.samples.push_back(sample);

        if (t >= t_max) break;

        GameState next = y;
        for (std::size_t i = 0; i < y.pursuers.size(); ++i)
            next.pursuers[i] += dt * params[i].alpha * sample.pursuer_controls[i];
        next.evader += dt * u_e;

        // Within-step capture detection: positions are linear in tau over the
        // step, so the pursuer-evader distance is checked at its quadratic
        // minimum, not just at the endpoints (a pursuer can pass through a
        // point-capture evader mid-step).
        double best_tau = std::numeric_limits<double>::infinity();
        std::size_t best_pursuer = 0;
        for (std::size_t i = 0; i < y.pursuers.size(); ++i) {
            const double l = params[i].capture_radius;
            const Vec r0 = y.pursuers[i] - y.evader;
            const Vec dr = dt * (params[i].alpha * sample.pursuer_controls[i] - u_e);
            const double a = dr.squaredNorm();
            const double b = 2.0 * r0.dot(dr);
            const double c0 = r0.squaredNorm();
            double tau_min = (a > 0.0) ? std::clamp(-b / (2.0 * a), 0.0, 1.0) : 0.0;
            double dist_min = std::sqrt(std::max(c0 + b * tau_min + a * tau_min * tau_min, 0.0));
            const double eps = 1e-9 * (1.0 + l);
            if (dist_min > l + eps) continue;
            double tau = tau_min;
            double disc = b * b - 4.0 * a * (c0 - l * l);
            if (a > 0.0 && disc >= 0.0)
                tau = std::clamp((-b - std::sqrt(disc)) / (2.0 * a), 0.0, 1.0);
            if (tau < best_tau) {
                best_tau = tau;
                best_pursuer = i;
            }
        }
        if (best_tau <= 1.0) {
            CaptureEvent ev;
            ev.time = t + best_tau * dt;
            ev.state = y;
            for (std::size_t i = 0; i < y.pursuers.size(); ++i)
                ev.state.pursuers[i] = y.pursuers[i] + (best_tau * dt) * params[i].alpha *
                                                          sample.pursuer_controls[i];
            ev.state.evader = y.evader + (best_tau * dt) * u_e;
            ev.pursuer = best_pursuer;
            traj.capture = ev;
            TrajectorySample last;
            last.t = ev.time;
            last.state = ev.state;
            last.evader_control = u_e;
            last.pursuer_controls = sample.pursuer_controls;
            if (last.t > t) traj.samples.push_back(last);
            break;
        }
        y = std::move(next);
        t += dt;
    }
    return traj;
}

namespace {

std::vector<Vec> sphere_directions(int n, int count, unsigned seed = 7) {
    std::vector<Vec> dirs;
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            double th = 2.0 * M_PI * k / count;
            Vec e(2);
            e << std::cos(th), std::sin(th);
            dirs.push_back(e);
        }
        return dirs;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < count; ++k) {
        Vec e(n);
        do {
            for (int i = 0; i < n; ++i) e[i] = gauss(rng);
        } while (e.norm() < 1e-9);
        dirs.push_back(e.normalized());
    }
    return dirs;
}

} // namespace

ShrinkageReport monitor_shrinkage(const Trajectory& traj, std::span<const PursuerParams> params,
                                  std::size_t cfg_index, int directions) {
    ShrinkageReport report{-std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
    const auto& s = traj.samples;
    if (s.size() < 2) {
        report.max_closing_rate = 1.0 - params[cfg_index].alpha - 1.0; // trivially below bound
        report.max_nesting_violation = 0.0;
        return report;
    }

    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        double d0 = (s[k].state.pursuers[cfg_index] - s[k].state.evader).norm();
        double d1 = (s[k + 1].state.pursuers[cfg_index] - s[k + 1].state.evader).norm();
        report.max_closing_rate =
            std::max(report.max_closing_rate, (d1 - d0) / (s[k + 1].t - s[k].t));
    }

    auto cfg_at = [&](std::size_t k) {
        return OvalConfig{s[k].state.pursuers[cfg_index], s[k].state.evader, params[cfg_index]};
    };
    const int n = int(s[0].state.dimension());
    auto dirs = sphere_directions(n, directions);
    std::size_t last = s.size() - 1;
    if (!cfg_at(last).valid()) --last; // capture sample sits on the terminal boundary

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t stride = std::max<std::size_t>(1, last / 20);
    for (std::size_t k = 0; k + stride <= last; k += stride) pairs.emplace_back(k, k + stride);
    pairs.emplace_back(0, last);

    report.max_nesting_violation = 0.0;
    for (auto [k1, k2] : pairs) {
        OvalConfig c1 = cfg_at(k1), c2 = cfg_at(k2);
        if (!c1.valid() || !c2.valid()) continue;
        for (const auto& e : dirs) {
            Vec x = c2.x_e + rho(c2, e) * e;
            report.max_nesting_violation = std::max(report.max_nesting_violation, margin(x, c1));
        }
    }
    return report;
}

bool epsilon_advance_check(const OvalConfig& cfg, const Vec& x_hat, double eps, int directions) {
    if (std::abs(margin(x_hat, cfg)) > boundary_tolerance(cfg))
        throw NotOnBoundary("epsilon_advance_check: x_hat is not on the oval boundary");
    const double dist_e = (x_hat - cfg.x_e).norm();
    if (eps < 0.0 || eps >= dist_e)
        throw InvalidConfig("epsilon_advance_check: eps outside [0, |x_hat - x_E|)");

    OvalConfig advanced = cfg;
    advanced.x_p += eps * cfg.params.alpha * (x_hat - cfg.x_p).normalized();
    advanced.x_e += eps * (x_hat - cfg.x_e).normalized();

    const double tol = 1e-6 * (1.0 + cfg.separation());
    if (std::abs(margin(x_hat, advanced)) > tol) return false;

    auto dirs = sphere_directions(int(x_hat.size()), directions);
    for (const auto& e : dirs) {
        Vec x = advanced.x_e + rho(advanced, e) * e;
        if (margin(x, cfg) > tol) return false;
    }
    return true;
}

} // namespace pe
