#include "pe/viscosity.hpp"

#include <cmath>

namespace pe {

double hamiltonian(const CovectorP& p, std::span<const PursuerParams> params) {
    double h = p.evader.norm();
    for (std::size_t i = 0; i < p.pursuer.size(); ++i)
        h -= params[i].alpha * p.pursuer[i].norm();
    return h;
}

FdResult fd_gradient(const std::function<double(const GameState&)>& value_fn, const GameState& y,
                     std::span<const PursuerParams> params, double step) {
    if (terminal_margin(y, params) <= 2.0 * step)
        throw TerminalProximity("state too close to the terminal set for finite differences");

    const Eigen::Index n = y.dimension();
    const int m = int(y.pursuer_count());
    const double v0 = value_fn(y);

    FdResult out;
    out.gradient.pursuer.resize(m, Vec::Zero(n));
    out.gradient.evader = Vec::Zero(n);
    out.differentiability_score = 0.0;

    auto probe = [&](int block, Eigen::Index k, double delta) {
        GameState z = y;
        if (block < m)
            z.pursuers[block][k] += delta;
        else
            z.evader[k] += delta;
        return value_fn(z);
    };

    for (int block = 0; block <= m; ++block) {
        for (Eigen::Index k = 0; k < n; ++k) {
            double vp = probe(block, k, step);
            double vm = probe(block, k, -step);
            double fwd = (vp - v0) / step;
            double bwd = (v0 - vm) / step;
            double central = 0.5 * (fwd + bwd);
            out.differentiability_score =
                std::max(out.differentiability_score, std::abs(fwd - bwd));
            if (block < m)
                out.gradient.pursuer[block][k] = central;
            else
                out.gradient.evader[k] = central;
        }
    }
    return out;
}

PdeCheckReport check_pde_at(const GameState& y, std::span<const PursuerParams> params,
                            const TerminalCost& cost, const PdeOptions& opts) {
    double ymax = y.evader.lpNorm<Eigen::Infinity>();
    for (const auto& p : y.pursuers) ymax = std::max(ymax, p.lpNorm<Eigen::Infinity>());
    const double step = opts.step_scale * (1.0 + ymax);

    SolveOptions sopts = opts.solve;
    sopts.with_multipliers = false;
    auto value_fn = [&](const GameState& z) {
        return solve_value(z, params, cost, sopts).value;
    };

    PdeCheckReport report;
    report.state = y;
    report.step = step;
    FdResult fd = fd_gradient(value_fn, y, params, step);
    report.fd_grad = fd.gradient;
    report.differentiability_score = fd.differentiability_score;
    report.hamiltonian_residual = hamiltonian(fd.gradient, params);

    if (fd.differentiability_score > opts.kink_factor * step) {
        report.verdict = PdeCheckReport::Verdict::Skip;
    } else if (std::abs(report.hamiltonian_residual) <= opts.pde_tol) {
        report.verdict = PdeCheckReport::Verdict::Pass;
    } else {
        report.verdict = PdeCheckReport::Verdict::Fail;
    }
    return report;
}

namespace {

CovectorP blend(const CovectorP& a, const CovectorP& b, double t) {
    CovectorP c;
    c.optimum_index = -1;
    c.evader = (1.0 - t) * a.evader + t * b.evader;
    c.pursuer.resize(a.pursuer.size());
    for (std::size_t i = 0; i < a.pursuer.size(); ++i)
        c.pursuer[i] = (1.0 - t) * a.pursuer[i] + t * b.pursuer[i];
    return c;
}

} // namespace

bool check_subsolution_samples(const ValueResult& result, std::span<const PursuerParams> params) {
    const auto& samples = result.gradient_samples;
    auto ok = [&](const CovectorP& p) {
        return hamiltonian(p, params) <= 1e-9 * (1.0 + p.norm());
    };
    for (const auto& p : samples)
        if (!ok(p)) return false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            for (int k = 0; k <= 10; ++k) {
                if (!ok(blend(samples[i], samples[j], k / 10.0))) return false;
            }
        }
    }
    return true;
}

bool check_supersolution_equality(const ValueResult& result,
                                  std::span<const PursuerParams> params) {
    for (const auto& p : result.gradient_samples) {
        if (p.optimum_index < 0) continue;
        if (std::abs(hamiltonian(p, params)) > 1e-8 * (1.0 + p.norm())) return false;
    }
    return true;
}

} // namespace pe
