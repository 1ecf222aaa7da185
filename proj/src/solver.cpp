#include "mfg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>

#include "mfg/linear_solver.hpp"

namespace mfg {

namespace {

std::span<const double> matrix_at(const MatrixField& a, std::int64_t p) {
    const int d = a.grid.dim;
    return {a.values.data() + static_cast<std::size_t>(p) * d * d, static_cast<std::size_t>(d) * d};
}

std::span<const double> vector_at(const VectorField& f, std::int64_t p) {
    const int d = f.grid.dim;
    return {f.values.data() + static_cast<std::size_t>(p) * d, static_cast<std::size_t>(d)};
}

}  // namespace

std::vector<MatrixEntry> assemble_jacobian(const ScalarField& u, const MFGProblem& prob, double eps) {
    const TorusGrid& g = prob.grid;
    std::vector<MatrixEntry> entries = div_a_grad_entries(prob.a);
    for (auto& e : entries) e.value = -e.value;

    const VectorField du = gradient(u);
    const double inv2h = 1.0 / (2.0 * g.h);
    double w[2];
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        dh_eps_dp(vector_at(du, p), matrix_at(prob.a, p), eps, std::span<double>(w, g.dim));
        for (int k = 0; k < g.dim; ++k) {
            entries.push_back({p, g.shift(p, k, +1), w[k] * inv2h});
            entries.push_back({p, g.shift(p, k, -1), -w[k] * inv2h});
        }
        entries.push_back({p, p, prob.coupling.eval_g_prime(-u[p])});
    }
    return entries;
}

namespace {

// The residual cannot be evaluated below eps_mach * ||A/h^2|| * ||u||; the
// convergence test floors the tolerance there so iterations at large |hbar|
// (bracket endpoints) terminate instead of chasing rounding noise.
double residual_noise_floor(const MFGProblem& prob, const ScalarField& u) {
    const double h = prob.grid.h;
    const double op_scale = prob.theta1 * prob.grid.dim / (h * h);
    return 8.0 * std::numeric_limits<double>::epsilon() * op_scale * std::max(1.0, linf_norm(u));
}

std::pair<ScalarField, NewtonReport> newton_solve(const MFGProblem& prob, double hbar, double eps,
                                                  ScalarField u, const NewtonOptions& opts,
                                                  SparseDirectSolver& lu) {
    if (!u.all_finite()) throw std::invalid_argument("newton: initial iterate has non-finite values");
    const std::int64_t npts = prob.grid.num_points();

    NewtonReport report;
    ScalarField f = residual(u, prob, hbar, eps);
    double fnorm = linf_norm(f);
    report.residual_history.push_back(fnorm);

    while (fnorm > std::max(opts.tol, residual_noise_floor(prob, u))) {
        if (report.iterations >= opts.max_iter) {
            report.residual_linf = fnorm;
            throw NonconvergenceError("newton iteration budget exhausted", report, u);
        }

        std::vector<double> delta;
        try {
            lu.factorize(assemble_jacobian(u, prob, eps), npts);
            std::vector<double> rhs(f.values);
            for (double& v : rhs) v = -v;
            delta = lu.solve(rhs);
        } catch (const std::runtime_error& e) {
            report.residual_linf = fnorm;
            throw NonconvergenceError(std::string("newton linear solver breakdown: ") + e.what(), report,
                                      u);
        }

        double step = 1.0;
        bool accepted = false;
        ScalarField trial(prob.grid);
        ScalarField ftrial;
        double ftnorm = 0.0;
        while (step >= opts.min_step) {
            for (std::int64_t p = 0; p < npts; ++p)
                trial[p] = u[p] + step * delta[static_cast<std::size_t>(p)];
            ftrial = residual(trial, prob, hbar, eps);
            ftnorm = linf_norm(ftrial);
            if (std::isfinite(ftnorm) && ftnorm <= (1.0 - opts.armijo_c * step) * fnorm) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            report.residual_linf = fnorm;
            throw NonconvergenceError("newton line search stalled", report, u);
        }

        u = std::move(trial);
        f = std::move(ftrial);
        fnorm = ftnorm;
        ++report.iterations;
        report.residual_history.push_back(fnorm);
        report.step_sizes.push_back(step);
    }

    report.converged = true;
    report.residual_linf = fnorm;
    return {std::move(u), std::move(report)};
}

std::pair<ScalarField, ContinuationReport> continuation_impl(const MFGProblem& prob, double hbar,
                                                             const EpsSchedule& schedule,
                                                             const NewtonOptions& opts,
                                                             const ScalarField* init,
                                                             SparseDirectSolver& lu) {
    ContinuationReport report;
    ScalarField u = init ? *init : ScalarField(prob.grid, 0.0);
    const std::vector<double> stages = schedule.stages();
    for (std::size_t s = 0; s < stages.size(); ++s) {
        ScalarField prev = u;
        NewtonReport nr;
        try {
            std::tie(u, nr) = newton_solve(prob, hbar, stages[s], std::move(u), opts, lu);
        } catch (NonconvergenceError& e) {
            e.stage_index = static_cast<int>(s);
            throw;
        }
        StageRecord rec;
        rec.eps = stages[s];
        rec.newton = std::move(nr);
        double inc = 0.0;
        for (std::int64_t p = 0; p < prob.grid.num_points(); ++p)
            inc = std::max(inc, std::fabs(u[p] - prev[p]));
        rec.increment_linf = inc;
        rec.linf_u = linf_norm(u);
        report.stages.push_back(std::move(rec));
    }
    return {std::move(u), std::move(report)};
}

struct MassEval {
    double mass = 0.0;
    ScalarField u;
    ContinuationReport report;
    bool converged = false;
};

MassEval eval_mass(const MFGProblem& prob, double hbar, const EpsSchedule& schedule,
                   const NewtonOptions& opts, const ScalarField* warm, SparseDirectSolver& lu) {
    MassEval out;
    try {
        std::tie(out.u, out.report) = continuation_impl(prob, hbar, schedule, opts, warm, lu);
        out.mass = mass_functional(out.u);
        out.converged = true;
    } catch (const NonconvergenceError&) {
        out.converged = false;
    }
    return out;
}

}  // namespace

ScalarField residual(const ScalarField& u, const MFGProblem& prob, double hbar, double eps) {
    const TorusGrid& g = prob.grid;
    if (!(u.grid == g)) throw std::invalid_argument("residual: field grid mismatch");

    ScalarField diffusion = div_a_grad(u, prob.a);
    const VectorField du = gradient(u);
    ScalarField out(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        const double ham = h_eps(vector_at(du, p), matrix_at(prob.a, p), eps);
        out[p] = -diffusion[p] + ham + prob.v[p] - hbar - prob.coupling.g(-u[p]);
    }
    return out;
}

std::pair<ScalarField, NewtonReport> solve_scalar(const MFGProblem& prob, double hbar, double eps,
                                                  ScalarField init, const NewtonOptions& opts) {
    SparseDirectSolver lu;
    return newton_solve(prob, hbar, eps, std::move(init), opts, lu);
}

std::pair<ScalarField, ContinuationReport> continuation_solve(const MFGProblem& prob, double hbar,
                                                              const EpsSchedule& schedule,
                                                              const NewtonOptions& opts,
                                                              const ScalarField* init) {
    SparseDirectSolver lu;
    return continuation_impl(prob, hbar, schedule, opts, init, lu);
}

double linf_bound_k0(const MFGProblem& prob, double hbar) {
    double cv = 0.0;
    for (double v : prob.v.values) cv = std::max(cv, std::fabs(v - hbar));
    const double cg = prob.coupling.c_g;
    return (cv + 1.0 / cg) / cg + 1.0;
}

double mass_functional(const ScalarField& u) {
    double s = 0.0;
    for (double v : u.values) s += std::exp(-v);
    double hd = u.grid.h;
    if (u.grid.dim == 2) hd *= u.grid.h;
    return s * hd;
}

ScalarField hopf_cole(const ScalarField& u) {
    ScalarField m(u.grid);
    for (std::int64_t p = 0; p < u.grid.num_points(); ++p) m[p] = std::exp(-u[p]);
    return m;
}

BracketResult bracket_hbar(const MFGProblem& prob, const EpsSchedule& schedule, const NewtonOptions& opts,
                           const ScalarField* init) {
    SparseDirectSolver lu;
    BracketResult out;
    const double delta0 = linf_norm(prob.v) + 1.0 / prob.coupling.c_g + 1.0;
    const int max_expansions = 60;

    // Low side: the larger constant, pushing the mass below one.
    {
        double delta = delta0;
        const ScalarField* warm = init;
        int tries = 0;
        while (true) {
            MassEval ev = eval_mass(prob, +delta, schedule, opts, warm, lu);
            if (ev.converged) out.newton_iterations += ev.report.total_newton_iterations();
            if (ev.converged && ev.mass < 1.0) {
                out.hbar_low = +delta;
                out.mass_low = ev.mass;
                out.u_low = std::move(ev.u);
                break;
            }
            if (ev.converged) {
                out.u_low = std::move(ev.u);
                warm = &out.u_low;
            }
            if (++tries > max_expansions)
                throw BracketFailureError("bracket failure: mass stayed >= 1 on the low side");
            delta *= 2.0;
            out.expansions += 1;
        }
    }

    // Up side: the more negative constant, pushing the mass above one.
    {
        double delta = delta0;
        const ScalarField* warm = init;
        int tries = 0;
        while (true) {
            MassEval ev = eval_mass(prob, -delta, schedule, opts, warm, lu);
            if (ev.converged) out.newton_iterations += ev.report.total_newton_iterations();
            if (ev.converged && ev.mass > 1.0) {
                out.hbar_up = -delta;
                out.mass_up = ev.mass;
                out.u_up = std::move(ev.u);
                break;
            }
            if (ev.converged) {
                out.u_up = std::move(ev.u);
                warm = &out.u_up;
            }
            if (++tries > max_expansions)
                throw BracketFailureError("bracket failure: mass stayed <= 1 on the up side");
            delta *= 2.0;
            out.expansions += 1;
        }
    }
    return out;
}

MFGSolution normalize_hbar(const MFGProblem& prob, const EpsSchedule& schedule, const NewtonOptions& opts,
                           double bisect_tol, const ScalarField* init) {
    if (!(bisect_tol > 0.0)) throw std::invalid_argument("bisect_tol must be positive");
    // Stop a factor below the requested tolerance so downstream users of hbar
    // see the full advertised accuracy despite the curvature of the mass map.
    const double target = 0.25 * bisect_tol;

    SparseDirectSolver lu;
    MFGSolution sol;

    sol.bracket = bracket_hbar(prob, schedule, opts, init);
    sol.bisection_history.push_back({sol.bracket.hbar_low, sol.bracket.mass_low});
    sol.bisection_history.push_back({sol.bracket.hbar_up, sol.bracket.mass_up});

    double lo = sol.bracket.hbar_low;  // mass < 1
    double up = sol.bracket.hbar_up;   // mass > 1
    ScalarField warm = sol.bracket.u_low;

    const int max_bisect = 200;
    bool found = false;
    for (int k = 0; k < max_bisect && !found; ++k) {
        const double mid = 0.5 * (lo + up);
        std::tie(warm, sol.final_continuation) = continuation_impl(prob, mid, schedule, opts, &warm, lu);
        const double mass = mass_functional(warm);

        sol.continuation_history.push_back(sol.final_continuation);
        sol.bisection_history.push_back({mid, mass});
        sol.last_bisection_fields.push_back(warm);
        if (sol.last_bisection_fields.size() > 2)
            sol.last_bisection_fields.erase(sol.last_bisection_fields.begin());
        ++sol.bisect_iterations;

        if (std::fabs(mass - 1.0) <= target) {
            sol.hbar = mid;
            sol.mass = mass;
            found = true;
        } else if (mass > 1.0) {
            up = mid;
        } else {
            lo = mid;
        }
    }
    if (!found) throw std::runtime_error("bisection on the ergodic constant did not reach tolerance");

    sol.u = std::move(warm);
    sol.m = hopf_cole(sol.u);
    sol.k0 = linf_bound_k0(prob, sol.hbar);
    sol.newton_iterations_total = sol.bracket.newton_iterations;
    for (const auto& rep : sol.continuation_history)
        sol.newton_iterations_total += rep.total_newton_iterations();

    if (linf_norm(sol.u) > sol.k0 + 1e-6)
        throw std::runtime_error("solution violates the a-priori L-infinity bound");
    for (double v : sol.m.values)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::runtime_error("density is not strictly positive");
    return sol;
}

MFGSolution solve_mfg(const MFGProblem& prob, const SolveConfig& config, const ScalarField* init) {
    return normalize_hbar(prob, config.schedule, config.newton, config.bisect_tol, init);
}

}  // namespace mfg
