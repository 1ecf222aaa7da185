#include "mfg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mfg {

namespace {

double ball_radius_slack = 1e-12;

double cell_volume(const TorusGrid& g) {
    return g.dim == 1 ? g.h : g.h * g.h;
}

// Distances from one center to every grid point, reused across radii.
void center_distances(const TorusGrid& g, std::int64_t c, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(g.num_points()));
    for (std::int64_t q = 0; q < g.num_points(); ++q) out[static_cast<std::size_t>(q)] = g.distance(c, q);
}

}  // namespace

BallSampler BallSampler::dyadic(const TorusGrid& g, double min_radius, std::int64_t max_centers) {
    BallSampler s;
    const double floor = std::max(2.0 * g.h, min_radius);
    for (double r = 0.5; r >= floor - ball_radius_slack; r *= 0.5) s.radii.push_back(r);
    if (s.radii.empty()) s.radii.push_back(0.5);

    const std::int64_t npts = g.num_points();
    const std::int64_t stride = std::max<std::int64_t>(1, (npts + max_centers - 1) / max_centers);
    for (std::int64_t p = 0; p < npts; p += stride) s.centers.push_back(p);
    s.validate(g);
    return s;
}

void BallSampler::validate(const TorusGrid& g) const {
    if (centers.empty() || radii.empty()) throw std::invalid_argument("ball sampler is empty");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0) || radii[j] > 0.5 + ball_radius_slack)
            throw std::invalid_argument("ball radii must lie in (0, 1/2]");
        if (j > 0 && !(radii[j] < radii[j - 1]))
            throw std::invalid_argument("ball radii must be strictly decreasing");
    }
    for (std::int64_t c : centers)
        if (c < 0 || c >= g.num_points()) throw std::invalid_argument("ball center outside grid");
}

ResidualDiagnostics hj_residual(const ScalarField& u, const MFGProblem& prob, double hbar) {
    ResidualDiagnostics out;
    out.field = residual(u, prob, hbar, 0.0);
    out.linf = linf_norm(out.field);
    out.l2 = l2_norm(out.field);
    return out;
}

ResidualDiagnostics fp_residual(const ScalarField& u, const ScalarField& m, const MFGProblem& prob) {
    ResidualDiagnostics out;
    out.field = fokker_planck_divergence(u, m, prob.a);
    out.linf = linf_norm(out.field);
    out.l2 = l2_norm(out.field);
    return out;
}

MaxPrincipleReport max_principle_check(const ScalarField& u, const MFGProblem& prob, double hbar,
                                       double tol) {
    MaxPrincipleReport rep;
    rep.tol = tol;
    const std::int64_t npts = prob.grid.num_points();
    for (std::int64_t p = 1; p < npts; ++p) {
        if (u[p] > u[rep.argmax]) rep.argmax = p;
        if (u[p] < u[rep.argmin]) rep.argmin = p;
    }
    auto zeroth_order = [&](std::int64_t p) { return prob.v[p] - hbar - prob.coupling.g(-u[p]); };
    rep.max_margin = zeroth_order(rep.argmax);
    rep.min_margin = zeroth_order(rep.argmin);
    rep.pass = rep.max_margin <= tol && rep.min_margin >= -tol;
    return rep;
}

double monotonicity_gap(const ScalarField& m1, const ScalarField& m2, const CouplingSpec& coupling) {
    if (!(m1.grid == m2.grid)) throw std::invalid_argument("monotonicity_gap: grid mismatch");
    for (std::int64_t p = 0; p < m1.grid.num_points(); ++p)
        if (!(m1[p] > 0.0) || !(m2[p] > 0.0))
            throw std::invalid_argument("monotonicity_gap: densities must be positive");

    double s = 0.0;
    for (std::int64_t p = 0; p < m1.grid.num_points(); ++p)
        s += (coupling.g(std::log(m1[p])) - coupling.g(std::log(m2[p]))) * (m1[p] - m2[p]);
    return s * cell_volume(m1.grid);
}

double uniqueness_probe(const MFGProblem& prob, const SolveConfig& config, const std::vector<double>& inits) {
    if (inits.empty()) throw std::invalid_argument("uniqueness_probe: need at least one init");
    std::vector<ScalarField> sols;
    for (double c : inits) {
        ScalarField init(prob.grid, c);
        sols.push_back(solve_mfg(prob, config, &init).u);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < sols.size(); ++i)
        for (std::size_t j = i + 1; j < sols.size(); ++j)
            for (std::int64_t p = 0; p < prob.grid.num_points(); ++p)
                worst = std::max(worst, std::fabs(sols[i][p] - sols[j][p]));
    return worst;
}

double morrey_norm(const ScalarField& f, double p, double lambda, const BallSampler& sampler) {
    if (!(p >= 1.0)) throw std::invalid_argument("morrey_norm: p must be >= 1");
    if (!(lambda >= 0.0 && lambda <= f.grid.dim)) throw std::invalid_argument("morrey_norm: lambda out of range");
    sampler.validate(f.grid);

    const double vol = cell_volume(f.grid);
    double sup = 0.0;
    std::vector<double> dist;
    for (std::int64_t c : sampler.centers) {
        center_distances(f.grid, c, dist);
        for (double r : sampler.radii) {
            double acc = 0.0;
            for (std::int64_t q = 0; q < f.grid.num_points(); ++q)
                if (dist[static_cast<std::size_t>(q)] <= r + ball_radius_slack)
                    acc += std::pow(std::fabs(f[q]), p);
            const double val = std::pow(std::pow(r, -lambda) * acc * vol, 1.0 / p);
            sup = std::max(sup, val);
        }
    }
    return sup;
}

double campanato_norm(const ScalarField& f, double p, double lambda, const BallSampler& sampler) {
    if (!(p >= 1.0)) throw std::invalid_argument("campanato_norm: p must be >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("campanato_norm: lambda must be nonnegative");
    sampler.validate(f.grid);

    const double vol = cell_volume(f.grid);
    double sup = 0.0;
    std::vector<double> dist;
    for (std::int64_t c : sampler.centers) {
        center_distances(f.grid, c, dist);
        for (double r : sampler.radii) {
            double sum = 0.0;
            std::int64_t count = 0;
            for (std::int64_t q = 0; q < f.grid.num_points(); ++q)
                if (dist[static_cast<std::size_t>(q)] <= r + ball_radius_slack) {
                    sum += f[q];
                    ++count;
                }
            if (count == 0) continue;
            const double mean = sum / count;
            double acc = 0.0;
            for (std::int64_t q = 0; q < f.grid.num_points(); ++q)
                if (dist[static_cast<std::size_t>(q)] <= r + ball_radius_slack)
                    acc += std::pow(std::fabs(f[q] - mean), p);
            const double val = std::pow(std::pow(r, -lambda) * acc * vol, 1.0 / p);
            sup = std::max(sup, val);
        }
    }
    return sup;
}

double holder_seminorm(const ScalarField& f, double alpha, int pair_budget, unsigned seed) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder_seminorm: alpha must be in (0,1]");
    const TorusGrid& g = f.grid;
    const std::int64_t npts = g.num_points();
    double sup = 0.0;

    if (npts <= 4096) {
        for (std::int64_t p = 0; p < npts; ++p)
            for (std::int64_t q = p + 1; q < npts; ++q) {
                const double d = g.distance(p, q);
                if (d <= 0.0) continue;
                sup = std::max(sup, std::fabs(f[p] - f[q]) / std::pow(d, alpha));
            }
        return sup;
    }

    std::mt19937 rng(seed);
    std::uniform_int_distribution<std::int64_t> pick(0, npts - 1);
    for (int k = 0; k < pair_budget; ++k) {
        const std::int64_t p = pick(rng);
        const std::int64_t q = pick(rng);
        if (p == q) continue;
        const double d = g.distance(p, q);
        sup = std::max(sup, std::fabs(f[p] - f[q]) / std::pow(d, alpha));
    }
    return sup;
}

double fit_holder_exponent(const ScalarField& f) {
    const TorusGrid& g = f.grid;
    std::vector<double> logs_d, logs_s;
    for (int lag = 1; lag * g.h <= 0.125 + 1e-12; lag *= 2) {
        double inc = 0.0;
        for (int axis = 0; axis < g.dim; ++axis)
            for (std::int64_t p = 0; p < g.num_points(); ++p)
                inc = std::max(inc, std::fabs(f[g.shift(p, axis, lag)] - f[p]));
        if (inc <= 0.0) continue;
        logs_d.push_back(std::log(lag * g.h));
        logs_s.push_back(std::log(inc));
    }
    if (logs_d.size() < 2) return 1.0;  // constant field: maximally smooth

    const std::size_t m = logs_d.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += logs_d[i];
        sy += logs_s[i];
        sxx += logs_d[i] * logs_d[i];
        sxy += logs_d[i] * logs_s[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::clamp(slope, 0.05, 0.999);
}

double caccioppoli_check(const ScalarField& u, const MFGProblem& prob, const BallSampler& sampler,
                         double alpha) {
    sampler.validate(u.grid);
    const TorusGrid& g = u.grid;
    const VectorField du = gradient(u);
    ScalarField energy(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        double e = 0.0;
        for (int k = 0; k < g.dim; ++k) e += du.comp(p, k) * du.comp(p, k);
        energy[p] = e;
    }

    const double exponent = g.dim - 2.0 + 2.0 * alpha;
    const double vol = cell_volume(g);
    double worst = 0.0;
    std::vector<double> dist;
    for (std::int64_t c : sampler.centers) {
        center_distances(g, c, dist);
        for (double r : sampler.radii) {
            double acc = 0.0;
            for (std::int64_t q = 0; q < g.num_points(); ++q)
                if (dist[static_cast<std::size_t>(q)] <= r + ball_radius_slack) acc += energy[q];
            worst = std::max(worst, acc * vol / std::pow(r, exponent));
        }
    }
    return worst;
}

DerivativeEquationFields derivative_equation_fields(const ScalarField& u, const MFGProblem& prob,
                                                    double hbar, int axis) {
    (void)hbar;  // the differentiated equation does not see the constant
    const TorusGrid& g = prob.grid;
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("derivative_equation_fields: bad axis");

    const VectorField du = gradient(u);
    const double inv2h = 1.0 / (2.0 * g.h);

    DerivativeEquationFields out;
    out.v = ScalarField(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) out.v[p] = du.comp(p, axis);

    // Central differences of the sampled coefficient fields along the axis.
    MatrixField a_xk(g);
    ScalarField v_xk(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        const std::int64_t pp = g.shift(p, axis, +1);
        const std::int64_t pm = g.shift(p, axis, -1);
        for (int r = 0; r < g.dim; ++r)
            for (int c = 0; c < g.dim; ++c)
                a_xk.at(p, r, c) = (prob.a.at(pp, r, c) - prob.a.at(pm, r, c)) * inv2h;
        v_xk[p] = (prob.v[pp] - prob.v[pm]) * inv2h;
    }

    out.f1 = ScalarField(g);
    out.f2 = VectorField(g);
    out.f3 = VectorField(g);
    out.f4 = ScalarField(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        out.f1[p] = prob.coupling.eval_g_prime(-u[p]);
        double quad = 0.0;
        for (int r = 0; r < g.dim; ++r) {
            double f2r = 0.0, f3r = 0.0;
            for (int c = 0; c < g.dim; ++c) {
                f2r += a_xk.at(p, r, c) * du.comp(p, c);
                f3r += prob.a.at(p, r, c) * du.comp(p, c);
                quad += du.comp(p, r) * a_xk.at(p, r, c) * du.comp(p, c);
            }
            out.f2.comp(p, r) = f2r;
            out.f3.comp(p, r) = f3r;
        }
        out.f4[p] = 0.5 * quad + v_xk[p];
    }

    const ScalarField diffusion = div_a_grad(out.v, prob.a);
    const VectorField dv = gradient(out.v);
    out.residual = ScalarField(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        double div_f2 = 0.0;
        for (int r = 0; r < g.dim; ++r)
            div_f2 += (out.f2.comp(g.shift(p, r, +1), r) - out.f2.comp(g.shift(p, r, -1), r)) * inv2h;
        double advect = 0.0;
        for (int r = 0; r < g.dim; ++r) advect += out.f3.comp(p, r) * dv.comp(p, r);
        out.residual[p] = -diffusion[p] - div_f2 + out.f1[p] * out.v[p] + advect + out.f4[p];
    }
    out.residual_linf = linf_norm(out.residual);
    out.residual_l2 = l2_norm(out.residual);
    return out;
}

std::vector<ConvergenceRow> convergence_study(const std::string& problem_name, int dim,
                                              const std::vector<int>& sizes, const SolveConfig& config) {
    std::vector<ConvergenceRow> rows;
    double prev_error = 0.0;
    for (int n : sizes) {
        BuiltinProblem bp = builtin_problem(problem_name, dim, n);
        if (!bp.exact) throw std::invalid_argument("convergence_study needs a problem with a known solution");
        MFGSolution sol = solve_mfg(bp.problem, config);
        const ScalarField ustar = bp.exact->sample(bp.problem.grid);

        ConvergenceRow row;
        row.n = n;
        for (std::int64_t p = 0; p < bp.problem.grid.num_points(); ++p)
            row.error_linf = std::max(row.error_linf, std::fabs(sol.u[p] - ustar[p]));
        row.exact = row.error_linf < 1e-12;
        row.observed_order = std::numeric_limits<double>::quiet_NaN();
        if (!rows.empty() && !row.exact && !rows.back().exact)
            row.observed_order = std::log2(prev_error / row.error_linf);
        prev_error = row.error_linf;
        rows.push_back(row);
    }
    return rows;
}

RegularityReport make_regularity_report(const ScalarField& u, const MFGProblem& prob, double hbar,
                                        unsigned seed) {
    RegularityReport rep;
    rep.holder_alpha = fit_holder_exponent(u);
    rep.morrey_lambda = std::clamp(prob.grid.dim - 2.0 + 2.0 * rep.holder_alpha, 0.05,
                                   static_cast<double>(prob.grid.dim));

    const BallSampler sampler = BallSampler::dyadic(prob.grid);
    const VectorField du = gradient(u);
    ScalarField dumag(prob.grid);
    for (std::int64_t p = 0; p < prob.grid.num_points(); ++p) {
        double e = 0.0;
        for (int k = 0; k < prob.grid.dim; ++k) e += du.comp(p, k) * du.comp(p, k);
        dumag[p] = std::sqrt(e);
    }

    rep.morrey_Du = morrey_norm(dumag, 2.0, rep.morrey_lambda, sampler);
    rep.campanato = campanato_norm(u, 2.0, rep.morrey_lambda, sampler);
    rep.holder_seminorm = mfg::holder_seminorm(u, rep.holder_alpha, 200000, seed);
    rep.caccioppoli_ratio = caccioppoli_check(u, prob, sampler, rep.holder_alpha);
    rep.k0_margin = linf_bound_k0(prob, hbar) - linf_norm(u);
    return rep;
}

}  // namespace mfg
