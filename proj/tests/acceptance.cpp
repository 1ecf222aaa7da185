// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not tuned at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfg/diagnostics.hpp"
#include "mfg/problem.hpp"
#include "mfg/solver.hpp"

using namespace mfg;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Harness {
  public:
    void run(int id, const std::string& title, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %2d  %s  [%s] (%.2f s)\n", out.pass ? "PASS" : "FAIL", id,
                    title.c_str(), out.detail.c_str(), dt);
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    }

    int failures = 0;
};

struct SolvedBuiltin {
    std::string name;
    int dim;
    int n;
    BuiltinProblem bp;
    MFGSolution sol;
};

// Base problem set shared across criteria; solved once.
class Context {
  public:
    const SolvedBuiltin& solved(const std::string& name, int dim, int n) {
        const std::string key = name + ":" + std::to_string(n);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            SolvedBuiltin sb{name, dim, n, builtin_problem(name, dim, n), {}};
            sb.sol = solve_mfg(sb.bp.problem, SolveConfig{});
            it = cache_.emplace(key, std::move(sb)).first;
        }
        return it->second;
    }

    std::vector<const SolvedBuiltin*> base_set() {
        return {&solved("trivial", 1, 64), &solved("manufactured_1d", 1, 64),
                &solved("manufactured_2d", 2, 16), &solved("anisotropic_2d", 2, 32)};
    }

  private:
    std::map<std::string, SolvedBuiltin> cache_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

double linf_diff(const ScalarField& a, const ScalarField& b) {
    double d = 0.0;
    for (std::int64_t p = 0; p < a.grid.num_points(); ++p) d = std::max(d, std::fabs(a[p] - b[p]));
    return d;
}

ScalarField sampled_gradient_magnitude(const ScalarField& u) {
    VectorField du = gradient(u);
    ScalarField out(u.grid);
    for (std::int64_t p = 0; p < u.grid.num_points(); ++p) {
        double e = 0.0;
        for (int k = 0; k < u.grid.dim; ++k) e += du.comp(p, k) * du.comp(p, k);
        out[p] = std::sqrt(e);
    }
    return out;
}

Outcome criterion_trivial_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    BuiltinProblem bp = builtin_problem("trivial", 1, 64);
    MFGSolution sol = solve_mfg(bp.problem, SolveConfig{});
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Outcome out;
    out.pass = linf_norm(sol.u) <= 1e-10 && std::fabs(sol.hbar) <= 1e-10 &&
               std::fabs(sol.mass - 1.0) <= 1e-10 && dt < 1.0;
    out.detail = fmt("linf_u=%.2e |hbar|=%.2e |mass-1|=%.2e", linf_norm(sol.u), std::fabs(sol.hbar),
                     std::fabs(sol.mass - 1.0)) +
                 fmt(" t=%.2fs", dt);
    return out;
}

Outcome criterion_convergence(Context& ctx, const std::string& name, int dim,
                              const std::vector<int>& sizes, double budget_s) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> errors;
    for (int n : sizes) {
        const SolvedBuiltin& sb = ctx.solved(name, dim, n);
        const ScalarField ustar = sb.bp.exact->sample(sb.bp.problem.grid);
        errors.push_back(linf_diff(sb.sol.u, ustar));
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Outcome out;
    std::ostringstream detail;
    detail.precision(3);
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        detail << "order=" << order << " ";
        out.pass = out.pass && order >= 1.7 && order <= 2.3;
    }
    out.pass = out.pass && dt < budget_s;
    detail << "errors=(";
    for (double e : errors) detail << fmt("%.2e ", e);
    detail << ") t=" << fmt("%.1fs", dt);
    out.detail = detail.str();
    return out;
}

Outcome criterion_eps_independent_bound() {
    BuiltinProblem bp = builtin_problem("anisotropic_2d", 2, 32);
    Outcome out;
    double worst = -1e300;
    for (double hbar : {-1.0, 0.0, 1.0}) {
        auto [u, rep] = continuation_solve(bp.problem, hbar, EpsSchedule{}, NewtonOptions{});
        const double k0 = linf_bound_k0(bp.problem, hbar);
        for (const auto& st : rep.stages) {
            worst = std::max(worst, st.linf_u - k0);
            out.pass = out.pass && st.linf_u <= k0 + 1e-6;
        }
    }
    out.detail = fmt("max(linf_u - k0)=%.2e over all stages", worst);
    return out;
}

Outcome criterion_continuation_increments(Context& ctx) {
    Outcome out;
    double worst_final = 0.0;
    for (const SolvedBuiltin* sb : ctx.base_set()) {
        auto [u, rep] = continuation_solve(sb->bp.problem, sb->sol.hbar, EpsSchedule{}, NewtonOptions{});
        // Stage-to-stage increments; the first entry is measured against the
        // cold start and is not part of the monotone tail.
        std::vector<double> inc;
        for (std::size_t s = 1; s < rep.stages.size(); ++s) inc.push_back(rep.stages[s].increment_linf);
        for (std::size_t k = 1; k + 1 < inc.size(); ++k)
            out.pass = out.pass && inc[k + 1] <= inc[k] + 1e-12;
        const double final_inc = inc.back();
        worst_final = std::max(worst_final, final_inc);
        out.pass = out.pass && final_inc <= 1e-8;
    }
    out.detail = fmt("max final-stage increment=%.2e", worst_final);
    return out;
}

Outcome criterion_fp_residual_order() {
    Outcome out;
    std::ostringstream detail;
    detail.precision(3);

    auto ratios = [&](const std::string& name, int dim, const std::vector<int>& sizes) {
        std::vector<double> norms;
        for (int n : sizes) {
            BuiltinProblem bp = builtin_problem(name, dim, n);
            ScalarField ustar = bp.exact->sample(bp.problem.grid);
            norms.push_back(fp_residual(ustar, hopf_cole(ustar), bp.problem).linf);
        }
        for (std::size_t k = 0; k + 1 < norms.size(); ++k) {
            const double ratio = norms[k] / norms[k + 1];
            detail << name << ":ratio=" << ratio << " ";
            out.pass = out.pass && ratio >= 3.0 && ratio <= 5.0;
        }
    };
    ratios("manufactured_1d", 1, {64, 128, 256});
    ratios("manufactured_2d", 2, {32, 64, 128});
    out.detail = detail.str();
    return out;
}

Outcome criterion_uniqueness(Context& ctx) {
    Outcome out;
    double worst = 0.0;
    for (const SolvedBuiltin* sb : ctx.base_set()) {
        const double k0 = linf_bound_k0(sb->bp.problem, 0.0);
        const double probe = uniqueness_probe(sb->bp.problem, SolveConfig{}, {+k0, 0.0, -k0});
        worst = std::max(worst, probe);
        out.pass = out.pass && probe <= 1e-8;
    }
    out.detail = fmt("max pairwise distance=%.2e", worst);
    return out;
}

Outcome criterion_max_principle(Context& ctx) {
    Outcome out;
    for (const SolvedBuiltin* sb : ctx.base_set()) {
        const double h = sb->bp.problem.grid.h;
        const auto rep = max_principle_check(sb->sol.u, sb->bp.problem, sb->sol.hbar, 10.0 * h * h);
        out.pass = out.pass && rep.pass;
    }

    // Negative control: a pair that does not solve the equation must fail.
    TorusGrid g = make_grid(1, 64);
    ScalarField v = sample_scalar(g, [](std::array<double, 2> x) { return 0.3 * std::cos(two_pi * x[0]); });
    MFGProblem prob = MFGProblem::validated(identity_matrix_field(g), v, CouplingSpec::identity());
    const auto bad = max_principle_check(ScalarField(g, 0.0), prob, 0.0, 10.0 * g.h * g.h);
    out.pass = out.pass && !bad.pass;
    out.detail = fmt("negative control max_margin=%.2e (must exceed tol)", bad.max_margin);
    return out;
}

Outcome criterion_monotonicity(Context& ctx) {
    Outcome out;
    TorusGrid g = make_grid(1, 32);
    CouplingSpec id = CouplingSpec::identity();
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> unif(0.1, 4.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        ScalarField m1(g), m2(g);
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            m1[p] = unif(rng);
            m2[p] = unif(rng);
        }
        const double gap = monotonicity_gap(m1, m2, id);
        worst = std::min(worst, gap);
        out.pass = out.pass && gap >= -1e-12;
    }

    // Pairs of densities from consecutive bisection iterates.
    for (const SolvedBuiltin* sb : ctx.base_set()) {
        if (sb->sol.last_bisection_fields.size() < 2) continue;
        const double gap = monotonicity_gap(hopf_cole(sb->sol.last_bisection_fields[0]),
                                            hopf_cole(sb->sol.last_bisection_fields[1]),
                                            sb->bp.problem.coupling);
        worst = std::min(worst, gap);
        out.pass = out.pass && gap >= -1e-12;
    }
    out.detail = fmt("min gap=%.2e", worst);
    return out;
}

Outcome criterion_morrey(Context& ctx) {
    Outcome out;

    // Radii fixed across grids and resolved on the coarsest one.
    const double min_radius = 1.0 / 8.0;
    const double alpha = fit_holder_exponent(ctx.solved("manufactured_1d", 1, 64).sol.u);
    const double lambda = 1.0 - 2.0 + 2.0 * alpha;

    std::vector<double> norms;
    for (int n : {64, 128, 256}) {
        const SolvedBuiltin& sb = ctx.solved("manufactured_1d", 1, n);
        BallSampler sampler = BallSampler::dyadic(sb.bp.problem.grid, min_radius);
        norms.push_back(morrey_norm(sampled_gradient_magnitude(sb.sol.u), 2.0, lambda, sampler));
    }
    const double hi = std::max({norms[0], norms[1], norms[2]});
    const double lo = std::min({norms[0], norms[1], norms[2]});
    out.pass = hi / lo <= 1.1;

    // Seam-discontinuity control grows across the same refinement range.
    std::vector<double> seam;
    for (int n : {64, 256}) {
        TorusGrid g = make_grid(1, n);
        ScalarField saw = sample_scalar(g, [](std::array<double, 2> x) { return x[0]; });
        BallSampler sampler = BallSampler::dyadic(g, min_radius);
        seam.push_back(morrey_norm(sampled_gradient_magnitude(saw), 2.0, lambda, sampler));
    }
    const double growth = seam[1] / seam[0];
    out.pass = out.pass && growth > 2.0;
    out.detail = fmt("alpha=%.3f spread=%.3f control growth=%.2f", alpha, hi / lo, growth);
    return out;
}

Outcome criterion_jacobian(Context& ctx) {
    Outcome out;
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;

    for (const SolvedBuiltin* sb : ctx.base_set()) {
        const TorusGrid& g = sb->bp.problem.grid;
        const std::int64_t npts = g.num_points();
        const ScalarField& u = sb->sol.u;
        const auto entries = assemble_jacobian(u, sb->bp.problem, 0.0);

        for (int t = 0; t < 20; ++t) {
            std::vector<double> w(static_cast<std::size_t>(npts));
            for (auto& x : w) x = unif(rng);

            std::vector<double> jw(static_cast<std::size_t>(npts), 0.0);
            for (const auto& e : entries)
                jw[static_cast<std::size_t>(e.row)] += e.value * w[static_cast<std::size_t>(e.col)];

            const double tau = 1e-6;
            ScalarField up(g), um(g);
            for (std::int64_t p = 0; p < npts; ++p) {
                up[p] = u[p] + tau * w[static_cast<std::size_t>(p)];
                um[p] = u[p] - tau * w[static_cast<std::size_t>(p)];
            }
            const ScalarField fp = residual(up, sb->bp.problem, sb->sol.hbar, 0.0);
            const ScalarField fm = residual(um, sb->bp.problem, sb->sol.hbar, 0.0);

            double scale = 0.0, err = 0.0;
            for (std::int64_t p = 0; p < npts; ++p) {
                scale = std::max(scale, std::fabs(jw[static_cast<std::size_t>(p)]));
                const double fd = (fp[p] - fm[p]) / (2.0 * tau);
                err = std::max(err, std::fabs(fd - jw[static_cast<std::size_t>(p)]));
            }
            worst = std::max(worst, err / scale);
            out.pass = out.pass && err / scale <= 1e-5;
        }
    }
    out.detail = fmt("max relative error=%.2e", worst);
    return out;
}

Outcome criterion_bisection(Context& ctx) {
    Outcome out;
    int max_expansions = 0;
    double worst_mass = 0.0;
    for (const SolvedBuiltin* sb : ctx.base_set()) {
        max_expansions = std::max(max_expansions, sb->sol.bracket.expansions);
        worst_mass = std::max(worst_mass, std::fabs(sb->sol.mass - 1.0));
        out.pass = out.pass && sb->sol.bracket.expansions <= 60 && std::fabs(sb->sol.mass - 1.0) <= 1e-10;
    }

    // Sweep oracle: the trivial mass map is exp(-hbar).
    BuiltinProblem bp = builtin_problem("trivial", 1, 64);
    double worst_sweep = 0.0;
    for (double hbar : {-1.0, 0.0, 1.0}) {
        auto [u, rep] = continuation_solve(bp.problem, hbar, EpsSchedule{}, NewtonOptions{});
        const double err = std::fabs(mass_functional(u) - std::exp(-hbar));
        worst_sweep = std::max(worst_sweep, err);
        out.pass = out.pass && err <= 1e-8;
    }
    out.detail = fmt("expansions<=%g |mass-1|<=%.2e sweep err<=%.2e", double(max_expansions), worst_mass,
                     worst_sweep);
    return out;
}

}  // namespace

int main() {
    Harness h;
    Context ctx;

    h.run(1, "trivial problem exactness", [&] { return criterion_trivial_exactness(); });
    h.run(2, "manufactured convergence, d=1",
          [&] { return criterion_convergence(ctx, "manufactured_1d", 1, {64, 128, 256}, 10.0); });
    h.run(3, "manufactured convergence, d=2",
          [&] { return criterion_convergence(ctx, "manufactured_2d", 2, {16, 32, 64}, 120.0); });
    h.run(4, "eps-independent L-infinity bound", [&] { return criterion_eps_independent_bound(); });
    h.run(5, "continuation increments decrease", [&] { return criterion_continuation_increments(ctx); });
    h.run(6, "Hopf-Cole Fokker-Planck residual order", [&] { return criterion_fp_residual_order(); });
    h.run(7, "uniqueness across inits", [&] { return criterion_uniqueness(ctx); });
    h.run(8, "maximum principle with negative control", [&] { return criterion_max_principle(ctx); });
    h.run(9, "coupling monotonicity gap", [&] { return criterion_monotonicity(ctx); });
    h.run(10, "Morrey boundedness of the gradient", [&] { return criterion_morrey(ctx); });
    h.run(11, "Jacobian against finite differences", [&] { return criterion_jacobian(ctx); });
    h.run(12, "bracket and bisection of the ergodic constant", [&] { return criterion_bisection(ctx); });

    std::printf("%d of 12 criteria passed\n", 12 - h.failures);
    return h.failures;
}
