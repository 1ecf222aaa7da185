#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"
#include "mfg/problem.hpp"

namespace mfg {

struct NewtonOptions {
    double tol = 1e-10;          // L-infinity residual target
    int max_iter = 50;
    double armijo_c = 1e-4;
    double min_step = 1.0 / (1 << 20);
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    double residual_linf = 0.0;
    std::vector<double> residual_history;
    std::vector<double> step_sizes;
};

struct StageRecord {
    double eps = 0.0;
    NewtonReport newton;
    double increment_linf = 0.0;  // || u_stage - u_prev ||_inf
    double linf_u = 0.0;
};

struct ContinuationReport {
    std::vector<StageRecord> stages;
    int total_newton_iterations() const {
        int s = 0;
        for (const auto& st : stages) s += st.newton.iterations;
        return s;
    }
};

class NonconvergenceError : public std::runtime_error {
  public:
    NonconvergenceError(std::string what, NewtonReport report, ScalarField last_iterate, int stage = -1)
        : std::runtime_error(std::move(what)),
          report(std::move(report)),
          last_iterate(std::move(last_iterate)),
          stage_index(stage) {}

    NewtonReport report;
    ScalarField last_iterate;
    int stage_index;
};

class BracketFailureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Pointwise residual of the regularized scalar equation,
// F(u) = -div(A Du^T) + H_eps(x, Du) + V - hbar - g(-u).
ScalarField residual(const ScalarField& u, const MFGProblem& prob, double hbar, double eps);

// Sparse entries of dF/du at u: -div(A D.^T) linearization, the dH/dp central
// stencil, and the g'(-u) diagonal.
std::vector<MatrixEntry> assemble_jacobian(const ScalarField& u, const MFGProblem& prob, double eps);

// Damped Newton with Armijo backtracking on ||F||_inf. Throws
// NonconvergenceError when the iteration or step budget runs out.
std::pair<ScalarField, NewtonReport> solve_scalar(const MFGProblem& prob, double hbar, double eps,
                                                  ScalarField init, const NewtonOptions& opts);

// Solves along the decreasing eps schedule, warm-starting every stage.
std::pair<ScalarField, ContinuationReport> continuation_solve(const MFGProblem& prob, double hbar,
                                                              const EpsSchedule& schedule,
                                                              const NewtonOptions& opts,
                                                              const ScalarField* init = nullptr);

// A-priori bound (sup|V - hbar| + 1/C_g)/C_g + 1, independent of eps.
double linf_bound_k0(const MFGProblem& prob, double hbar);

// integral of exp(-u); tolerates overflow to +inf for extreme brackets.
double mass_functional(const ScalarField& u);

ScalarField hopf_cole(const ScalarField& u);

struct BracketResult {
    double hbar_low = 0.0;  // mass < 1 side (the larger constant)
    double hbar_up = 0.0;   // mass > 1 side (the more negative constant)
    double mass_low = 0.0;
    double mass_up = 0.0;
    int expansions = 0;
    int newton_iterations = 0;
    ScalarField u_low;
    ScalarField u_up;
};

// Expands from +-(||V||_inf + 1/C_g + 1) doubling the offset until
// mass(hbar_low) < 1 < mass(hbar_up); at most 60 expansions per side. A trial
// constant whose inner solve fails to converge counts as an unmet condition
// and the expansion continues outward.
BracketResult bracket_hbar(const MFGProblem& prob, const EpsSchedule& schedule, const NewtonOptions& opts,
                           const ScalarField* init = nullptr);

struct BisectionRecord {
    double hbar = 0.0;
    double mass = 0.0;
};

struct MFGSolution {
    ScalarField u;
    ScalarField m;
    double hbar = 0.0;
    double k0 = 0.0;
    double mass = 0.0;

    ContinuationReport final_continuation;
    std::vector<ContinuationReport> continuation_history;  // one per bisection evaluation
    std::vector<BisectionRecord> bisection_history;
    std::vector<ScalarField> last_bisection_fields;  // solutions of the final two evaluations
    BracketResult bracket;
    int bisect_iterations = 0;
    int newton_iterations_total = 0;
};

struct SolveConfig {
    EpsSchedule schedule;
    NewtonOptions newton;
    double bisect_tol = 1e-10;
};

// Bisection on hbar between the bracket endpoints until |mass - 1| is within
// tolerance; every evaluation is a warm-started continuation solve.
MFGSolution normalize_hbar(const MFGProblem& prob, const EpsSchedule& schedule, const NewtonOptions& opts,
                           double bisect_tol, const ScalarField* init = nullptr);

MFGSolution solve_mfg(const MFGProblem& prob, const SolveConfig& config, const ScalarField* init = nullptr);

}  // namespace mfg
