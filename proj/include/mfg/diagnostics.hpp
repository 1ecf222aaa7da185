#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/problem.hpp"
#include "mfg/solver.hpp"

namespace mfg {

// Ball family for Morrey/Campanato/Caccioppoli scans. Periodic metric, radii
// dyadic and capped at 1/2 (the injectivity radius of the unit torus).
struct BallSampler {
    std::vector<std::int64_t> centers;
    std::vector<double> radii;  // strictly decreasing

    // Radii 2^-j, j = 1,2,... down to max(2h, min_radius). Centers are all
    // grid points up to max_centers, then a deterministic stride subset.
    static BallSampler dyadic(const TorusGrid& g, double min_radius = 0.0, std::int64_t max_centers = 4096);

    void validate(const TorusGrid& g) const;
};

struct ResidualDiagnostics {
    ScalarField field;
    double linf = 0.0;
    double l2 = 0.0;
};

// Strong-form residual of the exact (eps = 0) scalar equation.
ResidualDiagnostics hj_residual(const ScalarField& u, const MFGProblem& prob, double hbar);

// Divergence-form residual div(A Dm^T) + div(m A Du^T); exactly zero for
// constant u with m = exp(-u), pure truncation error for the smooth pair.
ResidualDiagnostics fp_residual(const ScalarField& u, const ScalarField& m, const MFGProblem& prob);

struct MaxPrincipleReport {
    std::int64_t argmax = 0;
    std::int64_t argmin = 0;
    double max_margin = 0.0;  // V - hbar - g(-u) at the argmax; must be <= tol
    double min_margin = 0.0;  // same at the argmin; must be >= -tol
    double tol = 0.0;
    bool pass = false;
};

MaxPrincipleReport max_principle_check(const ScalarField& u, const MFGProblem& prob, double hbar, double tol);

// integral of (g(log m1) - g(log m2)) (m1 - m2); nonnegative for monotone g.
double monotonicity_gap(const ScalarField& m1, const ScalarField& m2, const CouplingSpec& coupling);

// Max pairwise distance between full solves started from constant inits.
double uniqueness_probe(const MFGProblem& prob, const SolveConfig& config, const std::vector<double>& inits);

double morrey_norm(const ScalarField& f, double p, double lambda, const BallSampler& sampler);

// Same scan with the ball mean removed. The scaling exponent is a parameter
// (default callers pass the Morrey lambda).
double campanato_norm(const ScalarField& f, double p, double lambda, const BallSampler& sampler);

// Max |f(x)-f(y)| / dist(x,y)^alpha; all pairs when the grid has at most 4096
// points, otherwise pair_budget seeded random pairs.
double holder_seminorm(const ScalarField& f, double alpha, int pair_budget = 200000, unsigned seed = 12345);

// Least-squares slope of log max-increment against log lag over dyadic lags;
// clamped to [0.05, 0.999].
double fit_holder_exponent(const ScalarField& f);

// C* = max over sampled balls of (integral of |Du|^2 over B_R) / R^(d-2+2alpha).
double caccioppoli_check(const ScalarField& u, const MFGProblem& prob, const BallSampler& sampler,
                         double alpha);

struct DerivativeEquationFields {
    ScalarField v;   // du/dx_k by central differences
    ScalarField f1;  // g'(-u)
    VectorField f2;  // A_{x_k} Du^T
    VectorField f3;  // A Du (= half of Du A + Du A^T for symmetric A)
    ScalarField f4;  // 1/2 Du A_{x_k} Du^T + V_{x_k}
    ScalarField residual;
    double residual_linf = 0.0;
    double residual_l2 = 0.0;
};

// Coefficient fields of the differentiated equation and the residual of
// -div(A Dv^T) - div(f2) + f1 v + f3 . Dv + f4 at v = du/dx_k. Derivatives of
// A and V are taken by central differences of the sampled fields.
DerivativeEquationFields derivative_equation_fields(const ScalarField& u, const MFGProblem& prob,
                                                    double hbar, int axis);

struct ConvergenceRow {
    int n = 0;
    double error_linf = 0.0;
    double observed_order = 0.0;  // NaN for the first row and for exact solves
    bool exact = false;           // error at round-off level
};

std::vector<ConvergenceRow> convergence_study(const std::string& problem_name, int dim,
                                              const std::vector<int>& sizes, const SolveConfig& config);

struct RegularityReport {
    double morrey_Du = 0.0;
    double morrey_lambda = 0.0;
    double campanato = 0.0;
    double holder_alpha = 0.0;
    double holder_seminorm = 0.0;
    double caccioppoli_ratio = 0.0;
    double k0_margin = 0.0;
};

RegularityReport make_regularity_report(const ScalarField& u, const MFGProblem& prob, double hbar,
                                        unsigned seed = 12345);

}  // namespace mfg
