#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

// Coupling g with coercivity constant C_g: g(s) sign(s) >= C_g|s| - 1/C_g and
// g strictly increasing. g_prime may be left empty; a symmetric difference
// quotient with step 1e-7 is used instead (g is only locally Lipschitz).
struct CouplingSpec {
    std::function<double(double)> g;
    std::function<double(double)> g_prime;
    double c_g = 1.0;

    double eval_g(double s) const { return g(s); }
    double eval_g_prime(double s) const {
        if (g_prime) return g_prime(s);
        const double step = 1e-7;
        return (g(s + step) - g(s - step)) / (2.0 * step);
    }

    static CouplingSpec identity();
};

struct CouplingViolation {
    double sample;
    double lhs;
    double rhs;
    std::string kind;  // "coercivity" or "monotonicity"
};

struct CouplingReport {
    std::vector<CouplingViolation> violations;
    bool pass() const { return violations.empty(); }
};

CouplingReport validate_coupling(const CouplingSpec& c, std::span<const double> samples);

// (theta0, theta1) = extreme eigenvalues of A over the grid; throws if the
// smallest is not positive.
std::pair<double, double> validate_ellipticity(const MatrixField& a);

// Max difference quotient over periodic neighbor pairs; an under-estimate of
// the true Lipschitz constant, reported as a diagnostic.
double lipschitz_estimate(const ScalarField& f);
double lipschitz_estimate(const MatrixField& a);

struct MFGProblem {
    TorusGrid grid;
    MatrixField a;
    ScalarField v;
    CouplingSpec coupling;
    double theta0 = 0.0;
    double theta1 = 0.0;
    double lip_a = 0.0;
    double lip_v = 0.0;

    // Symmetrizes A, checks ellipticity and coupling (coercivity/monotonicity
    // on a sample span covering the relevant L-infinity range); throws on any
    // violation.
    static MFGProblem validated(MatrixField a, ScalarField v, CouplingSpec coupling);
};

struct ManufacturedSolution {
    std::function<double(std::array<double, 2>)> u_star;
    double hbar_star = 0.0;

    ScalarField sample(const TorusGrid& g) const;
};

struct BuiltinProblem {
    MFGProblem problem;
    std::optional<ManufacturedSolution> exact;
};

// identity: g(s) = s, C_g = 1 (the default; makes the trivial problem exact).
// atan: g(s) = s + atan(s), C_g = 1 (strictly monotone, nonconstant g').
// tanh_bounded: g(s) = tanh(s), C_g = 0.1 (passes sampled validation but is
//   not coercive at infinity; the bracket search is expected to fail).
// negative: g(s) = -s (monotonicity violation; rejected at validation).
CouplingSpec make_coupling(const std::string& name);

// Names: trivial | manufactured_1d | manufactured_2d | anisotropic_2d.
// dim is honored by "trivial"; the others fix their own dimension and reject a
// mismatch. A non-identity coupling drops the known exact solution.
BuiltinProblem builtin_problem(const std::string& name, int dim, int n,
                               const std::string& coupling = "identity");

}  // namespace mfg
