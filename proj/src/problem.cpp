#include "mfg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mfg {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::pair<double, double> point_eigenvalues(const MatrixField& a, std::int64_t p) {
    if (a.grid.dim == 1) {
        const double v = a.at(p, 0, 0);
        return {v, v};
    }
    const double a00 = a.at(p, 0, 0);
    const double a11 = a.at(p, 1, 1);
    const double a01 = 0.5 * (a.at(p, 0, 1) + a.at(p, 1, 0));
    const double mean = 0.5 * (a00 + a11);
    const double rad = std::sqrt(0.25 * (a00 - a11) * (a00 - a11) + a01 * a01);
    return {mean - rad, mean + rad};
}

// Quadrature constant so that exp(-u*) integrates to one on the torus.
double log_mass_offset_1d(double amplitude) {
    const int n = 8192;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(-amplitude * std::cos(two_pi * (i + 0.0) / n));
    return std::log(s / n);
}

double log_mass_offset_2d(double amplitude) {
    const int n = 512;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cx = std::cos(two_pi * i / n);
        for (int j = 0; j < n; ++j) s += std::exp(-amplitude * cx * std::cos(two_pi * j / n));
    }
    return std::log(s / (double(n) * n));
}

}  // namespace

CouplingSpec CouplingSpec::identity() {
    CouplingSpec c;
    c.g = [](double s) { return s; };
    c.g_prime = [](double) { return 1.0; };
    c.c_g = 1.0;
    return c;
}

CouplingReport validate_coupling(const CouplingSpec& c, std::span<const double> samples) {
    CouplingReport report;
    const double slack = 1e-12;
    for (double s : samples) {
        const double sign = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
        const double lhs = c.g(s) * sign;
        const double rhs = c.c_g * std::fabs(s) - 1.0 / c.c_g;
        if (lhs < rhs - slack) report.violations.push_back({s, lhs, rhs, "coercivity"});
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        if (sorted[k + 1] <= sorted[k]) continue;
        const double g0 = c.g(sorted[k]);
        const double g1 = c.g(sorted[k + 1]);
        // Ties are tolerated: a strictly monotone g saturating below floating
        // point resolution is indistinguishable from a flat one on samples.
        if (g1 < g0) report.violations.push_back({sorted[k], g0, g1, "monotonicity"});
    }
    return report;
}

std::pair<double, double> validate_ellipticity(const MatrixField& a) {
    if (!a.all_finite()) throw std::invalid_argument("diffusion matrix has non-finite entries");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::int64_t p = 0; p < a.grid.num_points(); ++p) {
        auto [emin, emax] = point_eigenvalues(a, p);
        lo = std::min(lo, emin);
        hi = std::max(hi, emax);
    }
    if (!(lo > 0.0)) throw std::invalid_argument("ellipticity violated: smallest eigenvalue is not positive");
    return {lo, hi};
}

double lipschitz_estimate(const ScalarField& f) {
    const TorusGrid& g = f.grid;
    double best = 0.0;
    for (std::int64_t p = 0; p < g.num_points(); ++p)
        for (int k = 0; k < g.dim; ++k)
            best = std::max(best, std::fabs(f[g.shift(p, k, +1)] - f[p]) / g.h);
    return best;
}

double lipschitz_estimate(const MatrixField& a) {
    const TorusGrid& g = a.grid;
    double best = 0.0;
    for (std::int64_t p = 0; p < g.num_points(); ++p)
        for (int k = 0; k < g.dim; ++k) {
            const std::int64_t q = g.shift(p, k, +1);
            for (int r = 0; r < g.dim; ++r)
                for (int c = 0; c < g.dim; ++c)
                    best = std::max(best, std::fabs(a.at(q, r, c) - a.at(p, r, c)) / g.h);
        }
    return best;
}

MFGProblem MFGProblem::validated(MatrixField a, ScalarField v, CouplingSpec coupling) {
    if (!(a.grid == v.grid)) throw std::invalid_argument("A and V live on different grids");
    if (!v.all_finite()) throw std::invalid_argument("potential has non-finite values");
    if (!coupling.g) throw std::invalid_argument("coupling g is not set");
    if (!(coupling.c_g > 0.0)) throw std::invalid_argument("C_g must be positive");

    // Symmetrize on ingestion; idempotent for already-symmetric input.
    if (a.grid.dim == 2) {
        for (std::int64_t p = 0; p < a.grid.num_points(); ++p) {
            const double off = 0.5 * (a.at(p, 0, 1) + a.at(p, 1, 0));
            a.at(p, 0, 1) = off;
            a.at(p, 1, 0) = off;
        }
    }

    MFGProblem prob;
    prob.grid = a.grid;
    std::tie(prob.theta0, prob.theta1) = validate_ellipticity(a);
    prob.lip_a = lipschitz_estimate(a);
    prob.lip_v = lipschitz_estimate(v);
    prob.a = std::move(a);
    prob.v = std::move(v);
    prob.coupling = std::move(coupling);

    const double k0 = (linf_norm(prob.v) + 1.0 / prob.coupling.c_g) / prob.coupling.c_g + 1.0;
    const double span = k0 + 1.0;
    std::vector<double> samples;
    const int count = 41;
    for (int i = 0; i < count; ++i) samples.push_back(-span + 2.0 * span * i / (count - 1));
    CouplingReport rep = validate_coupling(prob.coupling, samples);
    if (!rep.pass()) {
        const auto& v0 = rep.violations.front();
        throw std::invalid_argument("coupling violates " + v0.kind + " at sample " + std::to_string(v0.sample));
    }
    return prob;
}

ScalarField ManufacturedSolution::sample(const TorusGrid& g) const {
    return sample_scalar(g, u_star);
}

CouplingSpec make_coupling(const std::string& name) {
    if (name == "identity") return CouplingSpec::identity();
    if (name == "atan") {
        CouplingSpec c;
        c.g = [](double s) { return s + std::atan(s); };
        c.g_prime = [](double s) { return 1.0 + 1.0 / (1.0 + s * s); };
        c.c_g = 1.0;
        return c;
    }
    if (name == "tanh_bounded") {
        CouplingSpec c;
        c.g = [](double s) { return std::tanh(s); };
        c.g_prime = [](double s) {
            const double t = std::tanh(s);
            return 1.0 - t * t;
        };
        c.c_g = 0.1;
        return c;
    }
    if (name == "negative") {
        CouplingSpec c;
        c.g = [](double s) { return -s; };
        c.g_prime = [](double) { return -1.0; };
        c.c_g = 1.0;
        return c;
    }
    throw std::invalid_argument("unknown coupling: " + name);
}

BuiltinProblem builtin_problem(const std::string& name, int dim, int n, const std::string& coupling) {
    const CouplingSpec spec = make_coupling(coupling);
    const bool exact_known = coupling == "identity";

    if (name == "trivial") {
        TorusGrid g = make_grid(dim, n);
        MFGProblem prob = MFGProblem::validated(identity_matrix_field(g), ScalarField(g, 0.0), spec);
        if (!exact_known) return {std::move(prob), std::nullopt};
        ManufacturedSolution exact;
        exact.u_star = [](std::array<double, 2>) { return 0.0; };
        exact.hbar_star = 0.0;
        return {std::move(prob), exact};
    }

    if (name == "manufactured_1d") {
        if (dim != 1) throw std::invalid_argument("manufactured_1d requires dim=1");
        TorusGrid g = make_grid(1, n);
        const double amp = 0.1;
        const double c0 = log_mass_offset_1d(amp);

        auto diffusion = [](double x) { return 1.0 + 0.5 * std::cos(two_pi * x); };
        auto diffusion_x = [](double x) { return -0.5 * two_pi * std::sin(two_pi * x); };
        auto ustar = [=](double x) { return amp * std::cos(two_pi * x) + c0; };
        auto ustar_x = [=](double x) { return -amp * two_pi * std::sin(two_pi * x); };
        auto ustar_xx = [=](double x) { return -amp * two_pi * two_pi * std::cos(two_pi * x); };

        MatrixField a(g);
        ScalarField v(g);
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const double x = g.point(p)[0];
            a.at(p, 0, 0) = diffusion(x);
            const double up = ustar_x(x);
            const double div_term = diffusion_x(x) * up + diffusion(x) * ustar_xx(x);
            v[p] = div_term - 0.5 * diffusion(x) * up * up - ustar(x);
        }
        MFGProblem prob = MFGProblem::validated(std::move(a), std::move(v), spec);
        if (!exact_known) return {std::move(prob), std::nullopt};
        ManufacturedSolution exact;
        exact.u_star = [=](std::array<double, 2> x) { return ustar(x[0]); };
        exact.hbar_star = 0.0;
        return {std::move(prob), exact};
    }

    if (name == "manufactured_2d") {
        if (dim != 2) throw std::invalid_argument("manufactured_2d requires dim=2");
        TorusGrid g = make_grid(2, n);
        const double amp = 0.1;
        const double beta = 0.25;
        const double c0 = log_mass_offset_2d(amp);

        MatrixField a(g);
        ScalarField v(g);
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const auto pt = g.point(p);
            const double cx = std::cos(two_pi * pt[0]), sx = std::sin(two_pi * pt[0]);
            const double cy = std::cos(two_pi * pt[1]), sy = std::sin(two_pi * pt[1]);

            const double alpha = 1.0 + beta * cx * cy;
            const double alpha_x = -beta * two_pi * sx * cy;
            const double alpha_y = -beta * two_pi * cx * sy;
            a.at(p, 0, 0) = alpha;
            a.at(p, 1, 1) = alpha;

            const double ustar = amp * cx * cy + c0;
            const double ux = -amp * two_pi * sx * cy;
            const double uy = -amp * two_pi * cx * sy;
            const double lap = -2.0 * amp * two_pi * two_pi * cx * cy;

            const double div_term = alpha_x * ux + alpha_y * uy + alpha * lap;
            v[p] = div_term - 0.5 * alpha * (ux * ux + uy * uy) - ustar;
        }
        MFGProblem prob = MFGProblem::validated(std::move(a), std::move(v), spec);
        if (!exact_known) return {std::move(prob), std::nullopt};
        ManufacturedSolution exact;
        exact.u_star = [=](std::array<double, 2> x) {
            return amp * std::cos(two_pi * x[0]) * std::cos(two_pi * x[1]) + c0;
        };
        exact.hbar_star = 0.0;
        return {std::move(prob), exact};
    }

    if (name == "anisotropic_2d") {
        if (dim != 2) throw std::invalid_argument("anisotropic_2d requires dim=2");
        TorusGrid g = make_grid(2, n);
        MatrixField a(g);
        ScalarField v(g);
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const auto pt = g.point(p);
            const double cx = std::cos(two_pi * pt[0]), sx = std::sin(two_pi * pt[0]);
            const double sy = std::sin(two_pi * pt[1]);
            a.at(p, 0, 0) = 1.0 + 0.4 * cx * cx;
            a.at(p, 1, 1) = 1.0 + 0.4 * sx * sx;
            a.at(p, 0, 1) = 0.4 * 0.2 * sy;
            a.at(p, 1, 0) = 0.4 * 0.2 * sy;
            v[p] = 0.3 * cx * std::cos(two_pi * pt[1]);
        }
        MFGProblem prob = MFGProblem::validated(std::move(a), std::move(v), spec);
        return {std::move(prob), std::nullopt};
    }

    throw std::invalid_argument("unknown builtin problem: " + name);
}

}  // namespace mfg
