#include "mfg/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace mfg {

double TorusGrid::distance(std::int64_t p, std::int64_t q) const {
    auto a = point(p);
    auto b = point(q);
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        double d = std::fabs(a[k] - b[k]);
        d = std::min(d, 1.0 - d);
        s += d * d;
    }
    return std::sqrt(s);
}

TorusGrid make_grid(int dim, int n) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("unsupported dimension (need 1 or 2)");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("n must be even and >= 8");
    TorusGrid g;
    g.dim = dim;
    g.n = n;
    g.h = 1.0 / n;
    return g;
}

bool ScalarField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool VectorField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool MatrixField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

ScalarField sample_scalar(const TorusGrid& g, const std::function<double(std::array<double, 2>)>& f) {
    ScalarField out(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) out[p] = f(g.point(p));
    return out;
}

MatrixField identity_matrix_field(const TorusGrid& g) {
    MatrixField a(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p)
        for (int k = 0; k < g.dim; ++k) a.at(p, k, k) = 1.0;
    return a;
}

VectorField gradient(const ScalarField& u) {
    const TorusGrid& g = u.grid;
    VectorField out(g);
    const double inv2h = 1.0 / (2.0 * g.h);
    for (std::int64_t p = 0; p < g.num_points(); ++p)
        for (int k = 0; k < g.dim; ++k)
            out.comp(p, k) = (u[g.shift(p, k, +1)] - u[g.shift(p, k, -1)]) * inv2h;
    return out;
}

namespace {

// Divergence-form application: out = sum_k d/dx_k of fluxes, with per-edge
// interface coefficients supplied by the callables. coef0/coef1 act on axis
// edges (carrying a00 / a11), coefm on the same edges for the a01 cross part.
// All terms are differences of u, so constants map to exactly zero.
template <class C0, class C1, class CM>
ScalarField apply_divergence_form(const ScalarField& u, C0 coef0, C1 coef1, CM coefm) {
    const TorusGrid& g = u.grid;
    ScalarField out(g);
    const double invh2 = 1.0 / (g.h * g.h);

    if (g.dim == 1) {
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const std::int64_t pr = g.shift(p, 0, +1);
            const std::int64_t pl = g.shift(p, 0, -1);
            const double ar = coef0(p, pr);
            const double al = coef0(pl, p);
            out[p] = invh2 * (ar * (u[pr] - u[p]) - al * (u[p] - u[pl]));
        }
        return out;
    }

    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::int64_t p = g.index(i, j);
            const std::int64_t pe = g.index(i + 1, j);
            const std::int64_t pw = g.index(i - 1, j);
            const std::int64_t pn = g.index(i, j + 1);
            const std::int64_t ps = g.index(i, j - 1);
            const std::int64_t pne = g.index(i + 1, j + 1);
            const std::int64_t pse = g.index(i + 1, j - 1);
            const std::int64_t pnw = g.index(i - 1, j + 1);
            const std::int64_t psw = g.index(i - 1, j - 1);

            double s = coef0(p, pe) * (u[pe] - u[p]) - coef0(pw, p) * (u[p] - u[pw]);
            s += coef1(p, pn) * (u[pn] - u[p]) - coef1(ps, p) * (u[p] - u[ps]);

            // Cross part: half from x-interface fluxes of the averaged
            // y-derivative, half from its transpose, and the mirrored pair for
            // y-interfaces. The symmetrization keeps the induced operator
            // exactly self-adjoint for symmetric A within the 9-point stencil.
            double m = 0.0;
            m += 0.125 * coefm(p, pe) * (u[pn] - u[ps] + u[pne] - u[pse]);
            m -= 0.125 * coefm(pw, p) * (u[pnw] - u[psw] + u[pn] - u[ps]);
            m -= 0.125 * coefm(ps, pse) * (u[pse] - u[ps]);
            m += 0.125 * coefm(pn, pne) * (u[pne] - u[pn]);
            m -= 0.125 * coefm(psw, ps) * (u[ps] - u[psw]);
            m += 0.125 * coefm(pnw, pn) * (u[pn] - u[pnw]);
            m += 0.125 * coefm(p, pn) * (u[pe] - u[pw] + u[pne] - u[pnw]);
            m -= 0.125 * coefm(ps, p) * (u[pse] - u[psw] + u[pe] - u[pw]);
            m -= 0.125 * coefm(pw, pnw) * (u[pnw] - u[pw]);
            m += 0.125 * coefm(pe, pne) * (u[pne] - u[pe]);
            m -= 0.125 * coefm(psw, pw) * (u[pw] - u[psw]);
            m += 0.125 * coefm(pse, pe) * (u[pe] - u[pse]);

            out[p] = invh2 * (s + m);
        }
    }
    return out;
}

template <class C0, class C1, class CM>
std::vector<MatrixEntry> divergence_form_entries(const TorusGrid& g, C0 coef0, C1 coef1, CM coefm) {
    std::vector<MatrixEntry> out;
    const double invh2 = 1.0 / (g.h * g.h);
    out.reserve(static_cast<std::size_t>(g.num_points()) * (g.dim == 1 ? 3 : 12));

    auto emit = [&](std::int64_t r, std::int64_t c, double w) { out.push_back({r, c, w}); };

    if (g.dim == 1) {
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const std::int64_t pr = g.shift(p, 0, +1);
            const std::int64_t pl = g.shift(p, 0, -1);
            const double ar = coef0(p, pr) * invh2;
            const double al = coef0(pl, p) * invh2;
            emit(p, pr, ar);
            emit(p, pl, al);
            emit(p, p, -(ar + al));
        }
        return out;
    }

    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::int64_t p = g.index(i, j);
            const std::int64_t pe = g.index(i + 1, j);
            const std::int64_t pw = g.index(i - 1, j);
            const std::int64_t pn = g.index(i, j + 1);
            const std::int64_t ps = g.index(i, j - 1);
            const std::int64_t pne = g.index(i + 1, j + 1);
            const std::int64_t pse = g.index(i + 1, j - 1);
            const std::int64_t pnw = g.index(i - 1, j + 1);
            const std::int64_t psw = g.index(i - 1, j - 1);

            const double a0r = coef0(p, pe) * invh2;
            const double a0l = coef0(pw, p) * invh2;
            const double a1u = coef1(p, pn) * invh2;
            const double a1d = coef1(ps, p) * invh2;
            emit(p, pe, a0r);
            emit(p, pw, a0l);
            emit(p, pn, a1u);
            emit(p, ps, a1d);
            emit(p, p, -(a0r + a0l + a1u + a1d));

            const double cr = 0.125 * coefm(p, pe) * invh2;
            const double cl = 0.125 * coefm(pw, p) * invh2;
            emit(p, pn, cr - cl);
            emit(p, ps, cl - cr);
            emit(p, pne, cr);
            emit(p, pse, -cr);
            emit(p, pnw, -cl);
            emit(p, psw, cl);

            const double c1 = 0.125 * coefm(ps, pse) * invh2;
            const double c2 = 0.125 * coefm(pn, pne) * invh2;
            const double c3 = 0.125 * coefm(psw, ps) * invh2;
            const double c4 = 0.125 * coefm(pnw, pn) * invh2;
            emit(p, pse, -c1);
            emit(p, ps, c1 - c3);
            emit(p, pne, c2);
            emit(p, pn, c4 - c2);
            emit(p, psw, c3);
            emit(p, pnw, -c4);

            const double cu = 0.125 * coefm(p, pn) * invh2;
            const double cd = 0.125 * coefm(ps, p) * invh2;
            emit(p, pe, cu - cd);
            emit(p, pw, cd - cu);
            emit(p, pne, cu);
            emit(p, pnw, -cu);
            emit(p, pse, -cd);
            emit(p, psw, cd);

            const double f1 = 0.125 * coefm(pw, pnw) * invh2;
            const double f2 = 0.125 * coefm(pe, pne) * invh2;
            const double f3 = 0.125 * coefm(psw, pw) * invh2;
            const double f4 = 0.125 * coefm(pse, pe) * invh2;
            emit(p, pnw, -f1);
            emit(p, pw, f1 - f3);
            emit(p, pne, f2);
            emit(p, pe, f4 - f2);
            emit(p, psw, f3);
            emit(p, pse, -f4);
        }
    }
    return out;
}

}  // namespace

ScalarField div_a_grad(const ScalarField& u, const MatrixField& a) {
    if (!(u.grid == a.grid)) throw std::invalid_argument("div_a_grad: fields on different grids");
    auto c0 = [&a](std::int64_t p, std::int64_t q) { return 0.5 * (a.at(p, 0, 0) + a.at(q, 0, 0)); };
    auto c1 = [&a](std::int64_t p, std::int64_t q) { return 0.5 * (a.at(p, 1, 1) + a.at(q, 1, 1)); };
    auto cm = [&a](std::int64_t p, std::int64_t q) { return 0.5 * (a.at(p, 0, 1) + a.at(q, 0, 1)); };
    return apply_divergence_form(u, c0, c1, cm);
}

std::vector<MatrixEntry> div_a_grad_entries(const MatrixField& a) {
    auto c0 = [&a](std::int64_t p, std::int64_t q) { return 0.5 * (a.at(p, 0, 0) + a.at(q, 0, 0)); };
    auto c1 = [&a](std::int64_t p, std::int64_t q) { return 0.5 * (a.at(p, 1, 1) + a.at(q, 1, 1)); };
    auto cm = [&a](std::int64_t p, std::int64_t q) { return 0.5 * (a.at(p, 0, 1) + a.at(q, 0, 1)); };
    return divergence_form_entries(a.grid, c0, c1, cm);
}

ScalarField fokker_planck_divergence(const ScalarField& u, const ScalarField& m, const MatrixField& a) {
    if (!(u.grid == a.grid) || !(m.grid == a.grid))
        throw std::invalid_argument("fokker_planck_divergence: fields on different grids");
    for (double v : m.values)
        if (!(v > 0.0)) throw std::invalid_argument("fokker_planck_divergence: density must be positive");

    ScalarField diffusion = div_a_grad(m, a);

    auto c0 = [&](std::int64_t p, std::int64_t q) {
        return 0.5 * (a.at(p, 0, 0) + a.at(q, 0, 0)) * (0.5 * (m[p] + m[q]));
    };
    auto c1 = [&](std::int64_t p, std::int64_t q) {
        return 0.5 * (a.at(p, 1, 1) + a.at(q, 1, 1)) * (0.5 * (m[p] + m[q]));
    };
    auto cm = [&](std::int64_t p, std::int64_t q) {
        return 0.5 * (a.at(p, 0, 1) + a.at(q, 0, 1)) * (0.5 * (m[p] + m[q]));
    };
    ScalarField drift = apply_divergence_form(u, c0, c1, cm);

    ScalarField out(u.grid);
    for (std::int64_t p = 0; p < u.grid.num_points(); ++p) out[p] = diffusion[p] + drift[p];
    return out;
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    double hd = f.grid.h;
    if (f.grid.dim == 2) hd *= f.grid.h;
    return s * hd;
}

double linf_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::fabs(v));
    return s;
}

double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    double hd = f.grid.h;
    if (f.grid.dim == 2) hd *= f.grid.h;
    return std::sqrt(s * hd);
}

}  // namespace mfg
