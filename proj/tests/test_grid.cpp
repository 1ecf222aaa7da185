#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mfg/grid.hpp"

using namespace mfg;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

MatrixField random_spd_field(const TorusGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    MatrixField a(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) {
        if (g.dim == 1) {
            a.at(p, 0, 0) = 1.0 + unif(rng);
        } else {
            const double off = unif(rng);
            a.at(p, 0, 0) = 1.0 + unif(rng);
            a.at(p, 1, 1) = 1.0 + unif(rng);
            a.at(p, 0, 1) = off;
            a.at(p, 1, 0) = off;
        }
    }
    return a;
}

ScalarField random_field(const TorusGrid& g, unsigned seed, double amp = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-amp, amp);
    ScalarField f(g);
    for (std::int64_t p = 0; p < g.num_points(); ++p) f[p] = unif(rng);
    return f;
}

ScalarField shifted(const ScalarField& f, int axis, int delta) {
    ScalarField out(f.grid);
    for (std::int64_t p = 0; p < f.grid.num_points(); ++p) out[f.grid.shift(p, axis, delta)] = f[p];
    return out;
}

Eigen::MatrixXd dense_from_entries(const std::vector<MatrixEntry>& entries, std::int64_t n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : entries) m(e.row, e.col) += e.value;
    return m;
}

}  // namespace

TEST_CASE("make_grid validates its arguments") {
    TorusGrid g = make_grid(1, 8);
    CHECK(g.num_points() == 8);
    CHECK(g.h == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.n * g.h == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(make_grid(2, 16).num_points() == 256);
    CHECK_THROWS_AS(make_grid(3, 16), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 7), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 4), std::invalid_argument);
}

TEST_CASE("index wrap: +1 neighbor of the last point is point zero") {
    TorusGrid g = make_grid(2, 8);
    CHECK(g.shift(g.index(7, 3), 0, +1) == g.index(0, 3));
    CHECK(g.shift(g.index(0, 0), 1, -1) == g.index(0, 7));
}

TEST_CASE("gradient is exactly zero on constants") {
    TorusGrid g = make_grid(2, 16);
    ScalarField u(g, 3.7);
    VectorField du = gradient(u);
    for (double v : du.values) CHECK(v == 0.0);
}

TEST_CASE("gradient of sin(2 pi x) converges at second order") {
    std::vector<double> errors;
    for (int n : {64, 128, 256, 512}) {
        TorusGrid g = make_grid(1, n);
        ScalarField u = sample_scalar(g, [](std::array<double, 2> x) { return std::sin(two_pi * x[0]); });
        VectorField du = gradient(u);
        double err = 0.0;
        for (std::int64_t p = 0; p < g.num_points(); ++p)
            err = std::max(err, std::fabs(du.comp(p, 0) - two_pi * std::cos(two_pi * g.point(p)[0])));
        errors.push_back(err);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        CHECK(order > 1.7);
        CHECK(order < 2.3);
    }
}

TEST_CASE("gradient stencil hand value on an indicator") {
    TorusGrid g = make_grid(1, 8);
    ScalarField u(g, 0.0);
    u[0] = 1.0;
    VectorField du = gradient(u);
    CHECK(du.comp(1, 0) == doctest::Approx(-4.0).epsilon(1e-15));  // (u2 - u0) / (2 * 0.125)
    CHECK(du.comp(7, 0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("div_a_grad annihilates constants exactly") {
    for (int dim : {1, 2}) {
        TorusGrid g = make_grid(dim, 16);
        MatrixField a = random_spd_field(g, 42);
        ScalarField u(g, -1.23);
        ScalarField out = div_a_grad(u, a);
        for (double v : out.values) CHECK(v == 0.0);
    }
}

TEST_CASE("div_a_grad matches the analytic Laplacian for A = I in 1d") {
    std::vector<double> errors;
    for (int n : {128, 256, 512, 1024}) {
        TorusGrid g = make_grid(1, n);
        MatrixField a = identity_matrix_field(g);
        ScalarField u = sample_scalar(g, [](std::array<double, 2> x) { return std::cos(two_pi * x[0]); });
        ScalarField lap = div_a_grad(u, a);
        double err = 0.0;
        for (std::int64_t p = 0; p < g.num_points(); ++p)
            err = std::max(err,
                           std::fabs(lap[p] + two_pi * two_pi * std::cos(two_pi * g.point(p)[0])));
        errors.push_back(err);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        CHECK(order > 1.7);
        CHECK(order < 2.3);
    }
}

TEST_CASE("div_a_grad is second order for a full variable-coefficient matrix in 2d") {
    // Analytic oracle: div(A Du) expanded with closed-form partials.
    auto a00 = [](double x, double y) { return 1.0 + 0.3 * std::cos(two_pi * x) * std::cos(two_pi * y); };
    auto a00_x = [](double x, double y) { return -0.3 * two_pi * std::sin(two_pi * x) * std::cos(two_pi * y); };
    auto a01 = [](double x, double y) { return 0.15 * std::sin(two_pi * x) * std::sin(two_pi * y); };
    auto a01_x = [](double x, double y) { return 0.15 * two_pi * std::cos(two_pi * x) * std::sin(two_pi * y); };
    auto a01_y = [](double x, double y) { return 0.15 * two_pi * std::sin(two_pi * x) * std::cos(two_pi * y); };
    auto a11 = [](double x, double y) { return 1.0 + 0.2 * std::sin(two_pi * x) * std::cos(two_pi * y); };
    auto a11_y = [](double x, double y) { return -0.2 * two_pi * std::sin(two_pi * x) * std::sin(two_pi * y); };

    auto u_fn = [](double x, double y) { return std::sin(two_pi * x) * std::cos(two_pi * y); };
    auto ux = [](double x, double y) { return two_pi * std::cos(two_pi * x) * std::cos(two_pi * y); };
    auto uy = [](double x, double y) { return -two_pi * std::sin(two_pi * x) * std::sin(two_pi * y); };
    auto uxx = [](double x, double y) { return -two_pi * two_pi * std::sin(two_pi * x) * std::cos(two_pi * y); };
    auto uyy = [](double x, double y) { return -two_pi * two_pi * std::sin(two_pi * x) * std::cos(two_pi * y); };
    auto uxy = [](double x, double y) { return -two_pi * two_pi * std::cos(two_pi * x) * std::sin(two_pi * y); };

    auto exact = [&](double x, double y) {
        return a00_x(x, y) * ux(x, y) + a00(x, y) * uxx(x, y) + a01_x(x, y) * uy(x, y) +
               a01(x, y) * uxy(x, y) + a01_y(x, y) * ux(x, y) + a01(x, y) * uxy(x, y) +
               a11_y(x, y) * uy(x, y) + a11(x, y) * uyy(x, y);
    };

    std::vector<double> errors;
    for (int n : {32, 64, 128}) {
        TorusGrid g = make_grid(2, n);
        MatrixField a(g);
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const auto pt = g.point(p);
            a.at(p, 0, 0) = a00(pt[0], pt[1]);
            a.at(p, 1, 1) = a11(pt[0], pt[1]);
            a.at(p, 0, 1) = a01(pt[0], pt[1]);
            a.at(p, 1, 0) = a01(pt[0], pt[1]);
        }
        ScalarField u = sample_scalar(g, [&](std::array<double, 2> x) { return u_fn(x[0], x[1]); });
        ScalarField lap = div_a_grad(u, a);
        double err = 0.0;
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const auto pt = g.point(p);
            err = std::max(err, std::fabs(lap[p] - exact(pt[0], pt[1])));
        }
        errors.push_back(err);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        CHECK(order > 1.7);
        CHECK(order < 2.3);
    }
}

TEST_CASE("assembled operator is symmetric positive semidefinite with a constant kernel") {
    for (int dim : {1, 2}) {
        TorusGrid g = make_grid(dim, 16);
        MatrixField a = random_spd_field(g, 7);
        const std::int64_t n = g.num_points();
        Eigen::MatrixXd L = dense_from_entries(div_a_grad_entries(a), n);

        const double scale = L.cwiseAbs().maxCoeff();
        CHECK((L - L.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);

        // -L is the energy operator: eigenvalues nonnegative, one zero mode.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-0.5 * (L + L.transpose()));
        const auto& ev = es.eigenvalues();
        CHECK(ev(0) >= -1e-10 * scale);
        CHECK(ev(1) > 1e-8 * scale);

        Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        CHECK((L * ones).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    }
}

TEST_CASE("discrete integration by parts: the operator is self-adjoint") {
    for (int dim : {1, 2}) {
        TorusGrid g = make_grid(dim, 16);
        MatrixField a = random_spd_field(g, 11);
        ScalarField u = random_field(g, 1, 0.5);
        ScalarField v = random_field(g, 2, 0.5);

        ScalarField lu = div_a_grad(u, a);
        ScalarField lv = div_a_grad(v, a);
        double vlu = 0.0, ulv = 0.0;
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            vlu += v[p] * lu[p];
            ulv += u[p] * lv[p];
        }
        CHECK(std::fabs(vlu - ulv) <= 1e-12 * l2_norm(u) * l2_norm(v) / (g.h * g.h));
    }
}

TEST_CASE("shifting a field by one cell commutes with the operators") {
    TorusGrid g = make_grid(2, 16);
    MatrixField a = random_spd_field(g, 3);
    ScalarField u = random_field(g, 4);

    for (int axis : {0, 1}) {
        MatrixField ashift(g);
        for (std::int64_t p = 0; p < g.num_points(); ++p) {
            const std::int64_t q = g.shift(p, axis, 1);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) ashift.at(q, r, c) = a.at(p, r, c);
        }
        ScalarField us = shifted(u, axis, 1);

        ScalarField ref = shifted(div_a_grad(u, a), axis, 1);
        ScalarField got = div_a_grad(us, ashift);
        for (std::int64_t p = 0; p < g.num_points(); ++p)
            CHECK(std::fabs(got[p] - ref[p]) <= 1e-12 * (1.0 / (g.h * g.h)));

        VectorField gref = gradient(u);
        VectorField ggot = gradient(us);
        for (std::int64_t p = 0; p < g.num_points(); ++p)
            for (int k = 0; k < 2; ++k)
                CHECK(ggot.comp(g.shift(p, axis, 1), k) == gref.comp(p, k));
    }
}

TEST_CASE("integrate: unit volume, mean-zero modes, trig polynomial exactness") {
    TorusGrid g = make_grid(1, 32);
    CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

    ScalarField s = sample_scalar(g, [](std::array<double, 2> x) { return std::sin(two_pi * x[0]); });
    CHECK(std::fabs(integrate(s)) <= 1e-14);

    ScalarField f = sample_scalar(g, [](std::array<double, 2> x) { return 1.0 + 0.5 * std::cos(two_pi * x[0]); });
    CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("norms") {
    TorusGrid g = make_grid(1, 64);
    CHECK(linf_norm(ScalarField(g, 0.0)) == 0.0);
    CHECK(l2_norm(ScalarField(g, 0.0)) == 0.0);
    CHECK(linf_norm(ScalarField(g, -2.0)) == 2.0);

    ScalarField c = sample_scalar(g, [](std::array<double, 2> x) { return std::cos(two_pi * x[0]); });
    CHECK(l2_norm(c) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
}

TEST_CASE("fokker-planck divergence: exact identities") {
    TorusGrid g = make_grid(2, 16);
    MatrixField a = random_spd_field(g, 9);

    // Constant u with m = exp(-u): both fluxes vanish identically.
    ScalarField uc(g, 0.7);
    ScalarField mc(g, std::exp(-0.7));
    ScalarField r = fokker_planck_divergence(uc, mc, a);
    for (double v : r.values) CHECK(v == 0.0);

    // m = 1 turns the drift term into div(A Du^T) exactly.
    ScalarField u = random_field(g, 5);
    ScalarField ones(g, 1.0);
    ScalarField fp = fokker_planck_divergence(u, ones, a);
    ScalarField ref = div_a_grad(u, a);
    for (std::int64_t p = 0; p < g.num_points(); ++p) CHECK(fp[p] == ref[p]);

    ScalarField bad(g, 0.0);
    CHECK_THROWS_AS(fokker_planck_divergence(u, bad, a), std::invalid_argument);
}
