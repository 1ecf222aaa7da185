#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace mfg {

// Uniform periodic grid on [0,1)^dim with dim in {1,2}. Points sit at x = i*h,
// h = 1/n, and every index wraps: the +1 neighbor of i = n-1 is i = 0.
struct TorusGrid {
    int dim = 1;
    int n = 8;
    double h = 0.125;

    std::int64_t num_points() const { return dim == 1 ? n : std::int64_t(n) * n; }

    int wrap(int i) const {
        i %= n;
        return i < 0 ? i + n : i;
    }

    // Flat index in lexicographic (i0, i1) order; i1 varies fastest in d=2.
    std::int64_t index(int i0, int i1 = 0) const {
        return dim == 1 ? std::int64_t(wrap(i0)) : std::int64_t(wrap(i0)) * n + wrap(i1);
    }

    std::array<int, 2> coords(std::int64_t p) const {
        if (dim == 1) return {static_cast<int>(p), 0};
        return {static_cast<int>(p / n), static_cast<int>(p % n)};
    }

    std::int64_t shift(std::int64_t p, int axis, int delta) const {
        auto c = coords(p);
        c[axis] += delta;
        return index(c[0], c[1]);
    }

    std::array<double, 2> point(std::int64_t p) const {
        auto c = coords(p);
        return {c[0] * h, c[1] * h};
    }

    // Periodic (torus) distance between two grid points.
    double distance(std::int64_t p, std::int64_t q) const;

    bool operator==(const TorusGrid&) const = default;
};

// Validates dim in {1,2}, n even and >= 8.
TorusGrid make_grid(int dim, int n);

struct ScalarField {
    TorusGrid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.num_points()), fill) {}

    double& operator[](std::int64_t p) { return values[static_cast<std::size_t>(p)]; }
    double operator[](std::int64_t p) const { return values[static_cast<std::size_t>(p)]; }

    bool all_finite() const;
};

// One d-vector per grid point, layout values[p*dim + k].
struct VectorField {
    TorusGrid grid;
    std::vector<double> values;

    VectorField() = default;
    explicit VectorField(const TorusGrid& g)
        : grid(g), values(static_cast<std::size_t>(g.num_points()) * g.dim, 0.0) {}

    double& comp(std::int64_t p, int k) { return values[static_cast<std::size_t>(p) * grid.dim + k]; }
    double comp(std::int64_t p, int k) const { return values[static_cast<std::size_t>(p) * grid.dim + k]; }

    bool all_finite() const;
};

// One d x d matrix per grid point, layout values[(p*dim + r)*dim + c].
struct MatrixField {
    TorusGrid grid;
    std::vector<double> values;

    MatrixField() = default;
    explicit MatrixField(const TorusGrid& g)
        : grid(g), values(static_cast<std::size_t>(g.num_points()) * g.dim * g.dim, 0.0) {}

    double& at(std::int64_t p, int r, int c) {
        return values[(static_cast<std::size_t>(p) * grid.dim + r) * grid.dim + c];
    }
    double at(std::int64_t p, int r, int c) const {
        return values[(static_cast<std::size_t>(p) * grid.dim + r) * grid.dim + c];
    }

    bool all_finite() const;
};

ScalarField sample_scalar(const TorusGrid& g, const std::function<double(std::array<double, 2>)>& f);
MatrixField identity_matrix_field(const TorusGrid& g);

// Central-difference gradient, second order, periodic.
VectorField gradient(const ScalarField& u);

// div(A Du^T) in conservative flux form: arithmetic-mean A at cell interfaces,
// cross-derivatives averaged to the interface and symmetrized so the induced
// linear operator is exactly symmetric for symmetric A. Exact on constants.
ScalarField div_a_grad(const ScalarField& u, const MatrixField& a);

// Entries of the sparse matrix representing u -> div(A Du^T).
struct MatrixEntry {
    std::int64_t row;
    std::int64_t col;
    double value;
};
std::vector<MatrixEntry> div_a_grad_entries(const MatrixField& a);

// div(A Dm^T) + div(m A Du^T) with interface-averaged m; reduces exactly to
// div_a_grad(u, A) when m == 1 and vanishes exactly for constant u.
ScalarField fokker_planck_divergence(const ScalarField& u, const ScalarField& m, const MatrixField& a);

// Midpoint-rule integral over the unit torus (spectrally accurate for smooth
// periodic integrands).
double integrate(const ScalarField& f);

double linf_norm(const ScalarField& f);
double l2_norm(const ScalarField& f);

}  // namespace mfg
