#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace mfg {

inline double quadratic_form(std::span<const double> a, std::span<const double> p) {
    const int d = static_cast<int>(p.size());
    double q = 0.0;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) q += p[r] * a[static_cast<std::size_t>(r) * d + c] * p[c];
    return q;
}

// Regularized Hamiltonian q / (2 + eps*|q|) with q = p A p^T. eps == 0 gives
// the exact quadratic Hamiltonian q/2. q >= 0 for elliptic A, so the absolute
// value is redundant but kept as a safeguard against slightly indefinite input.
inline double h_eps(std::span<const double> p, std::span<const double> a, double eps) {
    const double q = quadratic_form(a, p);
    return q / (2.0 + eps * std::abs(q));
}

// dH_eps/dp = 4 (A p) / (2 + eps*q)^2; reduces to A p at eps = 0.
inline void dh_eps_dp(std::span<const double> p, std::span<const double> a, double eps, std::span<double> out) {
    const int d = static_cast<int>(p.size());
    const double q = quadratic_form(a, p);
    const double denom = 2.0 + eps * std::abs(q);
    const double scale = 4.0 / (denom * denom);
    for (int r = 0; r < d; ++r) {
        double ap = 0.0;
        for (int c = 0; c < d; ++c) ap += a[static_cast<std::size_t>(r) * d + c] * p[c];
        out[r] = scale * ap;
    }
}

// Geometric continuation schedule eps0 * factor^k. Stages stop once the value
// would drop below max(eps_min, 1e-8) and a final stage at eps_min is appended;
// eps_min == 0 means the last solve uses the exact Hamiltonian.
struct EpsSchedule {
    double eps0 = 1.0;
    double factor = 0.25;
    double eps_min = 0.0;

    static constexpr double geometric_floor = 1e-8;

    void validate() const {
        if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
        if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("factor must lie in (0,1)");
        if (!(eps_min >= 0.0)) throw std::invalid_argument("eps_min must be nonnegative");
    }

    std::vector<double> stages() const {
        validate();
        std::vector<double> out;
        if (eps0 <= eps_min) {
            out.push_back(eps_min);
            return out;
        }
        const double cutoff = std::max(eps_min, geometric_floor);
        for (double e = eps0; e > cutoff; e *= factor) out.push_back(e);
        out.push_back(eps_min);
        return out;
    }
};

}  // namespace mfg
