#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

// Sparse direct solve for the Newton systems. The sparsity pattern of the
// Jacobian is fixed per grid, so the symbolic analysis is done once and only
// the numeric factorization is repeated. Every solve is checked against
// ||M x - b||_inf <= 1e-12 ||b||_inf with one refinement pass in between.
class SparseDirectSolver {
  public:
    SparseDirectSolver();
    ~SparseDirectSolver();
    SparseDirectSolver(SparseDirectSolver&&) noexcept;
    SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

    void factorize(const std::vector<MatrixEntry>& entries, std::int64_t size);
    std::vector<double> solve(std::span<const double> rhs) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mfg
