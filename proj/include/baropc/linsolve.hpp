/// @file linsolve.hpp
/// @brief Krylov solvers: preconditioned CG, CG on the zero-mean subspace for
/// Neumann-type operators, and BiCGStab for the nonsymmetric systems.
#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "baropc/sparse.hpp"

namespace baropc {

enum class Preconditioner { None, Diagonal };

struct SolverConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    std::size_t max_iter = 0; ///< 0 means 10 * unknown count
    Preconditioner preconditioner = Preconditioner::Diagonal;

    void validate() const;
    std::size_t iteration_cap(std::size_t n) const { return max_iter == 0 ? 10 * std::max<std::size_t>(n, 1) : max_iter; }
};

struct SolveReport {
    std::size_t iterations = 0;
    double residual = 0.0; ///< final true residual ||b - A x||_2
    double rhs_norm = 0.0;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    /// Residual norms, one per iteration.
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

/// Symmetric positive definite systems. `x0` is an optional initial guess.
SolveResult cg_solve(const SparseMatrix& a, std::span<const double> b, const SolverConfig& config,
                     std::span<const double> x0 = {});

/// Symmetric semi-definite systems whose kernel is the constants. `b` must be
/// orthogonal to the constants; the returned x satisfies sum_K w_K x_K = 0.
SolveResult neumann_solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> weights,
                          const SolverConfig& config);

/// General nonsingular systems.
SolveResult bicgstab_solve(const SparseMatrix& a, std::span<const double> b, const SolverConfig& config,
                           std::span<const double> x0 = {});

} // namespace baropc
