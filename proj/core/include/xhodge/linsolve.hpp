#pragma once

// Matrix-free preconditioned conjugate gradients with explicit nullspace deflation.
// Unknowns are flat vectors; entries whose diagonal is zero are treated as fixed at zero
// (the preconditioner maps them to zero and operators are expected to do the same).

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "xhodge/errors.hpp"

namespace xhodge {

using Vector = std::vector<double>;

struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(const Vector& x, Vector& y)> apply;
  bool symmetric = true;
  /// Optional; an empty function disables Jacobi preconditioning.
  std::function<Vector()> diagonal;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_iters = 20000;
  /// Orthonormalized on ingestion.
  std::vector<Vector> deflation;
  bool jacobi = true;
  bool check_symmetry = false;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;  ///< true residual ||P(b - A x)|| / ||P b||
  double rhs_norm = 0.0;           ///< ||P b||
  std::vector<double> deflated_components;  ///< <b, q_i> for the orthonormal deflation basis
  bool converged = false;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, SolveStats stats) : Error(what), stats_(std::move(stats)) {}
  const SolveStats& stats() const { return stats_; }

 private:
  SolveStats stats_;
};

struct SolveResult {
  Vector x;
  SolveStats stats;
};

/// Solves P A P x = P b on the complement of the deflation basis. Throws SolverError when
/// max_iters is exceeded, ContractError when the symmetry probe fails.
SolveResult cg_solve(const LinearOperator& A, const Vector& b, const SolveOptions& opts = {},
                     const std::optional<Vector>& x0 = std::nullopt);

/// v minus its components along an orthonormal basis (two passes of modified Gram-Schmidt).
Vector project_out(const std::vector<Vector>& basis, Vector v);

/// Orthonormal basis of span(vectors); vectors whose remainder falls below drop_tol times
/// their original norm are discarded.
std::vector<Vector> orthonormalize(const std::vector<Vector>& vectors, double drop_tol = 1e-10);

/// Max |<Ax, y> - <x, Ay>| / (||Ax|| ||y|| + ||x|| ||Ay||) over seeded random probes.
double symmetry_defect(const LinearOperator& A, int probes = 3, unsigned long long seed = 7);

}  // namespace xhodge
