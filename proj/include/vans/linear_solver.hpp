#ifndef VANS_LINEAR_SOLVER_HPP
#define VANS_LINEAR_SOLVER_HPP

#include <vans/types.hpp>

#include <Eigen/Sparse>

#include <string>

namespace vans
{
  using SparseMatrix = Eigen::SparseMatrix<double>;

  enum class LinearMethod
  {
    gmres,
    direct
  };

  struct LinearSettings
  {
    LinearMethod method = LinearMethod::gmres;
    int max_iterations = 5000;
    double min_residual = 1e-11;      // absolute floor on the residual
    double relative_residual = 1e-3;  // relative to the right-hand side
    int ilu_fill = 1;                 // mapped onto the ILUT fill factor
    bool allow_direct_fallback = true;
  };

  struct LinearReport
  {
    int iterations = 0;
    double residual = 0.0;
    bool used_fallback = false;
    std::string method;
  };

  // Solve A x = b. GMRES is preconditioned with an incomplete LU; if the
  // Krylov solve stagnates the system is refactored with a sparse direct
  // solver (reported, not silent). Throws SolverError when nothing works.
  Vector solve_linear(const SparseMatrix &A,
                      const Vector &b,
                      const LinearSettings &settings,
                      LinearReport *report = nullptr);

  // Direct Cholesky-type solve for symmetric positive definite systems
  // (projection matrices), verifying the relative residual afterwards.
  Vector solve_spd(const SparseMatrix &A, const Vector &b, double rel_tol = 1e-12);
} // namespace vans

#endif
