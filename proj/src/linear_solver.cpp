#include <vans/linear_solver.hpp>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>

namespace vans
{
  namespace
  {
    Vector solve_direct(const SparseMatrix &A, const Vector &b)
    {
      Eigen::SparseLU<SparseMatrix> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success)
        throw SolverError("sparse LU factorization failed (singular or structurally deficient matrix)");
      Vector x = lu.solve(b);
      if (lu.info() != Eigen::Success)
        throw SolverError("sparse LU back-substitution failed");
      return x;
    }
  } // namespace

  Vector solve_linear(const SparseMatrix &A,
                      const Vector &b,
                      const LinearSettings &settings,
                      LinearReport *report)
  {
    const double bnorm = b.norm();

    if (settings.method == LinearMethod::direct || bnorm == 0.0)
      {
        Vector x = solve_direct(A, b);
        if (report)
          {
            report->iterations = 0;
            report->residual = (A * x - b).norm();
            report->used_fallback = false;
            report->method = "direct";
          }
        return x;
      }

    Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<double>> gmres;
    gmres.setMaxIterations(settings.max_iterations);
    // Eigen's stopping test is relative to ||b||; fold the absolute floor in.
    const double tol = std::max(settings.relative_residual, settings.min_residual / bnorm);
    gmres.setTolerance(tol);
    gmres.set_restart(std::min(200, settings.max_iterations));
    // The ILUT fill factor bounds kept entries per row as a multiple of the
    // original row; level-style fill maps onto a growing multiple.
    gmres.preconditioner().setFillfactor(10 * (settings.ilu_fill + 1));
    gmres.preconditioner().setDroptol(1e-10);

    gmres.compute(A);
    Vector x;
    bool ok = (gmres.info() == Eigen::Success);
    if (ok)
      {
        x = gmres.solve(b);
        ok = (gmres.info() == Eigen::Success) && x.allFinite();
      }

    if (!ok)
      {
        if (!settings.allow_direct_fallback)
          throw SolverError("GMRES did not converge within " +
                            std::to_string(settings.max_iterations) + " iterations");
        x = solve_direct(A, b);
        if (report)
          {
            report->iterations = static_cast<int>(gmres.iterations());
            report->residual = (A * x - b).norm();
            report->used_fallback = true;
            report->method = "direct-fallback";
          }
        return x;
      }

    if (report)
      {
        report->iterations = static_cast<int>(gmres.iterations());
        report->residual = gmres.error() * bnorm;
        report->used_fallback = false;
        report->method = "gmres";
      }
    return x;
  }

  Vector solve_spd(const SparseMatrix &A, const Vector &b, double rel_tol)
  {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("LDLT factorization failed: matrix is not SPD");
    Vector x = ldlt.solve(b);
    // One step of iterative refinement buys a couple of digits when the
    // factorization alone is not quite at the requested residual.
    const double denom = std::max(b.norm(), 1e-300);
    if ((A * x - b).norm() / denom > rel_tol)
      x += ldlt.solve(b - A * x);
    const double rel = (A * x - b).norm() / denom;
    if (rel > rel_tol)
      throw SolverError("SPD solve residual " + std::to_string(rel) + " exceeds tolerance");
    return x;
  }
} // namespace vans
