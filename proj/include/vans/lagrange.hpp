#ifndef VANS_LAGRANGE_HPP
#define VANS_LAGRANGE_HPP

#include <vans/quadrature.hpp>
#include <vans/types.hpp>

#include <vector>

namespace vans
{
  // Equispaced Lagrange basis of degree k on [0,1]: nodes at i/k.
  // value/d1/d2 evaluate the i-th basis polynomial and its derivatives at an
  // arbitrary point (not restricted to [0,1]).
  struct Lagrange1d
  {
    explicit Lagrange1d(int degree);

    int degree;
    std::vector<double> nodes;

    double value(int i, double xi) const;
    double d1(int i, double xi) const;
    double d2(int i, double xi) const;
  };

  // Tensor-product scalar basis evaluated at a set of reference points,
  // pre-scaled to physical derivatives for a fixed (uniform) cell size.
  // Basis functions are ordered lexicographically: i + (k+1)*j + (k+1)^2*l.
  struct BasisTable
  {
    int dim = 0;
    int degree = 0;
    int n_basis = 0;
    int n_points = 0;

    // [point][basis]
    std::vector<std::vector<double>> value;
    std::vector<std::vector<Vec3>> grad;       // physical gradient
    std::vector<std::vector<double>> laplace;  // physical Laplacian
  };

  // Evaluate the full tensor basis at one reference point. Outputs have
  // (degree+1)^dim entries; gradients/laplacians are in reference coordinates
  // unless cell_size is given (then scaled to physical).
  void tensor_basis_at(const Lagrange1d &basis_1d,
                       int dim,
                       const Vec3 &ref_point,
                       const Vec3 &cell_size,
                       std::vector<double> &value,
                       std::vector<Vec3> &grad,
                       std::vector<double> &laplace);

  BasisTable build_basis_table(int dim, int degree, const QuadratureRule &rule, const Vec3 &cell_size);
} // namespace vans

#endif
