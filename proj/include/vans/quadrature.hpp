#ifndef VANS_QUADRATURE_HPP
#define VANS_QUADRATURE_HPP

#include <vans/types.hpp>

#include <vector>

namespace vans
{
  // Tensor-product Gauss-Legendre rule on the reference cell [0,1]^dim.
  // n points per axis integrate polynomials of degree 2n-1 exactly on each
  // axis. Weights sum to 1 (the reference measure).
  struct QuadratureRule
  {
    int dim = 0;
    std::vector<Vec3> points;     // reference coordinates, unused axes are 0
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
  };

  // 1D Gauss-Legendre nodes/weights on [0,1].
  void gauss_points_1d(int n, std::vector<double> &points, std::vector<double> &weights);

  QuadratureRule gauss_rule(int dim, int n_points_per_axis);
} // namespace vans

#endif
