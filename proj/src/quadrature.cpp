#include <vans/quadrature.hpp>

#include <cmath>

namespace vans
{
  void gauss_points_1d(int n, std::vector<double> &points, std::vector<double> &weights)
  {
    if (n < 1 || n > 12)
      throw ConfigError("gauss_points_1d: unsupported point count " + std::to_string(n));

    points.assign(n, 0.0);
    weights.assign(n, 0.0);

    // Newton iteration on the Legendre polynomial P_n over [-1,1], then map
    // to [0,1]. The Chebyshev-like initial guess converges in a handful of
    // iterations for the small n used here.
    for (int i = 0; i < n; ++i)
      {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it)
          {
            // Evaluate P_n(z) and its derivative by the three-term recurrence.
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j)
              {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
              }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15)
              break;
          }
        points[i] = 0.5 * (1.0 - z); // map and flip so points ascend
        weights[i] = 1.0 / ((1.0 - z * z) * pp * pp);
      }

    // Sort ascending for reproducible ordering.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (points[j] < points[i])
          {
            std::swap(points[i], points[j]);
            std::swap(weights[i], weights[j]);
          }
  }

  QuadratureRule gauss_rule(int dim, int n)
  {
    if (dim < 1 || dim > 3)
      throw ConfigError("gauss_rule: dim must be 1, 2 or 3");

    std::vector<double> p1, w1;
    gauss_points_1d(n, p1, w1);

    QuadratureRule rule;
    rule.dim = dim;
    const int nz = (dim > 2) ? n : 1;
    const int ny = (dim > 1) ? n : 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < n; ++i)
          {
            Vec3 pt(p1[i], dim > 1 ? p1[j] : 0.0, dim > 2 ? p1[k] : 0.0);
            double w = w1[i];
            if (dim > 1)
              w *= w1[j];
            if (dim > 2)
              w *= w1[k];
            rule.points.push_back(pt);
            rule.weights.push_back(w);
          }
    return rule;
  }
} // namespace vans
