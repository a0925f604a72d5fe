#include <vans/lagrange.hpp>

namespace vans
{
  Lagrange1d::Lagrange1d(int degree_in)
    : degree(degree_in)
  {
    if (degree < 0 || degree > 4)
      throw ConfigError("Lagrange1d: degree must be in [0,4], got " + std::to_string(degree));
    nodes.resize(degree + 1);
    for (int i = 0; i <= degree; ++i)
      nodes[i] = (degree == 0) ? 0.5 : static_cast<double>(i) / degree;
  }

  double Lagrange1d::value(int i, double xi) const
  {
    double v = 1.0;
    for (int j = 0; j <= degree; ++j)
      if (j != i)
        v *= (xi - nodes[j]) / (nodes[i] - nodes[j]);
    return v;
  }

  double Lagrange1d::d1(int i, double xi) const
  {
    double sum = 0.0;
    for (int m = 0; m <= degree; ++m)
      {
        if (m == i)
          continue;
        double term = 1.0 / (nodes[i] - nodes[m]);
        for (int j = 0; j <= degree; ++j)
          if (j != i && j != m)
            term *= (xi - nodes[j]) / (nodes[i] - nodes[j]);
        sum += term;
      }
    return sum;
  }

  double Lagrange1d::d2(int i, double xi) const
  {
    double sum = 0.0;
    for (int m = 0; m <= degree; ++m)
      {
        if (m == i)
          continue;
        for (int l = 0; l <= degree; ++l)
          {
            if (l == i || l == m)
              continue;
            double term = 1.0 / ((nodes[i] - nodes[m]) * (nodes[i] - nodes[l]));
            for (int j = 0; j <= degree; ++j)
              if (j != i && j != m && j != l)
                term *= (xi - nodes[j]) / (nodes[i] - nodes[j]);
            sum += term;
          }
      }
    return sum;
  }

  void tensor_basis_at(const Lagrange1d &b,
                       int dim,
                       const Vec3 &ref,
                       const Vec3 &cell_size,
                       std::vector<double> &value,
                       std::vector<Vec3> &grad,
                       std::vector<double> &laplace)
  {
    const int npa = b.degree + 1;
    int n = npa;
    for (int d = 1; d < dim; ++d)
      n *= npa;
    value.assign(n, 0.0);
    grad.assign(n, Vec3::Zero());
    laplace.assign(n, 0.0);

    // Per-axis values and derivatives at the point.
    double v[3][5], d1v[3][5], d2v[3][5];
    for (int d = 0; d < dim; ++d)
      for (int i = 0; i < npa; ++i)
        {
          v[d][i] = b.value(i, ref[d]);
          d1v[d][i] = b.d1(i, ref[d]);
          d2v[d][i] = b.d2(i, ref[d]);
        }

    const int nz = (dim > 2) ? npa : 1;
    const int ny = (dim > 1) ? npa : 1;
    int idx = 0;
    for (int l = 0; l < nz; ++l)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < npa; ++i, ++idx)
          {
            const double vx = v[0][i];
            const double vy = (dim > 1) ? v[1][j] : 1.0;
            const double vz = (dim > 2) ? v[2][l] : 1.0;
            value[idx] = vx * vy * vz;

            Vec3 g = Vec3::Zero();
            g[0] = d1v[0][i] * vy * vz / cell_size[0];
            if (dim > 1)
              g[1] = vx * d1v[1][j] * vz / cell_size[1];
            if (dim > 2)
              g[2] = vx * vy * d1v[2][l] / cell_size[2];
            grad[idx] = g;

            double lap = d2v[0][i] * vy * vz / (cell_size[0] * cell_size[0]);
            if (dim > 1)
              lap += vx * d2v[1][j] * vz / (cell_size[1] * cell_size[1]);
            if (dim > 2)
              lap += vx * vy * d2v[2][l] / (cell_size[2] * cell_size[2]);
            laplace[idx] = lap;
          }
  }

  BasisTable build_basis_table(int dim, int degree, const QuadratureRule &rule, const Vec3 &cell_size)
  {
    Lagrange1d b(degree);
    BasisTable table;
    table.dim = dim;
    table.degree = degree;
    table.n_points = rule.size();
    table.value.resize(rule.size());
    table.grad.resize(rule.size());
    table.laplace.resize(rule.size());
    for (int q = 0; q < rule.size(); ++q)
      tensor_basis_at(b, dim, rule.points[q], cell_size, table.value[q], table.grad[q], table.laplace[q]);
    table.n_basis = table.value.empty() ? 0 : static_cast<int>(table.value[0].size());
    return table;
  }
} // namespace vans
