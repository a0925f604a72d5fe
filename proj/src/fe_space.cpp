#include <vans/fe_space.hpp>

#include <cmath>

namespace vans
{
  FeSpace::FeSpace(const Mesh &mesh, int degree)
    : mesh_(&mesh)
    , degree_(degree)
  {
    if (degree < 1 || degree > 4)
      throw ConfigError("FeSpace: degree must be in [1,4], got " + std::to_string(degree));

    for (int d = 0; d < mesh.dim; ++d)
      lattice_[d] = degree * mesh.subdivisions[d] + 1;

    n_dofs_ = lattice_[0] * lattice_[1] * lattice_[2];
    dofs_per_cell_ = 1;
    for (int d = 0; d < mesh.dim; ++d)
      dofs_per_cell_ *= degree + 1;

    support_points_.resize(n_dofs_);
    int dof = 0;
    for (int k = 0; k < lattice_[2]; ++k)
      for (int j = 0; j < lattice_[1]; ++j)
        for (int i = 0; i < lattice_[0]; ++i, ++dof)
          {
            Vec3 p = mesh.lower;
            p[0] += mesh.cell_size[0] * i / degree;
            if (mesh.dim > 1)
              p[1] += mesh.cell_size[1] * j / degree;
            if (mesh.dim > 2)
              p[2] += mesh.cell_size[2] * k / degree;
            support_points_[dof] = p;
          }

    auto lattice_dof = [&](int i, int j, int k) {
      return i + lattice_[0] * (j + lattice_[1] * k);
    };

    cell_dofs_.resize(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c)
      {
        const auto ci = mesh.cell_index(c);
        std::vector<int> dofs;
        dofs.reserve(dofs_per_cell_);
        const int lz = (mesh.dim > 2) ? degree : 0;
        const int ly = (mesh.dim > 1) ? degree : 0;
        for (int k = 0; k <= lz; ++k)
          for (int j = 0; j <= ly; ++j)
            for (int i = 0; i <= degree; ++i)
              dofs.push_back(lattice_dof(degree * ci[0] + i,
                                         degree * ci[1] + j,
                                         degree * ci[2] + k));
        cell_dofs_[c] = std::move(dofs);
      }
  }

  std::vector<int> FeSpace::boundary_dofs(int tag) const
  {
    if (tag < 0 || tag >= 2 * mesh_->dim)
      throw ConfigError("boundary_dofs: tag out of range");
    const int axis = tag / 2;
    const int side = tag % 2; // 0 = min face, 1 = max face
    const int target = (side == 0) ? 0 : lattice_[axis] - 1;

    std::vector<int> result;
    int dof = 0;
    for (int k = 0; k < lattice_[2]; ++k)
      for (int j = 0; j < lattice_[1]; ++j)
        for (int i = 0; i < lattice_[0]; ++i, ++dof)
          {
            const int idx[3] = {i, j, k};
            if (idx[axis] == target)
              result.push_back(dof);
          }
    return result;
  }

  Vector FeSpace::interpolate(const std::function<double(const Vec3 &)> &f) const
  {
    Vector v(n_dofs_);
    for (int i = 0; i < n_dofs_; ++i)
      v[i] = f(support_points_[i]);
    return v;
  }

  double FeField::eval(const Vec3 &p) const
  {
    const Mesh &mesh = space->mesh();
    const int cell = mesh.locate_cell(p);
    if (cell < 0)
      throw DomainError("FeField::eval: point outside the mesh");
    const Vec3 ref = mesh.reference_coords(cell, p);

    Lagrange1d b(space->degree());
    std::vector<double> phi;
    std::vector<Vec3> grad;
    std::vector<double> lap;
    tensor_basis_at(b, mesh.dim, ref, mesh.cell_size, phi, grad, lap);

    const auto &dofs = space->cell_dofs(cell);
    double v = 0.0;
    for (size_t j = 0; j < dofs.size(); ++j)
      v += values[dofs[j]] * phi[j];
    return v;
  }

  Vec3 FeField::eval_grad(const Vec3 &p) const
  {
    const Mesh &mesh = space->mesh();
    const int cell = mesh.locate_cell(p);
    if (cell < 0)
      throw DomainError("FeField::eval_grad: point outside the mesh");
    const Vec3 ref = mesh.reference_coords(cell, p);

    Lagrange1d b(space->degree());
    std::vector<double> phi;
    std::vector<Vec3> grad;
    std::vector<double> lap;
    tensor_basis_at(b, mesh.dim, ref, mesh.cell_size, phi, grad, lap);

    const auto &dofs = space->cell_dofs(cell);
    Vec3 g = Vec3::Zero();
    for (size_t j = 0; j < dofs.size(); ++j)
      g += values[dofs[j]] * grad[j];
    return g;
  }
} // namespace vans
