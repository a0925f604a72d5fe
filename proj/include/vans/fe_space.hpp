#ifndef VANS_FE_SPACE_HPP
#define VANS_FE_SPACE_HPP

#include <vans/lagrange.hpp>
#include <vans/mesh.hpp>

#include <functional>
#include <vector>

namespace vans
{
  // Scalar continuous Lagrange space of degree k on a structured box mesh.
  // DoFs live on the refined lattice (k*nx+1 per axis) and are numbered
  // lexicographically; per-cell DoF lists are materialized once.
  class FeSpace
  {
  public:
    FeSpace(const Mesh &mesh, int degree);

    const Mesh &mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    int dim() const { return mesh_->dim; }
    int n_dofs() const { return n_dofs_; }
    int dofs_per_cell() const { return dofs_per_cell_; }

    const std::vector<int> &cell_dofs(int cell) const { return cell_dofs_[cell]; }
    const Vec3 &support_point(int dof) const { return support_points_[dof]; }
    const std::vector<Vec3> &support_points() const { return support_points_; }

    // Scalar DoFs whose support point lies on the given boundary face.
    std::vector<int> boundary_dofs(int tag) const;

    // Nodal interpolation of an analytic function.
    Vector interpolate(const std::function<double(const Vec3 &)> &f) const;

  private:
    const Mesh *mesh_;
    int degree_;
    int n_dofs_ = 0;
    int dofs_per_cell_ = 0;
    std::array<int, 3> lattice_{1, 1, 1}; // DoF lattice extents per axis
    std::vector<std::vector<int>> cell_dofs_;
    std::vector<Vec3> support_points_;
  };

  // A scalar FE field: coefficients over a space, point evaluation included.
  struct FeField
  {
    const FeSpace *space = nullptr;
    Vector values;

    double eval(const Vec3 &p) const;
    Vec3 eval_grad(const Vec3 &p) const;
  };
} // namespace vans

#endif
