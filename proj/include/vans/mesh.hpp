#ifndef VANS_MESH_HPP
#define VANS_MESH_HPP

#include <vans/types.hpp>

#include <array>
#include <vector>

namespace vans
{
  // Face/boundary tag numbering, shared by meshes and boundary conditions:
  // 0 = x-min, 1 = x-max, 2 = y-min, 3 = y-max, 4 = z-min, 5 = z-max.
  struct BoundaryFacet
  {
    int cell = -1;
    int local_face = -1; // 0..2*dim-1, same axis convention as the tag
    int tag = -1;
  };

  // Axis-aligned structured box mesh of quads/hexes. Nodes and cells are
  // numbered lexicographically (x fastest). Cells are uniform, so a single
  // cell size describes the whole mesh.
  struct Mesh
  {
    int dim = 0;
    std::array<int, 3> subdivisions{1, 1, 1};
    Vec3 lower = Vec3::Zero();
    Vec3 upper = Vec3::Zero();
    Vec3 cell_size = Vec3::Zero();

    std::vector<Vec3> node_coords;
    std::vector<std::vector<int>> cells; // 2^dim node ids, lexicographic
    std::vector<BoundaryFacet> boundary_facets;
    std::vector<double> cell_measures;

    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_nodes() const { return static_cast<int>(node_coords.size()); }

    // Cell lattice index -> flat id and back.
    int cell_id(int i, int j, int k) const;
    std::array<int, 3> cell_index(int id) const;

    // Lower corner of a cell.
    Vec3 cell_lower(int id) const;

    // Cell owning a point under the half-open convention [lo, hi) per axis;
    // the domain's closing faces belong to the last cells. Returns -1 when
    // the point lies outside the box.
    int locate_cell(const Vec3 &p) const;

    // Map a point inside a cell to reference coordinates in [0,1]^dim.
    Vec3 reference_coords(int cell, const Vec3 &p) const;
  };

  Mesh build_box_mesh(int dim,
                      const std::array<int, 3> &subdivisions,
                      const Vec3 &lower,
                      const Vec3 &upper);
} // namespace vans

#endif
