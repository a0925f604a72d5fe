#include <vans/mesh.hpp>

#include <cmath>

namespace vans
{
  int Mesh::cell_id(int i, int j, int k) const
  {
    return i + subdivisions[0] * (j + subdivisions[1] * k);
  }

  std::array<int, 3> Mesh::cell_index(int id) const
  {
    const int i = id % subdivisions[0];
    const int j = (id / subdivisions[0]) % subdivisions[1];
    const int k = id / (subdivisions[0] * subdivisions[1]);
    return {i, j, k};
  }

  Vec3 Mesh::cell_lower(int id) const
  {
    const auto idx = cell_index(id);
    Vec3 p = lower;
    for (int d = 0; d < dim; ++d)
      p[d] += idx[d] * cell_size[d];
    return p;
  }

  int Mesh::locate_cell(const Vec3 &p) const
  {
    int idx[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d)
      {
        if (p[d] < lower[d] || p[d] > upper[d])
          return -1;
        int i = static_cast<int>(std::floor((p[d] - lower[d]) / cell_size[d]));
        // A point exactly on the global upper face belongs to the last cell.
        if (i >= subdivisions[d])
          i = subdivisions[d] - 1;
        idx[d] = i;
      }
    return cell_id(idx[0], idx[1], idx[2]);
  }

  Vec3 Mesh::reference_coords(int cell, const Vec3 &p) const
  {
    const Vec3 lo = cell_lower(cell);
    Vec3 ref = Vec3::Zero();
    for (int d = 0; d < dim; ++d)
      ref[d] = (p[d] - lo[d]) / cell_size[d];
    return ref;
  }

  Mesh build_box_mesh(int dim,
                      const std::array<int, 3> &subdivisions,
                      const Vec3 &lower,
                      const Vec3 &upper)
  {
    if (dim < 2 || dim > 3)
      throw ConfigError("build_box_mesh: dim must be 2 or 3");
    for (int d = 0; d < dim; ++d)
      {
        if (subdivisions[d] < 1)
          throw ConfigError("build_box_mesh: subdivisions must be positive");
        if (!(upper[d] > lower[d]))
          throw ConfigError("build_box_mesh: upper corner must exceed lower corner");
      }

    Mesh mesh;
    mesh.dim = dim;
    mesh.subdivisions = subdivisions;
    if (dim == 2)
      mesh.subdivisions[2] = 1;
    mesh.lower = lower;
    mesh.upper = upper;
    if (dim == 2)
      {
        mesh.lower[2] = 0.0;
        mesh.upper[2] = 0.0;
      }
    for (int d = 0; d < dim; ++d)
      mesh.cell_size[d] = (upper[d] - lower[d]) / subdivisions[d];

    const int nx = subdivisions[0] + 1;
    const int ny = subdivisions[1] + 1;
    const int nz = (dim == 3) ? subdivisions[2] + 1 : 1;

    mesh.node_coords.reserve(static_cast<size_t>(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          {
            Vec3 p = mesh.lower;
            p[0] += i * mesh.cell_size[0];
            p[1] += j * mesh.cell_size[1];
            if (dim == 3)
              p[2] += k * mesh.cell_size[2];
            mesh.node_coords.push_back(p);
          }

    auto node_id = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

    double measure = 1.0;
    for (int d = 0; d < dim; ++d)
      measure *= mesh.cell_size[d];

    const int cz = (dim == 3) ? subdivisions[2] : 1;
    for (int k = 0; k < cz; ++k)
      for (int j = 0; j < subdivisions[1]; ++j)
        for (int i = 0; i < subdivisions[0]; ++i)
          {
            std::vector<int> conn;
            if (dim == 2)
              conn = {node_id(i, j, 0), node_id(i + 1, j, 0),
                      node_id(i, j + 1, 0), node_id(i + 1, j + 1, 0)};
            else
              conn = {node_id(i, j, k),         node_id(i + 1, j, k),
                      node_id(i, j + 1, k),     node_id(i + 1, j + 1, k),
                      node_id(i, j, k + 1),     node_id(i + 1, j, k + 1),
                      node_id(i, j + 1, k + 1), node_id(i + 1, j + 1, k + 1)};
            mesh.cells.push_back(conn);
            mesh.cell_measures.push_back(measure);

            // Boundary facets: tag matches the face numbering.
            const int cell = mesh.cell_id(i, j, k);
            if (i == 0)
              mesh.boundary_facets.push_back({cell, 0, 0});
            if (i == subdivisions[0] - 1)
              mesh.boundary_facets.push_back({cell, 1, 1});
            if (j == 0)
              mesh.boundary_facets.push_back({cell, 2, 2});
            if (j == subdivisions[1] - 1)
              mesh.boundary_facets.push_back({cell, 3, 3});
            if (dim == 3 && k == 0)
              mesh.boundary_facets.push_back({cell, 4, 4});
            if (dim == 3 && k == cz - 1)
              mesh.boundary_facets.push_back({cell, 5, 5});
          }

    return mesh;
  }
} // namespace vans
