#include <vans/vtk.hpp>

#include <fstream>
#include <iomanip>

namespace vans
{
  namespace
  {
    // Lexicographic corner numbering (x fastest) to the VTK winding: quads go
    // counterclockwise, hexes list the bottom face then the top face.
    constexpr int quad_corners[4] = {0, 1, 3, 2};
    constexpr int hex_corners[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  } // namespace

  void write_vtk(const Mesh &mesh, const std::vector<VtkField> &fields, const std::string &path)
  {
    for (const VtkField &field : fields)
      {
        if (field.components != 1 && field.components != 3)
          throw ConfigError("write_vtk: field " + field.name + " must have 1 or 3 components");
        if (static_cast<int>(field.values.size()) != mesh.n_nodes() * field.components)
          throw ConfigError("write_vtk: field " + field.name + " has " +
                            std::to_string(field.values.size()) + " values, expected " +
                            std::to_string(mesh.n_nodes() * field.components));
      }

    std::ofstream out(path);
    if (!out)
      throw IoError("cannot write VTK file: " + path);
    out << std::setprecision(17);

    out << "# vtk DataFile Version 3.0\n";
    out << "volume-averaged flow field\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";

    out << "POINTS " << mesh.n_nodes() << " double\n";
    for (const Vec3 &p : mesh.node_coords)
      out << p.x() << " " << p.y() << " " << p.z() << "\n";

    const int corners = mesh.dim == 3 ? 8 : 4;
    const int *order = mesh.dim == 3 ? hex_corners : quad_corners;
    out << "CELLS " << mesh.n_cells() << " " << mesh.n_cells() * (corners + 1) << "\n";
    for (const std::vector<int> &cell : mesh.cells)
      {
        out << corners;
        for (int c = 0; c < corners; ++c)
          out << " " << cell[order[c]];
        out << "\n";
      }
    out << "CELL_TYPES " << mesh.n_cells() << "\n";
    const int cell_type = mesh.dim == 3 ? 12 : 9;
    for (int c = 0; c < mesh.n_cells(); ++c)
      out << cell_type << "\n";

    if (!fields.empty())
      {
        out << "POINT_DATA " << mesh.n_nodes() << "\n";
        for (const VtkField &field : fields)
          {
            if (field.components == 3)
              {
                out << "VECTORS " << field.name << " double\n";
                for (int n = 0; n < mesh.n_nodes(); ++n)
                  out << field.values[3 * n] << " " << field.values[3 * n + 1] << " "
                      << field.values[3 * n + 2] << "\n";
              }
            else
              {
                out << "SCALARS " << field.name << " double 1\n";
                out << "LOOKUP_TABLE default\n";
                for (int n = 0; n < mesh.n_nodes(); ++n)
                  out << field.values[n] << "\n";
              }
          }
      }

    if (!out)
      throw IoError("failed while writing VTK file: " + path);
  }

  std::vector<VtkField> flow_point_data(const SolutionState &state,
                                        const VoidFractionData *void_fraction,
                                        double pressure_scale)
  {
    const Mesh &mesh = state.velocity_space->mesh();
    const int n = mesh.n_nodes();

    VtkField velocity{"velocity", 3, std::vector<double>(3 * n, 0.0)};
    for (int comp = 0; comp < state.dim; ++comp)
      {
        Vector component(state.velocity_space->n_dofs());
        for (int node = 0; node < state.velocity_space->n_dofs(); ++node)
          component[node] = state.x[state.velocity_dof(node, comp)];
        const FeField field{state.velocity_space, component};
        for (int node = 0; node < n; ++node)
          velocity.values[3 * node + comp] = field.eval(mesh.node_coords[node]);
      }

    VtkField pressure{"pressure", 1, std::vector<double>(n, 0.0)};
    {
      Vector coefficients(state.pressure_space->n_dofs());
      for (int node = 0; node < state.pressure_space->n_dofs(); ++node)
        coefficients[node] = state.x[state.pressure_dof(node)];
      const FeField field{state.pressure_space, coefficients};
      for (int node = 0; node < n; ++node)
        pressure.values[node] = pressure_scale * field.eval(mesh.node_coords[node]);
    }

    std::vector<VtkField> fields{velocity, pressure};
    if (void_fraction != nullptr)
      {
        VtkField eps{"void_fraction", 1, std::vector<double>(n, 0.0)};
        const FeField field{void_fraction->space, void_fraction->values};
        for (int node = 0; node < n; ++node)
          eps.values[node] = field.eval(mesh.node_coords[node]);
        fields.push_back(eps);
      }
    return fields;
  }
} // namespace vans
