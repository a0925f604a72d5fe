#ifndef VANS_VTK_HPP
#define VANS_VTK_HPP

#include <vans/state.hpp>
#include <vans/void_fraction.hpp>

#include <string>
#include <vector>

namespace vans
{
  // One named point-data array, node-major with `components` values per mesh
  // vertex (1 = scalar, 3 = vector).
  struct VtkField
  {
    std::string name;
    int components = 1;
    std::vector<double> values;
  };

  // Legacy ASCII unstructured-grid writer. The grid holds the mesh vertices
  // and quad/hex cells; every field becomes a POINT_DATA array. An empty
  // field list still produces a valid grid-only file.
  void write_vtk(const Mesh &mesh,
                 const std::vector<VtkField> &fields,
                 const std::string &path);

  // Sample a flow state at the mesh vertices into the arrays write_vtk
  // expects: `velocity` (3 components), `pressure`, and, when a void-fraction
  // field is supplied, `void_fraction`. Works for any element degree since
  // sampling goes through field evaluation. The solver carries kinematic
  // pressure, so a density can be folded in to report Pa.
  std::vector<VtkField> flow_point_data(const SolutionState &state,
                                        const VoidFractionData *void_fraction = nullptr,
                                        double pressure_scale = 1.0);
} // namespace vans

#endif
