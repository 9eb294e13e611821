#pragma once

#include "mns/experiments.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace mns {

/// Scientific notation, six digits after the point, exponent without sign
/// padding or leading zeros: 2.475000e-3, 1.000000e0, 0.000000e0.
std::string format_real(double x);
/// Fixed with two decimals: 1.02.
std::string format_rate(double x);

/// tau,eu_L2,eu_L2_rate,...,eq,eq_rate; first-row rates empty.
void write_csv_table(const ErrorReport& report, std::ostream& out);
void write_csv_table(const ErrorReport& report, const std::string& path);

/// n,t,E,E_physical,q,S,dissipation_residual; one row per time level.
void write_energy_series(const EnergySeries& series, std::ostream& out);
void write_energy_series(const EnergySeries& series, const std::string& path);

struct NamedField {
  std::string name;
  Field field;
};

/// Legacy ASCII VTK, UNSTRUCTURED_GRID of the mesh triangles. Scalar fields
/// become SCALARS, two-component fields VECTORS (z = 0); only vertex values
/// are written. All fields must live on the same mesh.
void write_vtk_field(const std::vector<NamedField>& fields, std::ostream& out);
void write_vtk_field(const std::vector<NamedField>& fields, const std::string& path);

}  // namespace mns
