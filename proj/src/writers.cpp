#include "mns/writers.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mns {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Shortest text that reads back to the same double.
std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_real(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", x);
  std::string s(buf);
  const auto e = s.find('e');
  std::string mantissa = s.substr(0, e);
  const int exponent = std::stoi(s.substr(e + 1));
  return mantissa + "e" + std::to_string(exponent);
}

std::string format_rate(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

void write_csv_table(const ErrorReport& report, std::ostream& out) {
  if (report.rows.empty()) throw std::invalid_argument("error report is empty");
  out << "tau,eu_L2,eu_L2_rate,eu_H1,eu_H1_rate,ep_L2,ep_L2_rate,ew_L2,ew_L2_rate,ew_H1,ew_H1_rate,eq,eq_rate\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto cols = report.rows[i].columns();
    out << format_real(report.rows[i].tau);
    for (int c = 0; c < ErrorRow::kColumns; ++c) {
      out << ',' << format_real(cols[c]) << ',';
      if (const auto r = report.rate(i, c)) out << format_rate(*r);
    }
    out << '\n';
  }
}

void write_csv_table(const ErrorReport& report, const std::string& path) {
  auto out = open_output(path);
  write_csv_table(report, out);
  finish(out, path);
}

void write_energy_series(const EnergySeries& series, std::ostream& out) {
  out << "n,t,E,E_physical,q,S,dissipation_residual\n";
  for (const auto& r : series.records) {
    out << r.n << ',' << format_real(r.t) << ',' << format_real(r.energy) << ',' << format_real(r.physical_energy)
        << ',' << format_real(r.q) << ',';
    if (r.S) out << format_real(*r.S);
    out << ',';
    if (r.dissipation_residual) out << format_real(*r.dissipation_residual);
    out << '\n';
  }
}

void write_energy_series(const EnergySeries& series, const std::string& path) {
  auto out = open_output(path);
  write_energy_series(series, out);
  finish(out, path);
}

void write_vtk_field(const std::vector<NamedField>& fields, std::ostream& out) {
  if (fields.empty()) throw std::invalid_argument("no fields to write");
  const auto mesh_ptr = fields.front().field.space->mesh_ptr();
  for (const auto& f : fields) {
    if (f.field.space->mesh_ptr() != mesh_ptr) throw std::invalid_argument("fields live on different meshes");
    if (f.field.space->components() > 2) throw std::invalid_argument("field '" + f.name + "' has too many components");
    if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("VTK field names must be nonempty without whitespace");
    }
  }
  const Mesh& mesh = *mesh_ptr;
  const std::size_t nv = mesh.vertex_count();
  const std::size_t nt = mesh.triangle_count();

  out << "# vtk DataFile Version 3.0\n";
  out << "micropolar flow snapshot\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& v : mesh.vertices()) out << shortest(v.x) << ' ' << shortest(v.y) << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t k = 0; k < nt; ++k) out << "5\n";

  out << "POINT_DATA " << nv << '\n';
  for (const auto& f : fields) {
    const Vector& c = f.field.coeffs;
    // Vertex nodes come first in every space.
    if (f.field.space->components() == 1) {
      out << "SCALARS " << f.name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (std::size_t i = 0; i < nv; ++i) out << shortest(c[i]) << '\n';
    } else {
      out << "VECTORS " << f.name << " double\n";
      for (std::size_t i = 0; i < nv; ++i) out << shortest(c[2 * i]) << ' ' << shortest(c[2 * i + 1]) << " 0\n";
    }
  }
}

void write_vtk_field(const std::vector<NamedField>& fields, const std::string& path) {
  auto out = open_output(path);
  write_vtk_field(fields, out);
  finish(out, path);
}

}  // namespace mns
