#include "mns/driver.hpp"
#include "mns/experiments.hpp"
#include "mns/writers.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace mns;

namespace {

py::array_t<double> points_array(const std::vector<Point>& pts) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a(i, 0) = pts[i].x;
    a(i, 1) = pts[i].y;
  }
  return out;
}

py::array_t<int> triangles_array(const Mesh& mesh) {
  const auto& tris = mesh.triangles();
  py::array_t<int> out({static_cast<py::ssize_t>(tris.size()), py::ssize_t{3}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < tris.size(); ++k) {
    for (int j = 0; j < 3; ++j) a(k, j) = tris[k][j];
  }
  return out;
}

py::dict error_row_dict(const ErrorRow& r) {
  py::dict d;
  d["tau"] = r.tau;
  d["eu_L2"] = r.eu_l2;
  d["eu_H1"] = r.eu_h1;
  d["ep_L2"] = r.ep_l2;
  d["ew_L2"] = r.ew_l2;
  d["ew_H1"] = r.ew_h1;
  d["eq"] = r.eq;
  return d;
}

py::dict series_dict(const EnergySeries& s) {
  const std::size_t n = s.records.size();
  Vector t(n), e(n), ep(n), q(n), S(n), r(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = s.records[i];
    t[i] = rec.t;
    e[i] = rec.energy;
    ep[i] = rec.physical_energy;
    q[i] = rec.q;
    S[i] = rec.S.value_or(nan);
    r[i] = rec.dissipation_residual.value_or(nan);
  }
  py::dict d;
  d["tau"] = s.tau;
  d["t"] = t;
  d["E"] = e;
  d["E_physical"] = ep;
  d["q"] = q;
  d["S"] = S;
  d["dissipation_residual"] = r;
  return d;
}

// Stepper over one of the built-in problems, for interactive use.
class Stepper {
 public:
  Stepper(const Config& config, const std::string& problem) : config_(config), problem_(problem) {
    if (problem == "manufactured") {
      config_.momentum_force = [c = config](Point x, double t) { return manufactured_forcing(t, x, c).f; };
      config_.angular_force = [c = config](Point x, double t) { return manufactured_forcing(t, x, c).g; };
      init(
          [](Point x) { return exact_solution(0.0, x).u; }, [](Point x) { return exact_solution(0.0, x).w; });
    } else if (problem == "energy") {
      init(stability_initial_velocity, stability_initial_angular);
    } else if (problem == "rest") {
      init([](Point) { return Vec2{0.0, 0.0}; }, [](Point) { return 0.0; });
    } else {
      throw std::invalid_argument("problem must be manufactured, energy or rest");
    }
  }

  void step(int count) {
    if (count < 0) throw std::invalid_argument("count must be nonnegative");
    for (int i = 0; i < count; ++i) {
      State next = advance(state_, systems_, config_);
      last_residual_ = energy_dissipation_residual(state_, next, systems_, config_);
      state_ = std::move(next);
    }
  }

  const State& state() const { return state_; }
  const PreparedSystems& systems() const { return systems_; }
  const Config& config() const { return config_; }
  double energy() const { return discrete_energy(state_, systems_, config_); }
  double physical() const { return physical_energy(state_, systems_, config_); }
  double last_residual() const { return last_residual_; }
  py::dict errors() const {
    if (problem_ != "manufactured") throw std::logic_error("errors are defined for the manufactured problem only");
    return error_row_dict(compute_errors(state_, systems_, config_));
  }

 private:
  template <class U, class W>
  void init(U u0, W w0) {
    auto [s, sys] = init_stepper(config_, u0, w0);
    state_ = std::move(s);
    systems_ = std::move(sys);
  }

  Config config_;
  std::string problem_;
  State state_;
  PreparedSystems systems_;
  double last_residual_ = std::numeric_limits<double>::quiet_NaN();
};

py::tuple coo(const SparseMatrix& m) {
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  const std::size_t nnz = v.size();
  py::array_t<int> rows(nnz), cols(nnz);
  py::array_t<double> vals(nnz);
  auto r = rows.mutable_unchecked<1>();
  auto c = cols.mutable_unchecked<1>();
  auto x = vals.mutable_unchecked<1>();
  std::size_t k = 0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int p = rp[i]; p < rp[i + 1]; ++p, ++k) {
      r(k) = i;
      c(k) = ci[p];
      x(k) = v[p];
    }
  }
  return py::make_tuple(rows, cols, vals, py::make_tuple(m.rows(), m.cols()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite element solver for 2D micropolar Navier-Stokes flow with a scalar auxiliary variable";

  py::class_<Config>(m, "Config")
      .def(py::init<>())
      .def_readwrite("nu", &Config::nu)
      .def_readwrite("nu_r", &Config::nu_r)
      .def_readwrite("j", &Config::microinertia)
      .def_readwrite("c1", &Config::c1)
      .def_readwrite("c2", &Config::c2)
      .def_readwrite("T", &Config::final_time)
      .def_readwrite("tau", &Config::tau)
      .def_readwrite("h", &Config::h)
      .def_property(
          "domain",
          [](const Config& c) { return py::make_tuple(c.domain.xmin, c.domain.xmax, c.domain.ymin, c.domain.ymax); },
          [](Config& c, std::array<double, 4> d) { c.domain = {d[0], d[1], d[2], d[3]}; })
      .def_property(
          "solver",
          [](const Config& c) { return c.solver.method == SolverMethod::direct ? "direct" : "iterative"; },
          [](Config& c, const std::string& s) {
            if (s == "direct") {
              c.solver.method = SolverMethod::direct;
            } else if (s == "iterative") {
              c.solver.method = SolverMethod::iterative;
            } else {
              throw std::invalid_argument("solver must be direct or iterative");
            }
          })
      .def_property(
          "rtol", [](const Config& c) { return c.solver.rtol; }, [](Config& c, double v) { c.solver.rtol = v; })
      .def_property(
          "rtol_div", [](const Config& c) { return c.solver.rtol_div; },
          [](Config& c, double v) { c.solver.rtol_div = v; })
      .def("validate", &Config::validate)
      .def("steps", &Config::steps)
      .def("time_step", &Config::time_step)
      .def("cells", &Config::cells)
      .def("__repr__", [](const Config& c) {
        std::ostringstream os;
        os << "Config(nu=" << c.nu << ", nu_r=" << c.nu_r << ", j=" << c.microinertia << ", c1=" << c.c1
           << ", c2=" << c.c2 << ", T=" << c.final_time << ", tau=" << c.tau << ", h=" << c.h << ")";
        return os.str();
      });

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("vertices", [](const Mesh& mesh) { return points_array(mesh.vertices()); })
      .def_property_readonly("triangles", &triangles_array)
      .def_property_readonly("boundary", [](const Mesh& mesh) {
        std::vector<bool> b(mesh.vertex_count());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = mesh.on_boundary(mesh.vertices()[i]);
        return b;
      })
      .def("max_edge_length", &Mesh::max_edge_length);

  m.def(
      "build_rect_mesh",
      [](int nx, int ny, std::array<double, 4> d) {
        return std::make_shared<Mesh>(build_rect_mesh(nx, ny, {d[0], d[1], d[2], d[3]}));
      },
      py::arg("nx"), py::arg("ny"), py::arg("domain") = std::array<double, 4>{0.0, 1.0, 0.0, 1.0});

  m.def(
      "assemble",
      [](const std::string& kind, std::shared_ptr<Mesh> mesh_in) {
        std::shared_ptr<const Mesh> mesh = mesh_in;
        const auto p1 = FeSpace::scalar(mesh, 1);
        const auto p2 = FeSpace::scalar(mesh, 2);
        const auto v2 = FeSpace::vector(mesh, 2);
        if (kind == "mass_p1") return coo(assemble_mass(*p1));
        if (kind == "mass_p2") return coo(assemble_mass(*p2));
        if (kind == "stiffness_p1") return coo(assemble_stiffness(*p1));
        if (kind == "stiffness_p2") return coo(assemble_stiffness(*p2));
        if (kind == "mass_velocity") return coo(assemble_mass(*v2));
        if (kind == "stiffness_velocity") return coo(assemble_stiffness(*v2));
        if (kind == "divergence") return coo(assemble_div(*v2, *p1));
        if (kind == "curl") return coo(assemble_curl(*v2, *p2));
        throw std::invalid_argument("unknown operator '" + kind + "'");
      },
      py::arg("kind"), py::arg("mesh"),
      "Sparse operator as (rows, cols, values, shape). Kinds: mass_p1, mass_p2, stiffness_p1, stiffness_p2, "
      "mass_velocity, stiffness_velocity, divergence, curl.");

  m.def(
      "exact_solution",
      [](double t, double x, double y) {
        const auto e = exact_solution(t, {x, y});
        return py::make_tuple(py::make_tuple(e.u[0], e.u[1]), e.p, e.w);
      },
      py::arg("t"), py::arg("x"), py::arg("y"));
  m.def(
      "manufactured_forcing",
      [](double t, double x, double y, const Config& c) {
        const auto f = manufactured_forcing(t, {x, y}, c);
        return py::make_tuple(py::make_tuple(f.f[0], f.f[1]), f.g);
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("config") = Config{});

  py::class_<Stepper>(m, "Stepper")
      .def(py::init<const Config&, const std::string&>(), py::arg("config"), py::arg("problem") = "manufactured",
           "problem: manufactured (forced, exact solution known), energy (unforced decay) or rest")
      .def("step", &Stepper::step, py::arg("count") = 1, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("t", [](const Stepper& s) { return s.state().t; })
      .def_property_readonly("n", [](const Stepper& s) { return s.state().n; })
      .def_property_readonly("q", [](const Stepper& s) { return s.state().q; })
      .def_property_readonly("S", [](const Stepper& s) { return s.state().diagnostics.S; })
      .def_property_readonly("bracket", [](const Stepper& s) { return s.state().diagnostics.bracket; })
      .def_property_readonly("tau", [](const Stepper& s) { return s.systems().tau; })
      .def_property_readonly("energy", &Stepper::energy)
      .def_property_readonly("physical_energy", &Stepper::physical)
      .def_property_readonly("dissipation_residual", &Stepper::last_residual)
      .def_property_readonly("velocity", [](const Stepper& s) { return s.state().u.coeffs; },
                             "P2 velocity coefficients, interleaved (u0, v0, u1, v1, ...)")
      .def_property_readonly("pressure", [](const Stepper& s) { return s.state().p.coeffs; })
      .def_property_readonly("angular_velocity", [](const Stepper& s) { return s.state().w.coeffs; })
      .def_property_readonly("nodes",
                             [](const Stepper& s) { return points_array(s.systems().angular_space->dof_coords()); },
                             "P2 node coordinates: vertices, then edge midpoints")
      .def_property_readonly("mesh", [](const Stepper& s) { return std::make_shared<Mesh>(*s.systems().mesh); })
      .def("errors", &Stepper::errors);

  m.def(
      "run_convergence",
      [](const Config& c, const std::vector<double>& taus) {
        ErrorReport report;
        {
          py::gil_scoped_release release;
          report = run_convergence(c, taus);
        }
        py::list rows;
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
          py::dict d = error_row_dict(report.rows[i]);
          static const char* names[] = {"eu_L2", "eu_H1", "ep_L2", "ew_L2", "ew_H1", "eq"};
          for (int col = 0; col < ErrorRow::kColumns; ++col) {
            const auto r = report.rate(i, col);
            d[py::str(std::string(names[col]) + "_rate")] = r ? py::cast(*r) : py::none();
          }
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), py::arg("tau_list"));

  m.def(
      "run_stability",
      [](const Config& c, const std::vector<double>& taus) {
        std::vector<EnergySeries> all;
        {
          py::gil_scoped_release release;
          all = run_stability(c, taus);
        }
        py::list out;
        for (const auto& s : all) out.append(series_dict(s));
        return out;
      },
      py::arg("config"), py::arg("tau_list"));

  m.def(
      "run_stirring",
      [](const Config& c, const std::vector<double>& times) {
        StirringResult r;
        {
          py::gil_scoped_release release;
          r = run_stirring(c, times);
        }
        py::list snaps;
        for (const auto& s : r.snapshots) {
          py::dict d;
          d["t"] = s.t;
          d["phi"] = s.phi.coeffs;
          d["total_variation"] = s.total_variation;
          d["l1_change"] = s.l1_change;
          snaps.append(d);
        }
        py::dict d;
        d["snapshots"] = snaps;
        d["phi_min"] = r.phi_min;
        d["phi_max"] = r.phi_max;
        d["min_bracket"] = r.min_bracket;
        d["steps"] = r.steps;
        return d;
      },
      py::arg("config"), py::arg("snapshot_times"));

  m.def("stirring_config", &stirring_config, py::arg("viscosity"));

  py::class_<RunSpec>(m, "RunSpec")
      .def_readonly("config", &RunSpec::config)
      .def_readonly("tau_list", &RunSpec::tau_list)
      .def_readonly("snapshot_times", &RunSpec::snapshot_times)
      .def_readonly("out_dir", &RunSpec::out_dir)
      .def_property_readonly("subcommand", [](const RunSpec& s) { return to_string(s.subcommand); })
      .def_property_readonly("problem", [](const RunSpec& s) { return to_string(s.problem); });

  m.def(
      "parse_config",
      [](const std::string& path, const std::string& text, const std::map<std::string, std::string>& overrides) {
        std::vector<ConfigEntry> entries;
        if (!text.empty()) entries = parse_config_text(text, "<text>");
        for (const auto& [k, v] : overrides) entries.push_back({k, v, "override"});
        return parse_config(path, entries);
      },
      py::arg("path") = "", py::arg("text") = "", py::arg("overrides") = std::map<std::string, std::string>{},
      "Builds a validated RunSpec from a config file and/or config text plus key overrides.");

  m.def(
      "execute",
      [](const RunSpec& spec) {
        std::ostringstream log;
        RunOutputs out;
        {
          py::gil_scoped_release release;
          out = execute(spec, log);
        }
        return py::make_tuple(out.files, log.str());
      },
      py::arg("spec"), "Runs a spec; returns (files written, log text).");

  m.def("format_real", &format_real);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
}
