#include "mns/driver.hpp"

#include "mns/writers.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace mns {

namespace {

namespace fs = std::filesystem;

std::string tag(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }
  std::string path(const std::string& name, RunOutputs& out) const {
    out.files.push_back(name);
    return (dir_ / name).string();
  }

 private:
  fs::path dir_;
};

void log_report(const ErrorReport& report, std::ostream& log) {
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    log << "tau " << format_real(r.tau) << "  eu " << format_real(r.eu_l2) << "  grad eu " << format_real(r.eu_h1)
        << "  ep " << format_real(r.ep_l2) << "  ew " << format_real(r.ew_l2) << "  grad ew " << format_real(r.ew_h1)
        << "  eq " << format_real(r.eq) << '\n';
  }
}

std::vector<NamedField> snapshot_fields(const Field& phi, const Field& u, const Field& w) {
  std::vector<NamedField> fields;
  if (phi.space) fields.push_back({"phi", phi});
  fields.push_back({"velocity", u});
  fields.push_back({"angular_velocity", w});
  return fields;
}

void write_stirring(const RunSpec& spec, const std::vector<double>& times, const OutputDir& dir, RunOutputs& out,
                    std::ostream& log, bool final_only) {
  std::vector<std::string> rows;
  auto on_snapshot = [&](const StirringSnapshot& s) {
    rows.push_back(format_real(s.t) + ',' + format_real(s.total_variation) + ',' + format_real(s.l1_change) + ',' +
                   format_real(s.phi.coeffs.minCoeff()) + ',' + format_real(s.phi.coeffs.maxCoeff()));
    log << "t " << tag(s.t) << "  interface length " << format_real(s.total_variation) << '\n';
    if (spec.write_vtk) {
      const std::string name = final_only ? "final.vtk" : "stir_t" + tag(s.t) + ".vtk";
      write_vtk_field(snapshot_fields(s.phi, s.velocity, s.angular), dir.path(name, out));
    }
  };
  const StirringResult result = run_stirring(spec.config, times, on_snapshot);
  log << "phi range [" << format_real(result.phi_min) << ", " << format_real(result.phi_max) << "] over "
      << result.steps << " steps\n";
  if (spec.write_csv) {
    std::ofstream csv(dir.path("stirring.csv", out), std::ios::binary);
    csv << "t,total_variation,l1_change,phi_min,phi_max\n";
    for (const auto& r : rows) csv << r << '\n';
    if (!csv) throw std::runtime_error("failed to write stirring.csv");
  }
}

}  // namespace

RunOutputs execute(const RunSpec& spec, std::ostream& log) {
  RunOutputs out;
  const OutputDir dir(spec.out_dir);
  switch (spec.subcommand) {
    case Subcommand::none:
      throw ConfigError("subcommand required (converge, stability, stir or run)");

    case Subcommand::converge: {
      const ErrorReport report = run_convergence(spec.config, spec.tau_list);
      log_report(report, log);
      if (spec.write_csv) write_csv_table(report, dir.path("convergence.csv", out));
      break;
    }

    case Subcommand::stability: {
      for (const auto& series : run_stability(spec.config, spec.tau_list)) {
        log << "tau " << tag(series.tau) << "  E0 " << format_real(series.records.front().energy) << "  E_N "
            << format_real(series.records.back().energy) << '\n';
        if (spec.write_csv) write_energy_series(series, dir.path("energy_tau" + tag(series.tau) + ".csv", out));
      }
      break;
    }

    case Subcommand::stir:
      write_stirring(spec, spec.snapshot_times, dir, out, log, false);
      break;

    case Subcommand::run: {
      if (spec.problem == Problem::stirring) {
        write_stirring(spec, {spec.config.time_step() * spec.config.steps()}, dir, out, log, true);
        break;
      }
      Config config = spec.config;
      std::pair<State, PreparedSystems> init;
      if (spec.problem == Problem::manufactured) {
        config.momentum_force = [config](Point x, double t) { return manufactured_forcing(t, x, config).f; };
        config.angular_force = [config](Point x, double t) { return manufactured_forcing(t, x, config).g; };
        init = init_stepper(
            config, [](Point x) { return exact_solution(0.0, x).u; }, [](Point x) { return exact_solution(0.0, x).w; });
      } else {
        init = init_stepper(config, stability_initial_velocity, stability_initial_angular);
      }
      auto& [state0, systems] = init;
      State last;
      const EnergySeries series = record_trajectory(state0, systems, config, [&](const State& s) { last = s; });
      log << "steps " << series.records.size() - 1 << "  E_N " << format_real(series.records.back().energy)
          << "  q_N " << format_real(last.q) << '\n';
      if (spec.write_csv) write_energy_series(series, dir.path("energy.csv", out));
      if (spec.problem == Problem::manufactured) {
        ErrorReport report{{compute_errors(last, systems, config)}};
        log_report(report, log);
        if (spec.write_csv) write_csv_table(report, dir.path("errors.csv", out));
      }
      if (spec.write_vtk) {
        write_vtk_field(snapshot_fields(Field{}, last.u, last.w), dir.path("final.vtk", out));
      }
      break;
    }
  }
  return out;
}

}  // namespace mns
