#pragma once

#include "mns/run_config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace mns {

/// Files written by execute(), relative paths joined onto out_dir.
struct RunOutputs {
  std::vector<std::string> files;
};

/// Runs a validated spec and writes its outputs under spec.out_dir:
///   converge   convergence.csv
///   stability  energy_tau<tau>.csv per step size
///   stir       stirring.csv, stir_t<t>.vtk per snapshot
///   run        energy.csv, errors.csv (manufactured), final.vtk
/// Progress lines go to `log`.
RunOutputs execute(const RunSpec& spec, std::ostream& log);

}  // namespace mns
