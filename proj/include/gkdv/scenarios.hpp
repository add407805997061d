#pragma once

#include <string>
#include <vector>

namespace gkdv {

// One named end-to-end check over the library, reported as a pass flag
// plus printable detail lines.  All numbers are formatted with 17
// significant digits and every computation is deterministic for a fixed
// seed, so repeated runs produce byte-identical reports.
struct ScenarioReport {
  std::string name;
  bool pass = true;
  std::vector<std::string> lines;
};

const std::vector<std::string>& scenario_names();

// Errc::invalid_argument for a name not in scenario_names().
ScenarioReport run_scenario(const std::string& name, unsigned long seed);

}  // namespace gkdv
