#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace rslab {

/// Outcome of one verification suite.  Findings are observations (for
/// example a bracket constant of 2 under the literal convention); they never
/// make a suite fail on their own.
struct SuiteReport {
  std::string id;
  std::string anchor;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::string> findings;
  std::size_t resampled = 0;
  std::map<std::string, double> metrics;
};

}  // namespace rslab
