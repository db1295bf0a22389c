#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dps/lattice.hpp"
#include "dps/parallel.hpp"

namespace dps {

// One comparison inside a verification suite: `value` is checked against
// `bound` and `detail` says how.
struct SuiteCheck {
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::uint64_t seed = 0;
  std::vector<SuiteCheck> checks;
};

// Overrides for the suite defaults; unset fields use each suite's own
// configuration. `trials` counts samples (or trials per dither for suites that
// iterate over dithers), `dithers` counts dithers.
struct SuiteOptions {
  std::optional<Lattice> lattice;
  std::optional<double> sigma_s;
  std::optional<double> epsilon;
  std::optional<double> snr;
  std::uint64_t trials = 0;
  std::uint64_t dithers = 0;
  RunOptions run;
};

const std::vector<std::string>& suite_names();

// Throws UsageError for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& options = {});

}  // namespace dps
