#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "grasslag/hypersurface.hpp"

namespace grasslag {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  CoefficientVector cv = CoefficientVector::preset("eq1");
  std::string preset = "eq1";  // eq1, eq7, eq8, or custom
  size_t n = 200;              // sample size / base count for fibration
  uint64_t seed = 1;
  size_t starts = 2000;        // multistart count per chart
  double tol_scale = 1.0;      // scales verification tolerances
  size_t m_fiber = 64;         // points per fiber
  std::string out_dir = ".";
};

// Flat key=value file: c0..c5 (rational strings, all six required), and
// optionally n, seed, starts, tol_scale, m_fiber, out. '#' starts a comment.
// Throws ConfigError on malformed input.
RunConfig parse_config_file(const std::string& path);

struct VerifyHooks {
  bool inject_off_locus = false;  // corrupts one sampled point; the run must then fail
};

// Each command writes report.json (and its data files) under cfg.out_dir and
// returns the process exit code: 0 pass, 1 verification failure,
// 2 nonconvergence. Configuration problems throw ConfigError (exit 3).
int cmd_atlas_check(std::ostream& log, const RunConfig& cfg, bool corrupt_transition = false);
int cmd_smoothness(std::ostream& log, const RunConfig& cfg);
int cmd_sample(std::ostream& log, const RunConfig& cfg);
int cmd_verify(std::ostream& log, const RunConfig& cfg, const VerifyHooks& hooks = {});
int cmd_fibration(std::ostream& log, const RunConfig& cfg);

}  // namespace grasslag
