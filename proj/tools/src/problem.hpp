#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "salvage/real_fn.hpp"

namespace salvage::cli {

struct Tolerances {
  double quad_tol = 1e-10;
  double a_tol = 1e-10;
  std::size_t grid_points = 1024;
  std::size_t bins = 256;
  std::vector<std::size_t> n_schedule{64, 128, 256, 512, 1024};
};

struct ProblemSpec {
  std::string name;
  /// Domain as written (may have infinite ends).
  Interval declared_domain;
  /// Domain used for computation, after truncation of infinite ends.
  Interval domain;
  bool truncated = false;
  RealFn omega;
  RealFn g_prime;
  std::optional<RealFn> link;
  std::optional<std::size_t> link_branch;
  ParamMap params;
  Tolerances tol;
  /// Original text of each function, for reports.
  nlohmann::ordered_json source;
  std::vector<std::string> warnings;
};

/// Validates a problem document. Errors name the offending field,
/// e.g. "problem.tolerances.bins: expected a positive integer".
ProblemSpec parse_problem(const nlohmann::json& doc, std::string name = "problem");

/// Reads and validates a problem file.
ProblemSpec load_problem(const std::string& path);

const std::vector<std::string>& gallery_names();
bool is_gallery_name(const std::string& name);

/// Problem document for a named fixture. `z` only affects `gaussian`.
nlohmann::json gallery_document(const std::string& name, double z = 2.0);
ProblemSpec gallery_problem(const std::string& name, double z = 2.0);

/// Window used for an infinite domain: [-10, 10] grown by doubling until
/// |w| at the window ends is below 1e-18 of its peak.
Interval truncation_window(const RealFn& omega, const Interval& declared);

}  // namespace salvage::cli
