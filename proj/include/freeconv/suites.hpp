#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "freeconv/divisibility.hpp"
#include "json.hpp"

namespace freeconv {

enum class OutputFormat { json, csv };

struct GridConfig {
  double x_min = -10.0, x_max = 10.0;
  int nx = 81;
  double y_min = 1e-2, y_max = 1e2;
  int ny = 24;
};

/// Tolerances, FID grid, output format, worker count and seed shared by the
/// CLI and the acceptance runner.
struct RunConfig {
  std::map<std::string, double> tolerances = default_tolerances();
  GridConfig grid;
  OutputFormat output_format = OutputFormat::json;
  int parallelism = 4;
  std::uint64_t seed = 20240607;
  int mixture_nodes = 40;

  static std::map<std::string, double> default_tolerances();

  /// Throws DomainError on non-positive tolerances, counts below 2 or a
  /// non-positive worker count.
  void validate() const;
  double tol(const std::string& name) const;
  FidGridSpec fid_grid() const;

  /// Defaults, overridden by the JSON file named in FREECONV_CONFIG if set.
  static RunConfig from_env();
  static RunConfig from_file(const std::string& path);
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::json detail;
  double seconds = 0.0;
};

void to_json(nlohmann::json& j, const CriterionResult& r);

constexpr int kCriterionCount = 11;

/// Runs one acceptance criterion (1..11). Exceptions inside a check count as
/// a failure and are reported in the detail.
CriterionResult run_criterion(int id, const RunConfig& cfg);

const std::vector<std::string>& suite_names();
/// Criterion ids making up a suite; throws DomainError for unknown names.
std::vector<int> suite_criteria(const std::string& suite);

struct SuiteReport {
  std::string suite;
  std::vector<CriterionResult> results;
  bool passed = false;
};

void to_json(nlohmann::json& j, const SuiteReport& r);

SuiteReport run_suite(const std::string& suite, const RunConfig& cfg);

/// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace freeconv
