#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace freeconv {

/// A density sampled on sorted nodes. Beyond the last node the density is
/// closed off by the power law values.back() * (x / nodes.back())^tail_exponent
/// (and symmetrically on the left for densities that extend to -infinity).
/// For densities on (0, inf) the optional head_exponent closes (0, nodes[0])
/// with values[0] * (x / nodes[0])^head_exponent.
struct GriddedDensity {
  std::vector<double> nodes;
  std::vector<double> values;
  std::optional<double> tail_exponent;
  std::optional<double> head_exponent;

  /// Throws DomainError on unsorted nodes, size mismatch or negative values.
  void validate() const;

  bool positive_support() const { return !nodes.empty() && nodes.front() > 0.0; }

  /// Linear interpolation inside the grid, power-law closures outside.
  double operator()(double x) const;

  /// Trapezoid mass plus analytic closure masses. Positive-support grids are
  /// integrated as x*f(x) over log x, which is far more accurate on the
  /// log-spaced grids used for heavy tails.
  double mass() const;

  std::string to_csv() const;
  static GriddedDensity from_csv(const std::string& text);
};

void to_json(nlohmann::json& j, const GriddedDensity& d);
void from_json(const nlohmann::json& j, GriddedDensity& d);

}  // namespace freeconv
