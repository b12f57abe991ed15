#include "freeconv/gridded_density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "freeconv/errors.hpp"

namespace freeconv {

void GriddedDensity::validate() const {
  if (nodes.size() != values.size()) throw DomainError("GriddedDensity: nodes/values size mismatch");
  if (nodes.size() < 2) throw DomainError("GriddedDensity: need at least two nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw DomainError("GriddedDensity: nodes must be strictly increasing");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("GriddedDensity: values must be finite and >= 0");
}

double GriddedDensity::operator()(double x) const {
  if (nodes.empty()) return 0.0;
  if (x >= nodes.front() && x <= nodes.back()) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    if (it == nodes.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    const double t = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return (1.0 - t) * values[i - 1] + t * values[i];
  }
  if (x > nodes.back()) {
    if (!tail_exponent || nodes.back() <= 0.0) return 0.0;
    return values.back() * std::pow(x / nodes.back(), *tail_exponent);
  }
  if (positive_support()) {
    if (!head_exponent || x <= 0.0) return 0.0;
    return values.front() * std::pow(x / nodes.front(), *head_exponent);
  }
  if (!tail_exponent || nodes.front() >= 0.0) return 0.0;
  return values.front() * std::pow(x / nodes.front(), *tail_exponent);
}

double GriddedDensity::mass() const {
  validate();
  double m = 0.0;
  if (positive_support()) {
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double du = std::log(nodes[i] / nodes[i - 1]);
      m += 0.5 * du * (values[i] * nodes[i] + values[i - 1] * nodes[i - 1]);
    }
    if (head_exponent && *head_exponent > -1.0) m += values.front() * nodes.front() / (*head_exponent + 1.0);
  } else {
    for (std::size_t i = 1; i < nodes.size(); ++i) m += 0.5 * (nodes[i] - nodes[i - 1]) * (values[i] + values[i - 1]);
    if (tail_exponent && *tail_exponent < -1.0 && nodes.front() < 0.0)
      m += values.front() * std::abs(nodes.front()) / (-*tail_exponent - 1.0);
  }
  if (tail_exponent && *tail_exponent < -1.0 && nodes.back() > 0.0)
    m += values.back() * nodes.back() / (-*tail_exponent - 1.0);
  return m;
}

std::string GriddedDensity::to_csv() const {
  std::string out = "x,density\n";
  char buf[64];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", nodes[i], values[i]);
    out += buf;
  }
  return out;
}

GriddedDensity GriddedDensity::from_csv(const std::string& text) {
  GriddedDensity d;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("x,", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("GriddedDensity CSV: expected 'x,density' rows");
    d.nodes.push_back(std::stod(line.substr(0, comma)));
    d.values.push_back(std::stod(line.substr(comma + 1)));
  }
  d.validate();
  return d;
}

void to_json(nlohmann::json& j, const GriddedDensity& d) {
  j = nlohmann::json{{"nodes", d.nodes}, {"values", d.values}};
  j["tail_exponent"] = d.tail_exponent ? nlohmann::json(*d.tail_exponent) : nlohmann::json(nullptr);
  if (d.head_exponent) j["head_exponent"] = *d.head_exponent;
}

void from_json(const nlohmann::json& j, GriddedDensity& d) {
  j.at("nodes").get_to(d.nodes);
  j.at("values").get_to(d.values);
  d.tail_exponent.reset();
  d.head_exponent.reset();
  if (j.contains("tail_exponent") && !j["tail_exponent"].is_null()) d.tail_exponent = j["tail_exponent"].get<double>();
  if (j.contains("head_exponent") && !j["head_exponent"].is_null()) d.head_exponent = j["head_exponent"].get<double>();
  d.validate();
}

}  // namespace freeconv
