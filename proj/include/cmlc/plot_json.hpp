#pragma once

// Plot-data JSON for external plotting tools. Kept out of sweep.hpp so the
// json dependency is only paid by translation units that emit plots.

#include <fstream>
#include <string>

#include <json.hpp>

#include "cmlc/sweep.hpp"

namespace cmlc {

// Schema (format 1):
//   { "format": 1, "dataset": str, "family": "binomial"|"polynomial",
//     "parameters": [..], "series": [ {"method": str, "losses": [..]} ] }
// Series appear in method-name order; losses align with "parameters".
inline nlohmann::ordered_json plot_json(const SweepResult& result) {
  nlohmann::ordered_json doc;
  doc["format"] = 1;
  doc["dataset"] = result.dataset;
  doc["family"] = SweepSpec::family_name(result.family);

  std::vector<double> parameters;
  std::vector<std::string> methods;
  for (const auto& row : result.rows) {
    if (parameters.empty() || parameters.back() != row.parameter)
      parameters.push_back(row.parameter);
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
      methods.push_back(row.method);
  }
  doc["parameters"] = parameters;
  doc["series"] = nlohmann::ordered_json::array();
  for (const auto& method : methods) {
    nlohmann::ordered_json series;
    series["method"] = method;
    std::vector<double> losses;
    for (const auto& row : result.rows)
      if (row.method == method) losses.push_back(row.mean_loss);
    series["losses"] = losses;
    doc["series"].push_back(std::move(series));
  }
  return doc;
}

inline void write_plot_json(const std::string& path,
                            const SweepResult& result) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << plot_json(result).dump(2) << '\n';
  if (!file) throw std::runtime_error("failed writing " + path);
}

}  // namespace cmlc
