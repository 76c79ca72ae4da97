#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "symgap/valuation.hpp"

namespace symgap {

enum class ParamType { integer, real, text, flag };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::integer;
  Json fallback;  // default value
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
};

// Every runnable experiment, in suite order.
const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment_info(const std::string& name);

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // Experiment parameters; missing entries take their defaults, unknown
  // names are a usage error.
  Json params = Json::object();
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string experiment;
  Json params;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  Json metrics = Json::object();
  std::vector<Assertion> assertions;
  // Raw samples for plotting; header line first. May be empty.
  std::string csv;

  bool pass() const;
  Json to_json() const;
  // Byte-stable rendering of to_json().
  std::string dump() const;
};

Report run_experiment(const ExperimentConfig& config);

// The report's CSV series, or just the header when it carries none.
std::string emit_plot_data(const Report& report);

// Default header of an empty plot-data CSV.
inline constexpr const char* kPlotHeader = "series,x,y,value";

}  // namespace symgap
