#pragma once

// Built-in scenarios: sample spaces, function bundles and verification plans.

#include "bairext/baire_pipeline.hpp"
#include "bairext/verify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bairext {

struct ScenarioParams {
  int grid = 201;               // samples per axis
  Norm norm = Norm::l2;
  std::optional<SpaceMode> mode;  // pipeline mode; scenario default when unset
  int steps = 12;               // approach path length
  double d0 = 1.0 / 64.0;       // first path distance; ratio 1/2
  double eps = 0.2;             // tangential ratio bound
};

struct BoundednessCase {
  Point a;
  double r = 0.0;
  std::optional<SupCertificate> certificate;
};

struct NtCase {
  ApproachPath path;
  TargetVector f_a;
};

struct BuiltScenario {
  std::string name;
  SampledSpace x;                  // X with H marked
  SampledSpace y;                  // H samples in h_indices() order, pipeline mode
  FunctionBundle bundle;           // tabulated over y
  int items = 0;
  std::vector<std::size_t> queries;          // samples of X outside H
  std::vector<NtCase> nt;
  std::vector<NtCase> continuity;            // f_a at declared continuity points
  std::vector<std::size_t> declared_continuity_h;  // positions in y
  bool continuity_points_isolated = false;  // singleton neighbourhoods are genuine
  std::vector<double> ucpc_eps;
  std::vector<BoundednessCase> boundedness;
  std::vector<std::string> warnings;
};

struct ScenarioInfo {
  std::string name;
  std::string title;
  std::string card;
};

const std::vector<ScenarioInfo>& scenario_table();
const ScenarioInfo& describe_scenario(const std::string& name);  // unknown_scenario on miss

BuiltScenario build_scenario(const std::string& name, const ScenarioParams& params);

/// Positions i/(n-1) * 2 - 1, i = 0..n-1, with the middle one exactly 0 for odd n.
std::vector<double> symmetric_axis(int n);

} // namespace bairext
