#pragma once

#include "subres/geometry.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace subres::cli {

inline constexpr int kSchemaVersion = 1;

struct ContourSettings {
  int n_quad = 48;
  int max_rank = 6;
};

struct SweepSettings {
  double epsilon = 0.05;
  double kappa_sq_min_factor = 0.5;  // times 1/lambda_1
  double kappa_sq_max_factor = 1.5;
  int points = 200;
  Vec3 source{2.0, 0.0, 0.0};
  Vec3 observation{0.0, 3.0, 0.0};
};

struct RunConfig {
  DomainKind domain = BallKind{1.0, 8};
  std::vector<int> resolutions;       // spectrum: overrides the domain resolution
  std::vector<double> epsilons{0.0};
  double r_factor = 1.2;              // r = r_factor / lambda_1
  double cluster_tol = 1e-2;
  std::vector<int> clusters;          // empty: every cluster in range
  ContourSettings contour;
  SweepSettings sweep;
  int oracle_l_max = 3;
  int oracle_n_max = 3;
  int partial_modes = 20;             // spectrum on meshes too large for dense storage
  std::string output_dir = "subres_out";
  unsigned seed = 1;
  int bound_samples = 200;
  std::string resonances_file;        // localize: cached resonance CSV
};

// Parses and validates a JSON config; unknown keys and bad values throw ConfigError.
RunConfig parse_config(const std::string& json_text);

DiscreteDomain build_domain(const DomainKind& kind);

// Entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace subres::cli
