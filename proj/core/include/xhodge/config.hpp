#pragma once

// Run configuration: a flat "key = value" text format with '#' comments.
//
//   scenario = ball_tangential_free
//   L = 4
//   n = 48
//   shape = ball            # none | ball | torus, or: obstacle = ball(0,0,0;1)
//   radius = 1
//   flavor = tangential
//   far = free
//   field.kind = ball_grad_q0
//   field.a = 1

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "xhodge/decompose.hpp"

namespace xhodge {

struct FieldSpec {
  /// zero | uniform | ball_q0 | ball_grad_q0 | q0_grad | biot_savart_loop | solenoidal_bump |
  /// gradient_bump | point_source | fourier | probe | discrete_curl_bump | discrete_gradient_bump.
  /// The discrete kinds apply the grid curl / gradient to a sampled bump potential.
  std::string kind = "zero";
  int axis = 2;
  double a = 1.0;
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;
  Vec3 direction{0.0, 0.0, 1.0};
  double radius = 1.2;
  Vec3 loop_axis{0.0, 0.0, 1.0};
  int segments = 512;
  int modes = 4;
  int index = 0;  ///< probe-suite member for kind = probe
};

struct RunConfig {
  std::string scenario = "default";
  DomainSpec domain;
  HarmonicFlavor flavor = HarmonicFlavor::NormalHarmonic;
  FarMode far = FarMode::NaturalNeumann;
  std::vector<double> r_list{1.5, 2.0, 3.0};
  int probes = 12;
  double svd_tol = 1e-3;
  std::uint64_t seed = 42;
  int axis = 2;  ///< translation-harmonics axis
  SolveOptions solver;
  FieldSpec field;
  std::vector<std::pair<int, double>> grids{{32, 4.0}, {48, 4.0}, {64, 4.0}, {48, 8.0}};
  std::string input;
  std::string out_dir = ".";

  /// Far mode actually used by the decomposition (normal flavor forces NaturalNeumann).
  FarMode effective_far() const;
};

/// Applies one setting; unknown keys and malformed values throw ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig parse_config(std::istream& is, const std::string& source = "<config>", RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Checks cross-field consistency (flavor/far pairing, tolerances, grid sizes).
void validate(const RunConfig& cfg);

std::vector<double> parse_number_list(const std::string& s);
Vec3 parse_vec3(const std::string& s);
int parse_axis(const std::string& s);

/// Samples the configured field on topo. q0_grad solves for q0 with the given options.
FaceField generate_field(const TopologyPtr& topo, const FieldSpec& spec, std::uint64_t seed,
                         const SolveOptions& opts = {});
ScalarField generate_scalar_field(const TopologyPtr& topo, const FieldSpec& spec);

}  // namespace xhodge
