#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rca/estimate.hpp"
#include "rca/layout.hpp"
#include "rca/optimize.hpp"
#include "rca/types.hpp"

namespace rca {

enum class Scheme { RcaOptimized, FixedCouplers, Espar, FullyActive };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);  // throws ConfigError

struct EstimatorConfig {
  int azimuth_bins = 64;
  int elevation_bins = 16;
  int sparsity = 3;
  int snapshots = 12;            // default 4*sparsity
  double noise_variance = 0.0;   // watts
  bool on_grid = false;          // snap truth directions to the grid
  int holdout_layouts = 50;

  AngleGrid grid() const;
};

struct GainMapConfig {
  int resolution = 101;
  int coupler_index = 0;
};

struct PlannerConfig {
  double speed = 0.05;  // m/s
};

// Everything a run needs; JSON round-trippable.  Lengths scale with the
// wavelength unless given explicitly.
struct Scenario {
  double wavelength = 0.04;   // meters
  int rca_count = 3;          // M
  int couplers_per_rca = 2;   // N
  int path_count = 13;        // L

  double rca_spacing;           // default 1.0 λ (adjacent movement regions tangent)
  double region_half_width;     // default 1.0 λ
  double d_min;                 // default 0.1 λ
  double dipole_length;         // default 0.5 λ
  double fixed_coupler_spacing; // default 0.4 λ
  double fully_active_spacing;  // default 0.5 λ

  double noise_power = 1e-11;        // watts
  std::vector<double> tx_powers_w;   // default 10 points log-spaced in [1e-3, 10]

  int seeds = 4;
  std::uint64_t master_seed = 1;
  std::vector<Scheme> schemes = {Scheme::RcaOptimized, Scheme::FixedCouplers, Scheme::Espar,
                                 Scheme::FullyActive};

  double sign_convention = -1.0;
  Complex coupler_load = Complex(0.0, 0.0);  // fixed-coupler termination
  ReactanceBounds espar_bounds{-300.0, 300.0};

  OptimizationConfig optimizer;
  EstimatorConfig estimator;
  GainMapConfig gainmap;
  PlannerConfig planner;

  DipoleSpec dipole() const { return DipoleSpec{dipole_length, wavelength}; }
  ArrayLayout fixed_layout() const;
  LoadConfig fixed_loads() const;

  void validate() const;  // throws ConfigError naming the field

  static Scenario defaults();
};

// Strict JSON ingestion: unknown keys are rejected, missing keys take the
// documented defaults, every field is validated.  Parse errors carry the
// byte position the parser reported.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace rca
