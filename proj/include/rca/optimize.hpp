#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rca/channel.hpp"
#include "rca/layout.hpp"
#include "rca/rng.hpp"
#include "rca/types.hpp"

namespace rca {

struct OptimizationConfig {
  int max_outer_iterations = 60;
  double step_init = 0.0;      // meters; 0 freezes coupler positions
  double armijo_shrink = 0.5;  // in (0,1)
  double armijo_slope = 1e-4;  // in (0,1)
  double tolerance = 1e-6;     // relative objective change for convergence
  int restarts = 8;            // given initialization + (restarts-1) random ones
  double fd_epsilon = 0.0;     // central-difference step, meters
  std::optional<double> quantization_step;  // meters
  std::uint64_t seed = 0;

  // throws ConfigError on invalid values
  void validate() const;

  static OptimizationConfig defaults_for(double wavelength);
};

struct OptimizationTrace {
  // Accepted objective per outer iteration; objectives[0] is the evaluation
  // of the initialization.  Nondecreasing by construction.
  std::vector<double> objectives;
  ArrayLayout final_layout;
  int restart_index_of_best = 0;
  long evaluations = 0;

  double final_objective() const { return objectives.back(); }
};

// Channel power gain ‖h_eff‖² — the SNR at unit transmit power over unit
// noise.  Every optimizer in this module ascends this quantity.
double channel_power_gain(const ArrayLayout& layout, const PathSet& ps,
                          const LoadConfig& loads, const DipoleSpec& spec);

// Couplers redrawn uniformly inside their owner regions until the projected
// draw is feasible (up to 64 attempts, then ProjectionError).
ArrayLayout random_feasible_layout(const ArrayLayout& base, Prng rng);

// Central finite-difference gradient of the channel power gain with respect
// to the stacked in-plane coupler coordinates (x0, y0, x1, y1, ...) — the
// same joint gradient the position optimizer steps along.
RVector position_gradient(const ArrayLayout& layout, const PathSet& ps,
                          const LoadConfig& loads, const DipoleSpec& spec, double fd_epsilon);

// Clamps every coupler into its owner region, then resolves pairwise
// min-distance violations by symmetric push-apart along the violating pair's
// axis (couplers split the correction; against a fixed active antenna the
// coupler takes all of it), iterating until feasible.  Idempotent on
// feasible input; throws ProjectionError after 50 rounds.
ArrayLayout project_feasible(const ArrayLayout& candidate);

// Projected block ascent over coupler positions: per outer iteration every
// coupler block contributes a central finite-difference gradient of the
// objective, the joint step is projected to feasibility and accepted by a
// shared Armijo backtracking line search.  Runs cfg.restarts times (the
// given layout first, then random feasible initializations) and returns the
// best trace; exact ties go to the lowest restart index.
OptimizationTrace optimize_positions(const ArrayLayout& initial, const PathSet& ps,
                                     const LoadConfig& loads, const DipoleSpec& spec,
                                     const OptimizationConfig& cfg);

struct QuantizationResult {
  ArrayLayout layout;
  double continuous_objective = 0.0;
  double quantized_objective = 0.0;
  double objective_loss = 0.0;  // continuous - quantized
};

// Snaps each coupler of the trace's final layout to the grid of pitch `step`
// anchored at its owner active antenna, re-projects to feasibility and
// reports the objective loss against the continuous solution.
QuantizationResult quantize_positions(const OptimizationTrace& trace, double step,
                                      const PathSet& ps, const LoadConfig& loads,
                                      const DipoleSpec& spec);

struct ReactanceBounds {
  double x_min = 0.0;  // ohms
  double x_max = 0.0;
};

struct LoadOptimum {
  LoadConfig loads;
  OptimizationTrace trace;
};

// ESPAR-style tuning: projected finite-difference ascent over per-coupler
// reactances in [x_min, x_max] at a fixed layout.  Restarts probe the zero
// reactance (when inside the bounds) and both bounds before random points,
// so the result dominates all three.  Step sizes are fractions of the bound
// width and independent of cfg.step_init (which only governs positions).
LoadOptimum optimize_loads(const ArrayLayout& layout, const PathSet& ps,
                           ReactanceBounds bounds, const DipoleSpec& spec,
                           const OptimizationConfig& cfg, double sign_convention = -1.0);

struct JointOptimum {
  ArrayLayout layout;
  LoadConfig loads;
  OptimizationTrace trace;
};

// Alternating position/load block passes.  Degenerate cases reduce exactly:
// collapsed bounds -> optimize_positions, step_init == 0 -> optimize_loads.
// Otherwise the position-only and load-only solutions seed two of the
// alternation starts, so the joint objective is never below either.
JointOptimum optimize_joint(const ArrayLayout& initial, const PathSet& ps,
                            ReactanceBounds bounds, const DipoleSpec& spec,
                            const OptimizationConfig& cfg);

// Ideal MN+M-element uniform line array (no mutual coupling) with
// maximum-ratio transmission: rate = log₂(1 + P ‖h‖² / σ²).
double baseline_fully_active_rate(int rca_count, int couplers_per_rca, double spacing,
                                  const PathSet& ps, double wavelength,
                                  double tx_power_w, double noise_power_w);

}  // namespace rca
