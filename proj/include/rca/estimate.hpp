#pragma once

#include <cstdint>
#include <vector>

#include "rca/channel.hpp"
#include "rca/layout.hpp"
#include "rca/types.hpp"

namespace rca {

// One pilot snapshot: the coupler geometry and loads it was taken with, and
// the single-RF-chain observation (the sum of the effective channel over the
// active ports).
struct MeasurementRecord {
  ArrayLayout layout;
  LoadConfig loads;
  Complex observation;
};

struct MeasurementSet {
  std::vector<MeasurementRecord> records;
  double noise_variance = 0.0;  // watts
};

// Observation per snapshot: Σ_m h_eff,m plus circular Gaussian noise of the
// given variance.  Deterministic per seed.
MeasurementSet synthesize_measurements(const PathSet& truth,
                                       const std::vector<ArrayLayout>& layouts,
                                       const LoadConfig& loads, const DipoleSpec& spec,
                                       double noise_variance, std::uint64_t seed);

// Direction dictionary for the sparse recovery: bin midpoints over the
// azimuth/elevation ranges the path sampler draws from.
struct AngleGrid {
  int azimuth_bins = 64;
  int elevation_bins = 16;
  double azimuth_min = 0.0;
  double azimuth_max = 2.0 * kPi;
  double elevation_min = -kPi / 3.0;
  double elevation_max = kPi / 3.0;

  int size() const { return azimuth_bins * elevation_bins; }
  double azimuth(int i) const {
    return azimuth_min + (azimuth_max - azimuth_min) * (i + 0.5) / azimuth_bins;
  }
  double elevation(int j) const {
    return elevation_min + (elevation_max - elevation_min) * (j + 0.5) / elevation_bins;
  }
  int index(int i, int j) const { return j * azimuth_bins + i; }
  double azimuth_of(int index) const { return azimuth(index % azimuth_bins); }
  double elevation_of(int index) const { return elevation(index / azimuth_bins); }

  // nearest grid point to an arbitrary direction (used to generate on-grid
  // ground truth in experiments)
  int snap(double az, double el) const;

  void validate() const;  // throws ConfigError
};

struct EstimatedPaths {
  std::vector<Path> paths;        // selected directions with refit gains
  std::vector<int> grid_indices;  // dictionary index per path
  double large_scale_gain = 1.0;
  double residual = 0.0;  // squared norm of the unexplained measurement part

  PathSet as_pathset() const { return PathSet{paths, large_scale_gain}; }
};

// Greedy matching pursuit over the grid dictionary.  Each atom is the
// measurement-stack response of a unit-gain path at that grid direction,
// computed through the full coupling model of each snapshot; gains are refit
// by least squares after every selection.  Because the dictionary is highly
// coherent (fixed active ports, elevation-sign ambiguity of a planar array),
// the support is grown by smallest post-refit residual from a beam of first
// atoms and then refined by atom replacement until the fit stops improving.
// Requires at least 2*sparsity records; throws ConditioningError when the
// selected sub-dictionary is rank deficient.
EstimatedPaths recover_paths(const MeasurementSet& measurements, const AngleGrid& grid,
                             int sparsity, const DipoleSpec& spec);

// Effective channel at an arbitrary (feasible) layout from the estimated
// paths, through the same coupling model used everywhere else.
EffectiveChannel reconstruct_channel(const EstimatedPaths& estimate, const ArrayLayout& layout,
                                     const LoadConfig& loads, const DipoleSpec& spec);

}  // namespace rca
