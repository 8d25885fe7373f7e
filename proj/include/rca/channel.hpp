#pragma once

#include <cstdint>
#include <vector>

#include "rca/impedance.hpp"
#include "rca/layout.hpp"
#include "rca/types.hpp"

namespace rca {

// One plane-wave component of a multipath channel.
struct Path {
  double azimuth;    // radians
  double elevation;  // radians
  Complex gain;      // dimensionless complex amplitude

  Vec3 direction() const {
    const double ce = std::cos(elevation);
    return Vec3(ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation));
  }
};

struct PathSet {
  std::vector<Path> paths;
  double large_scale_gain = 1.0;  // common amplitude factor γ across all ports
};

// L paths with azimuth uniform on [0, 2π), elevation uniform on [-π/3, π/3],
// i.i.d. circular Gaussian gains scaled so Σ E|g|² = 1.  Deterministic per
// seed.  L must be >= 1.
PathSet sample_pathset(int path_count, std::uint64_t seed);

// Superposition channel amplitude at a port position q:
//   h(q) = γ Σ_ℓ g_ℓ exp(j (2π/λ) ⟨u_ℓ, q⟩)
Complex port_channel(const PathSet& ps, const Vec3& position, double wavelength);

struct EffectiveChannel {
  CVector h_eff;  // length M, one entry per active port
};

// Fixed geometry and loads with the weight solve done once; effective
// channels for any number of path sets are then cheap.  This is what the
// estimation dictionary and the gain-map sweep build on.
class CoupledArray {
 public:
  CoupledArray(const ArrayLayout& layout, const LoadConfig& loads, const DipoleSpec& spec);

  const MechanicalWeights& weights() const { return weights_; }
  const ArrayLayout& layout() const { return layout_; }

  // h_effᵀ = h_aᵀ + h_cᵀ W: direct active-port channels plus coupler
  // re-radiation through the induced-current weights.
  EffectiveChannel effective_channel(const PathSet& ps) const;

 private:
  ArrayLayout layout_;
  DipoleSpec spec_;
  MechanicalWeights weights_;
};

EffectiveChannel effective_channel(const ArrayLayout& layout, const PathSet& ps,
                                   const LoadConfig& loads, const DipoleSpec& spec);

struct LinkBudget {
  double snr;   // linear
  double rate;  // bits/s/Hz
};

// Unit-norm maximum-ratio excitation across active ports:
//   snr = tx_power ‖h_eff‖² / noise_power,  rate = log₂(1 + snr)
LinkBudget snr_and_rate(const EffectiveChannel& h, double tx_power_w, double noise_power_w);

struct GainMap {
  RVector xs, ys;                // cell centers, meters
  Eigen::MatrixXd gain_db;       // indexed (iy, ix); NaN on masked cells
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> masked;

  int strict_local_maxima() const;              // interior unmasked cells above all 8 neighbors
  double spread_db() const;                     // max - min over unmasked cells
};

// Channel power gain 10 log₁₀ ‖h_eff‖² as coupler_index sweeps a
// resolution × resolution grid over its owner's square region, every other
// port fixed.  Cells violating the region or d_min predicate are masked.
GainMap gain_map(const ArrayLayout& layout, const PathSet& ps, const LoadConfig& loads,
                 const DipoleSpec& spec, int coupler_index, int grid_resolution);

}  // namespace rca
