#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rca/types.hpp"

namespace rca {

// Geometry of an RCA array: fixed active dipoles plus movable passive
// couplers.  All dipoles are parallel to the z axis with their centers in a
// common z = const plane; couplers translate in x-y only, each inside a
// square region (∞-norm) centered on its owning active antenna.
struct ArrayLayout {
  std::vector<Vec3> active_positions;   // meters
  std::vector<Vec3> coupler_positions;  // meters
  std::vector<int> coupler_owner;       // RCA index per coupler
  double region_half_width = 0.0;       // meters
  double d_min = 0.0;                   // min coupler-coupler / coupler-active spacing, meters

  int active_count() const { return static_cast<int>(active_positions.size()); }
  int coupler_count() const { return static_cast<int>(coupler_positions.size()); }
  int port_count() const { return active_count() + coupler_count(); }

  const Vec3& owner_center(int coupler) const {
    return active_positions[static_cast<size_t>(coupler_owner[static_cast<size_t>(coupler)])];
  }
};

// Distance slack used by every feasibility predicate: a spacing of
// d_min - 1e-9 m still counts as feasible.
inline constexpr double kFeasibilitySlack = 1e-9;

// Structural validation (sizes, owner indices, positive region/d_min);
// throws ConfigError.
void validate_structure(const ArrayLayout& layout);

// nullopt when all invariants hold; otherwise a message naming the offending
// coupler or pair.  Checks region membership, coplanarity and min spacing.
std::optional<std::string> feasibility_violation(const ArrayLayout& layout);

bool is_feasible(const ArrayLayout& layout);

// throws SpacingError naming the violation
void require_feasible(const ArrayLayout& layout);

// ULA of RCAs along x with couplers evenly spaced on the same line around
// their active antenna — the fixed-position-coupler baseline geometry.
// For N couplers the offsets are coupler_spacing * j with
// j in {-floor(N/2), ..., -1, 1, ..., N - floor(N/2)}.
ArrayLayout fixed_coupler_layout(int rca_count, int couplers_per_rca,
                                 double rca_spacing, double coupler_spacing,
                                 double region_half_width, double d_min);

// Same ULA of actives with coupler positions supplied explicitly (owner
// inferred from ordering: coupler i belongs to RCA i / couplers_per_rca).
ArrayLayout layout_with_couplers(int rca_count, int couplers_per_rca,
                                 double rca_spacing, const std::vector<Vec3>& couplers,
                                 double region_half_width, double d_min);

}  // namespace rca
