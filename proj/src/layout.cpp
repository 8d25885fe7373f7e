#include "rca/layout.hpp"

#include <cmath>
#include <string>

#include "rca/errors.hpp"

namespace rca {

void DipoleSpec::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("DipoleSpec: length must be positive");
  }
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw DomainError("DipoleSpec: wavelength must be positive");
  }
}

LoadConfig LoadConfig::short_circuit(int coupler_count, double sign) {
  return uniform(coupler_count, Complex(0.0, 0.0), sign);
}

LoadConfig LoadConfig::uniform(int coupler_count, Complex load, double sign) {
  LoadConfig cfg;
  cfg.loads.assign(static_cast<size_t>(coupler_count), load);
  cfg.sign_convention = sign;
  return cfg;
}

LoadConfig LoadConfig::reactive(const std::vector<double>& reactances, double sign) {
  LoadConfig cfg;
  cfg.loads.reserve(reactances.size());
  for (double x : reactances) cfg.loads.emplace_back(0.0, x);
  cfg.sign_convention = sign;
  return cfg;
}

void LoadConfig::validate(int expected_count) const {
  if (static_cast<int>(loads.size()) != expected_count) {
    throw DomainError("LoadConfig: expected " + std::to_string(expected_count) +
                      " loads, got " + std::to_string(loads.size()));
  }
  if (sign_convention != 1.0 && sign_convention != -1.0) {
    throw DomainError("LoadConfig: sign_convention must be +1 or -1");
  }
}

void validate_structure(const ArrayLayout& layout) {
  if (layout.active_positions.empty()) {
    throw ConfigError("ArrayLayout: at least one active antenna required");
  }
  if (layout.coupler_positions.size() != layout.coupler_owner.size()) {
    throw ConfigError("ArrayLayout: coupler_owner size mismatch");
  }
  for (int owner : layout.coupler_owner) {
    if (owner < 0 || owner >= layout.active_count()) {
      throw ConfigError("ArrayLayout: coupler_owner index out of range");
    }
  }
  if (!(layout.region_half_width > 0.0) && layout.coupler_count() > 0) {
    throw ConfigError("ArrayLayout: region_half_width must be positive");
  }
  if (!(layout.d_min >= 0.0)) {
    throw ConfigError("ArrayLayout: d_min must be nonnegative");
  }
}

std::optional<std::string> feasibility_violation(const ArrayLayout& layout) {
  const int n = layout.coupler_count();
  const double limit = layout.d_min - kFeasibilitySlack;
  const double plane_z = layout.active_positions.front().z();

  for (int i = 0; i < n; ++i) {
    const Vec3& p = layout.coupler_positions[static_cast<size_t>(i)];
    const Vec3& c = layout.owner_center(i);
    if (std::abs(p.z() - plane_z) > 1e-12) {
      return "coupler " + std::to_string(i) + " off the movement plane";
    }
    const double dx = std::abs(p.x() - c.x());
    const double dy = std::abs(p.y() - c.y());
    if (dx > layout.region_half_width + kFeasibilitySlack ||
        dy > layout.region_half_width + kFeasibilitySlack) {
      return "coupler " + std::to_string(i) + " outside its movement region";
    }
  }
  for (size_t a = 0; a < layout.active_positions.size(); ++a) {
    if (std::abs(layout.active_positions[a].z() - plane_z) > 1e-12) {
      return "active " + std::to_string(a) + " off the movement plane";
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = (layout.coupler_positions[static_cast<size_t>(i)] -
                        layout.coupler_positions[static_cast<size_t>(j)])
                           .norm();
      if (d < limit) {
        return "couplers " + std::to_string(i) + " and " + std::to_string(j) +
               " closer than d_min";
      }
    }
    for (int a = 0; a < layout.active_count(); ++a) {
      const double d = (layout.coupler_positions[static_cast<size_t>(i)] -
                        layout.active_positions[static_cast<size_t>(a)])
                           .norm();
      if (d < limit) {
        return "coupler " + std::to_string(i) + " and active " + std::to_string(a) +
               " closer than d_min";
      }
    }
  }
  return std::nullopt;
}

bool is_feasible(const ArrayLayout& layout) {
  return !feasibility_violation(layout).has_value();
}

void require_feasible(const ArrayLayout& layout) {
  validate_structure(layout);
  if (auto why = feasibility_violation(layout)) {
    throw SpacingError("infeasible layout: " + *why);
  }
}

ArrayLayout fixed_coupler_layout(int rca_count, int couplers_per_rca,
                                 double rca_spacing, double coupler_spacing,
                                 double region_half_width, double d_min) {
  std::vector<Vec3> couplers;
  couplers.reserve(static_cast<size_t>(rca_count * couplers_per_rca));
  const int half = couplers_per_rca / 2;
  for (int m = 0; m < rca_count; ++m) {
    const double cx = m * rca_spacing;
    for (int j = -half; couplers.size() < static_cast<size_t>((m + 1) * couplers_per_rca); ++j) {
      if (j == 0) continue;
      couplers.emplace_back(cx + j * coupler_spacing, 0.0, 0.0);
    }
  }
  return layout_with_couplers(rca_count, couplers_per_rca, rca_spacing, couplers,
                              region_half_width, d_min);
}

ArrayLayout layout_with_couplers(int rca_count, int couplers_per_rca,
                                 double rca_spacing, const std::vector<Vec3>& couplers,
                                 double region_half_width, double d_min) {
  ArrayLayout layout;
  layout.active_positions.reserve(static_cast<size_t>(rca_count));
  for (int m = 0; m < rca_count; ++m) {
    layout.active_positions.emplace_back(m * rca_spacing, 0.0, 0.0);
  }
  layout.coupler_positions = couplers;
  layout.coupler_owner.reserve(couplers.size());
  for (size_t i = 0; i < couplers.size(); ++i) {
    layout.coupler_owner.push_back(couplers_per_rca > 0
                                       ? static_cast<int>(i) / couplers_per_rca
                                       : 0);
  }
  layout.region_half_width = region_half_width;
  layout.d_min = d_min;
  validate_structure(layout);
  return layout;
}

}  // namespace rca
