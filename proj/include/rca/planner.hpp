#pragma once

#include <vector>

#include "rca/layout.hpp"
#include "rca/types.hpp"

namespace rca {

// Initial-to-target coupler matching, per RCA.
struct Assignment {
  std::vector<int> target_of;  // target coupler index per initial coupler
  double total_distance = 0.0;
};

// Minimum-total-Euclidean-distance matching between initial and target
// coupler positions, restricted to each RCA's own coupler set (exact O(n³)
// assignment solve).  Throws DomainError on per-RCA count mismatch.
Assignment assign_targets(const ArrayLayout& initial, const ArrayLayout& target);

struct Waypoint {
  double time;  // seconds
  Vec3 position;
};

struct MovePlan {
  Assignment assignment;
  std::vector<std::vector<Waypoint>> waypoints;  // per initial coupler, time-ordered
  double makespan = 0.0;                         // seconds
  double total_distance = 0.0;                   // meters
};

// Straight-line constant-speed segments.  Collisions (coupler-coupler and
// coupler-active separations below d_min) are checked over sampling windows
// of λ/20 spatial resolution, with the minimum separation inside each window
// evaluated in closed form; on a conflict the higher-index coupler of the
// pair is delayed in increments of d_min/speed.  Throws PlanningError after
// 100 delay increments.
MovePlan plan_trajectories(const Assignment& assignment, const ArrayLayout& initial,
                           const ArrayLayout& target, double speed, double wavelength);

// Position of a coupler at an arbitrary time under the plan.
Vec3 plan_position(const MovePlan& plan, int coupler, double time);

// Smallest pairwise separation over the plan sampled at the given spatial
// resolution (verification helper).
double plan_min_separation(const MovePlan& plan, const ArrayLayout& initial,
                           double sample_step_m, double speed);

namespace detail {

// Exact rectangular-free assignment for a square cost matrix; returns the
// column assigned to each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

}  // namespace detail

}  // namespace rca
