#include "rca/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rca/errors.hpp"

namespace rca {

namespace detail {

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = match[static_cast<size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (match[static_cast<size_t>(j)] > 0) row_to_col[static_cast<size_t>(match[static_cast<size_t>(j)]) - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace detail

Assignment assign_targets(const ArrayLayout& initial, const ArrayLayout& target) {
  validate_structure(initial);
  validate_structure(target);
  if (initial.active_count() != target.active_count() ||
      initial.coupler_count() != target.coupler_count()) {
    throw DomainError("assign_targets: layouts differ in port counts");
  }

  const int rcas = initial.active_count();
  Assignment out;
  out.target_of.assign(static_cast<size_t>(initial.coupler_count()), -1);

  for (int m = 0; m < rcas; ++m) {
    std::vector<int> init_ids, tgt_ids;
    for (int i = 0; i < initial.coupler_count(); ++i) {
      if (initial.coupler_owner[static_cast<size_t>(i)] == m) init_ids.push_back(i);
    }
    for (int i = 0; i < target.coupler_count(); ++i) {
      if (target.coupler_owner[static_cast<size_t>(i)] == m) tgt_ids.push_back(i);
    }
    if (init_ids.size() != tgt_ids.size()) {
      throw DomainError("assign_targets: RCA " + std::to_string(m) +
                        " has mismatched coupler counts");
    }
    const int n = static_cast<int>(init_ids.size());
    if (n == 0) continue;

    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cost(i, j) = (initial.coupler_positions[static_cast<size_t>(init_ids[static_cast<size_t>(i)])] -
                      target.coupler_positions[static_cast<size_t>(tgt_ids[static_cast<size_t>(j)])])
                         .norm();
      }
    }
    const std::vector<int> row_to_col = detail::hungarian(cost);
    for (int i = 0; i < n; ++i) {
      out.target_of[static_cast<size_t>(init_ids[static_cast<size_t>(i)])] =
          tgt_ids[static_cast<size_t>(row_to_col[static_cast<size_t>(i)])];
      out.total_distance += cost(i, row_to_col[static_cast<size_t>(i)]);
    }
  }
  return out;
}

namespace {

struct Segment {
  Vec3 start, end;
  double length;
  double delay = 0.0;
};

Vec3 segment_position(const Segment& s, double speed, double t) {
  if (s.length <= 0.0 || t <= s.delay) return s.start;
  const double travelled = speed * (t - s.delay);
  if (travelled >= s.length) return s.end;
  return s.start + (travelled / s.length) * (s.end - s.start);
}

Vec3 segment_velocity(const Segment& s, double speed, double t0, double t1) {
  // constant velocity over (t0, t1) when the window lies inside the travel
  // interval, zero when parked; windows are built so no transition falls
  // strictly inside
  if (s.length <= 0.0) return Vec3::Zero();
  const double arrive = s.delay + s.length / speed;
  if (t1 <= s.delay + 1e-15 || t0 >= arrive - 1e-15) return Vec3::Zero();
  return (s.end - s.start) * (speed / s.length);
}

// exact minimum distance of two linear motions over [t0, t1]
double window_min_distance(const Vec3& p0, const Vec3& vp, const Vec3& q0, const Vec3& vq,
                           double t0, double t1) {
  const Vec3 r = p0 - q0;
  const Vec3 w = vp - vq;
  const double w2 = w.squaredNorm();
  double best = std::min(r.norm(), (r + (t1 - t0) * w).norm());
  if (w2 > 0.0) {
    const double tau = -r.dot(w) / w2;
    if (tau > 0.0 && tau < t1 - t0) best = std::min(best, (r + tau * w).norm());
  }
  return best;
}

}  // namespace

MovePlan plan_trajectories(const Assignment& assignment, const ArrayLayout& initial,
                           const ArrayLayout& target, double speed, double wavelength) {
  if (!(speed > 0.0)) throw DomainError("plan_trajectories: speed must be > 0");
  if (!(wavelength > 0.0)) throw DomainError("plan_trajectories: wavelength must be > 0");
  require_feasible(initial);
  require_feasible(target);
  const int n = initial.coupler_count();
  if (static_cast<int>(assignment.target_of.size()) != n) {
    throw DomainError("plan_trajectories: assignment size mismatch");
  }

  std::vector<Segment> segs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Segment& s = segs[static_cast<size_t>(i)];
    s.start = initial.coupler_positions[static_cast<size_t>(i)];
    s.end = target.coupler_positions[static_cast<size_t>(assignment.target_of[static_cast<size_t>(i)])];
    s.length = (s.end - s.start).norm();
  }

  const double dt = (wavelength / 20.0) / speed;
  const double d_min = initial.d_min;
  const double limit = d_min - kFeasibilitySlack;
  const double delay_increment = d_min / speed;
  int increments = 0;

  for (;;) {
    double makespan = 0.0;
    for (const Segment& s : segs) makespan = std::max(makespan, s.delay + s.length / speed);

    // Sample boundaries at λ/20 spatial resolution plus every start/stop
    // transition; within a window all motions are linear, so the pairwise
    // minimum separation is evaluated exactly.
    std::vector<double> ticks{0.0, makespan};
    const int steps = static_cast<int>(std::ceil(makespan / dt));
    for (int k = 1; k < steps; ++k) ticks.push_back(k * dt);
    for (const Segment& s : segs) {
      if (s.length <= 0.0) continue;
      ticks.push_back(s.delay);
      ticks.push_back(s.delay + s.length / speed);
    }
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                ticks.end());

    int bump = -1;
    const size_t windows = ticks.size() > 1 ? ticks.size() - 1 : 1;
    for (size_t w = 0; w < windows && bump < 0; ++w) {
      const double t0 = ticks[w];
      const double t1 = ticks.size() > 1 ? ticks[w + 1] : t0;
      for (int i = 0; i < n && bump < 0; ++i) {
        const Segment& si = segs[static_cast<size_t>(i)];
        const Vec3 pi = segment_position(si, speed, t0);
        const Vec3 vi = segment_velocity(si, speed, t0, t1);
        for (int j = i + 1; j < n && bump < 0; ++j) {
          const Segment& sj = segs[static_cast<size_t>(j)];
          const Vec3 pj = segment_position(sj, speed, t0);
          const Vec3 vj = segment_velocity(sj, speed, t0, t1);
          if (window_min_distance(pi, vi, pj, vj, t0, t1) < limit) bump = j;
        }
        for (int a = 0; a < initial.active_count() && bump < 0; ++a) {
          const Vec3& pa = initial.active_positions[static_cast<size_t>(a)];
          if (window_min_distance(pi, vi, pa, Vec3::Zero(), t0, t1) < limit) bump = i;
        }
      }
    }
    if (bump < 0) break;
    if (++increments > 100) {
      throw PlanningError("plan_trajectories: conflict not resolvable within 100 delay increments");
    }
    segs[static_cast<size_t>(bump)].delay += delay_increment;
  }

  MovePlan plan;
  plan.assignment = assignment;
  plan.total_distance = assignment.total_distance;
  plan.waypoints.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Segment& s = segs[static_cast<size_t>(i)];
    auto& wp = plan.waypoints[static_cast<size_t>(i)];
    wp.push_back({0.0, s.start});
    if (s.delay > 0.0) wp.push_back({s.delay, s.start});
    if (s.length > 0.0) wp.push_back({s.delay + s.length / speed, s.end});
    plan.makespan = std::max(plan.makespan, wp.back().time);
  }
  return plan;
}

Vec3 plan_position(const MovePlan& plan, int coupler, double time) {
  const auto& wp = plan.waypoints[static_cast<size_t>(coupler)];
  if (time <= wp.front().time) return wp.front().position;
  if (time >= wp.back().time) return wp.back().position;
  for (size_t k = 1; k < wp.size(); ++k) {
    if (time <= wp[k].time) {
      const double span = wp[k].time - wp[k - 1].time;
      if (span <= 0.0) return wp[k].position;
      const double f = (time - wp[k - 1].time) / span;
      return wp[k - 1].position + f * (wp[k].position - wp[k - 1].position);
    }
  }
  return wp.back().position;
}

double plan_min_separation(const MovePlan& plan, const ArrayLayout& initial,
                           double sample_step_m, double speed) {
  const int n = static_cast<int>(plan.waypoints.size());
  const double dt = sample_step_m / speed;
  const int steps = static_cast<int>(std::ceil(plan.makespan / dt));
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(k * dt, plan.makespan);
    for (int i = 0; i < n; ++i) {
      const Vec3 pi = plan_position(plan, i, t);
      for (int j = i + 1; j < n; ++j) {
        best = std::min(best, (pi - plan_position(plan, j, t)).norm());
      }
      for (const Vec3& pa : initial.active_positions) {
        best = std::min(best, (pi - pa).norm());
      }
    }
  }
  return best;
}

}  // namespace rca
