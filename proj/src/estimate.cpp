#include "rca/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "rca/errors.hpp"
#include "rca/rng.hpp"

namespace rca {

void AngleGrid::validate() const {
  if (azimuth_bins < 1 || elevation_bins < 1) {
    throw ConfigError("AngleGrid: bin counts must be >= 1");
  }
  if (!(azimuth_min < azimuth_max) || !(elevation_min < elevation_max)) {
    throw ConfigError("AngleGrid: empty angle range");
  }
}

int AngleGrid::snap(double az, double el) const {
  const double az_step = (azimuth_max - azimuth_min) / azimuth_bins;
  const double el_step = (elevation_max - elevation_min) / elevation_bins;
  int i = static_cast<int>(std::floor((az - azimuth_min) / az_step));
  int j = static_cast<int>(std::floor((el - elevation_min) / el_step));
  i = std::clamp(i, 0, azimuth_bins - 1);
  j = std::clamp(j, 0, elevation_bins - 1);
  return index(i, j);
}

MeasurementSet synthesize_measurements(const PathSet& truth,
                                       const std::vector<ArrayLayout>& layouts,
                                       const LoadConfig& loads, const DipoleSpec& spec,
                                       double noise_variance, std::uint64_t seed) {
  if (noise_variance < 0.0) {
    throw DomainError("synthesize_measurements: negative noise variance");
  }
  MeasurementSet set;
  set.noise_variance = noise_variance;
  set.records.reserve(layouts.size());
  Prng rng(seed);
  for (const ArrayLayout& layout : layouts) {
    const EffectiveChannel h = effective_channel(layout, truth, loads, spec);
    Complex obs = h.h_eff.sum();
    if (noise_variance > 0.0) obs += rng.complex_normal(noise_variance);
    set.records.push_back({layout, loads, obs});
  }
  return set;
}

namespace {

// The dictionary is strongly coherent: the active ports never move, so every
// atom shares a large snapshot-independent component, and a planar array
// cannot distinguish the elevation sign at all (mirror atoms are identical
// columns).  Plain correlation-greedy selection routinely picks aliases, so
// the pursuit grows the support by smallest post-refit residual from a small
// beam of first atoms and then keeps replacing atoms (singly, and re-growing
// pairs) while the fit improves.
struct Pursuit {
  const CMatrix& dict;
  const CVector& y;
  const RVector& norms;
  double skip = 1e300;  // sentinel for rank-deficient candidates

  double refit(const std::vector<int>& support, CVector* gains) const {
    const Eigen::Index k = static_cast<Eigen::Index>(support.size());
    CMatrix sub(dict.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) sub.col(c) = dict.col(support[static_cast<size_t>(c)]);
    Eigen::ColPivHouseholderQR<CMatrix> qr(sub);
    if (qr.rank() < k) return skip;
    const CVector g = qr.solve(y);
    if (gains) *gains = g;
    return (y - sub * g).squaredNorm();
  }

  bool contains(const std::vector<int>& support, int atom, int except_slot = -1) const {
    for (size_t k = 0; k < support.size(); ++k) {
      if (static_cast<int>(k) != except_slot && support[k] == atom) return true;
    }
    return false;
  }

  // extend by smallest joint-refit residual until |support| = target
  std::vector<int> grow(std::vector<int> support, int target) const {
    std::vector<int> trial = support;
    while (static_cast<int>(support.size()) < target) {
      trial = support;
      trial.push_back(-1);
      int pick = -1;
      double best = skip;
      for (int a = 0; a < dict.cols(); ++a) {
        if (norms(a) <= 0.0 || contains(support, a)) continue;
        trial.back() = a;
        const double r2 = refit(trial, nullptr);
        if (r2 < best) {
          best = r2;
          pick = a;
        }
      }
      if (pick < 0) {
        throw ConditioningError("recover_paths: selected dictionary is rank deficient");
      }
      support.push_back(pick);
    }
    return support;
  }

  // cyclic single-atom replacement to a fixpoint
  double polish(std::vector<int>& support, double res2) const {
    for (int sweep = 0; sweep < 16; ++sweep) {
      bool improved = false;
      for (size_t slot = 0; slot < support.size(); ++slot) {
        std::vector<int> trial = support;
        int keep = support[slot];
        double keep_res = res2;
        for (int a = 0; a < dict.cols(); ++a) {
          if (norms(a) <= 0.0 || contains(support, a, static_cast<int>(slot))) continue;
          trial[slot] = a;
          const double r2 = refit(trial, nullptr);
          if (r2 < keep_res * (1.0 - 1e-12)) {
            keep_res = r2;
            keep = a;
          }
        }
        if (keep != support[slot]) {
          support[slot] = keep;
          res2 = keep_res;
          improved = true;
        }
      }
      if (!improved) break;
    }
    return res2;
  }
};

}  // namespace

EstimatedPaths recover_paths(const MeasurementSet& measurements, const AngleGrid& grid,
                             int sparsity, const DipoleSpec& spec) {
  grid.validate();
  if (sparsity < 0) throw DomainError("recover_paths: sparsity must be >= 0");
  const int records = static_cast<int>(measurements.records.size());
  if (records < 2 * sparsity) {
    throw DomainError("recover_paths: need at least 2*sparsity records, got " +
                      std::to_string(records));
  }

  CVector y(records);
  for (int r = 0; r < records; ++r) y(r) = measurements.records[static_cast<size_t>(r)].observation;

  EstimatedPaths out;
  if (sparsity == 0 || records == 0) {
    out.residual = y.squaredNorm();
    return out;
  }

  // Dictionary: rows are snapshots, columns grid directions.  The weight
  // solve per snapshot happens once; each atom entry is then a cheap
  // single-path channel sum.
  const int atoms = grid.size();
  CMatrix dict(records, atoms);
  for (int r = 0; r < records; ++r) {
    const MeasurementRecord& rec = measurements.records[static_cast<size_t>(r)];
    const CoupledArray coupled(rec.layout, rec.loads, spec);
    PathSet probe;
    probe.large_scale_gain = 1.0;
    probe.paths.resize(1);
    for (int a = 0; a < atoms; ++a) {
      probe.paths[0] = Path{grid.azimuth_of(a), grid.elevation_of(a), Complex(1.0, 0.0)};
      dict(r, a) = coupled.effective_channel(probe).h_eff.sum();
    }
  }
  const RVector atom_norms = dict.colwise().norm();
  const Pursuit pursuit{dict, y, atom_norms};

  // First-atom beam, ranked by normalized correlation with the measurements.
  // Top correlations cluster around one alias direction, so seeds are spread:
  // a candidate within 3 azimuth bins and 2 (sign-folded) elevation bins of
  // an accepted seed is skipped.
  constexpr int kBeam = 8;
  std::vector<std::pair<double, int>> ranked;
  for (int a = 0; a < atoms; ++a) {
    if (atom_norms(a) > 0.0) {
      ranked.emplace_back(std::abs(dict.col(a).dot(y)) / atom_norms(a), a);
    }
  }
  if (ranked.empty()) {
    throw ConditioningError("recover_paths: dictionary has no usable atoms");
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& p, const auto& q) { return p.first > q.first; });

  std::vector<int> seeds;
  for (const auto& [score, atom] : ranked) {
    const int ai = atom % grid.azimuth_bins;
    const int aj_folded = std::min(atom / grid.azimuth_bins,
                                   grid.elevation_bins - 1 - atom / grid.azimuth_bins);
    bool spread = true;
    for (int s : seeds) {
      const int si = s % grid.azimuth_bins;
      const int sj_folded = std::min(s / grid.azimuth_bins,
                                     grid.elevation_bins - 1 - s / grid.azimuth_bins);
      int daz = std::abs(ai - si);
      daz = std::min(daz, grid.azimuth_bins - daz);
      if (daz < 3 && std::abs(aj_folded - sj_folded) < 2) {
        spread = false;
        break;
      }
    }
    if (spread) seeds.push_back(atom);
    if (static_cast<int>(seeds.size()) >= kBeam) break;
  }

  const double exact_fit = 1e-24 * y.squaredNorm();
  std::vector<int> best_support;
  double best_res = pursuit.skip;
  for (int b = 0; b < static_cast<int>(seeds.size()); ++b) {
    std::vector<int> support = pursuit.grow({seeds[static_cast<size_t>(b)]}, sparsity);
    double res2 = pursuit.polish(support, pursuit.refit(support, nullptr));
    if (res2 < best_res) {
      best_res = res2;
      best_support = support;
    }
    // pair re-growth: keep one atom, rebuild the rest
    if (best_res > exact_fit && sparsity >= 2) {
      for (size_t keep = 0; keep < support.size() && best_res > exact_fit; ++keep) {
        std::vector<int> regrown = pursuit.grow({support[keep]}, sparsity);
        const double r2 = pursuit.polish(regrown, pursuit.refit(regrown, nullptr));
        if (r2 < best_res) {
          best_res = r2;
          best_support = regrown;
        }
      }
    }
    if (best_res <= exact_fit) break;
  }

  CVector gains;
  best_res = pursuit.refit(best_support, &gains);
  out.grid_indices = best_support;
  out.paths.reserve(best_support.size());
  for (size_t k = 0; k < best_support.size(); ++k) {
    out.paths.push_back(
        Path{grid.azimuth_of(best_support[k]), grid.elevation_of(best_support[k]), gains(k)});
  }
  out.residual = best_res;
  return out;
}

EffectiveChannel reconstruct_channel(const EstimatedPaths& estimate, const ArrayLayout& layout,
                                     const LoadConfig& loads, const DipoleSpec& spec) {
  return effective_channel(layout, estimate.as_pathset(), loads, spec);
}

}  // namespace rca
