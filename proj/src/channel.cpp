#include "rca/channel.hpp"

#include <cmath>
#include <string>

#include "rca/errors.hpp"
#include "rca/rng.hpp"

namespace rca {

PathSet sample_pathset(int path_count, std::uint64_t seed) {
  if (path_count < 1) throw DomainError("sample_pathset: path count must be >= 1");
  Prng rng(seed);
  PathSet ps;
  ps.paths.reserve(static_cast<size_t>(path_count));
  const double scale = std::sqrt(1.0 / path_count);  // Σ E|g|² = 1
  for (int l = 0; l < path_count; ++l) {
    Path p;
    p.azimuth = rng.uniform(0.0, 2.0 * kPi);
    p.elevation = rng.uniform(-kPi / 3.0, kPi / 3.0);
    p.gain = scale * rng.complex_normal(1.0);
    ps.paths.push_back(p);
  }
  return ps;
}

Complex port_channel(const PathSet& ps, const Vec3& position, double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("port_channel: wavelength must be positive");
  const double k = 2.0 * kPi / wavelength;
  Complex h(0.0, 0.0);
  for (const Path& p : ps.paths) {
    h += p.gain * std::polar(1.0, k * p.direction().dot(position));
  }
  return ps.large_scale_gain * h;
}

CoupledArray::CoupledArray(const ArrayLayout& layout, const LoadConfig& loads,
                           const DipoleSpec& spec)
    : layout_(layout), spec_(spec), weights_(mechanical_weights(assemble_impedances(layout, spec), loads)) {}

EffectiveChannel CoupledArray::effective_channel(const PathSet& ps) const {
  const int m = layout_.active_count();
  const int n = layout_.coupler_count();
  CVector ha(m), hc(n);
  for (int i = 0; i < m; ++i) {
    ha(i) = port_channel(ps, layout_.active_positions[static_cast<size_t>(i)], spec_.wavelength);
  }
  for (int j = 0; j < n; ++j) {
    hc(j) = port_channel(ps, layout_.coupler_positions[static_cast<size_t>(j)], spec_.wavelength);
  }
  EffectiveChannel out;
  out.h_eff = n > 0 ? (ha + weights_.W.transpose() * hc).eval() : ha;
  return out;
}

EffectiveChannel effective_channel(const ArrayLayout& layout, const PathSet& ps,
                                   const LoadConfig& loads, const DipoleSpec& spec) {
  return CoupledArray(layout, loads, spec).effective_channel(ps);
}

LinkBudget snr_and_rate(const EffectiveChannel& h, double tx_power_w, double noise_power_w) {
  if (!(noise_power_w > 0.0)) throw DomainError("snr_and_rate: noise power must be positive");
  if (tx_power_w < 0.0) throw DomainError("snr_and_rate: negative transmit power");
  const double snr = tx_power_w * h.h_eff.squaredNorm() / noise_power_w;
  return {snr, std::log2(1.0 + snr)};
}

int GainMap::strict_local_maxima() const {
  int count = 0;
  for (int iy = 1; iy + 1 < gain_db.rows(); ++iy) {
    for (int ix = 1; ix + 1 < gain_db.cols(); ++ix) {
      if (masked(iy, ix)) continue;
      const double v = gain_db(iy, ix);
      bool peak = true;
      for (int dy = -1; dy <= 1 && peak; ++dy) {
        for (int dx = -1; dx <= 1 && peak; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (masked(iy + dy, ix + dx) || gain_db(iy + dy, ix + dx) >= v) peak = false;
        }
      }
      if (peak) ++count;
    }
  }
  return count;
}

double GainMap::spread_db() const {
  double lo = INFINITY, hi = -INFINITY;
  for (int iy = 0; iy < gain_db.rows(); ++iy) {
    for (int ix = 0; ix < gain_db.cols(); ++ix) {
      if (masked(iy, ix)) continue;
      lo = std::min(lo, gain_db(iy, ix));
      hi = std::max(hi, gain_db(iy, ix));
    }
  }
  return hi - lo;
}

GainMap gain_map(const ArrayLayout& layout, const PathSet& ps, const LoadConfig& loads,
                 const DipoleSpec& spec, int coupler_index, int grid_resolution) {
  if (coupler_index < 0 || coupler_index >= layout.coupler_count()) {
    throw DomainError("gain_map: coupler index out of range");
  }
  if (grid_resolution < 2) throw DomainError("gain_map: grid resolution must be >= 2");
  require_feasible(layout);

  const Vec3 center = layout.owner_center(coupler_index);
  const double hw = layout.region_half_width;
  const int r = grid_resolution;

  GainMap map;
  map.xs.resize(r);
  map.ys.resize(r);
  for (int i = 0; i < r; ++i) {
    const double t = -hw + 2.0 * hw * i / (r - 1);
    map.xs(i) = center.x() + t;
    map.ys(i) = center.y() + t;
  }
  map.gain_db.setConstant(r, r, std::nan(""));
  map.masked.setConstant(r, r, true);

  const double floor = kMinSpacingWavelengths * spec.wavelength;
  const double limit = std::max(layout.d_min - kFeasibilitySlack, floor);

  ArrayLayout probe = layout;
  for (int iy = 0; iy < r; ++iy) {
    for (int ix = 0; ix < r; ++ix) {
      const Vec3 pos(map.xs(ix), map.ys(iy), center.z());
      bool ok = true;
      for (int j = 0; j < layout.coupler_count() && ok; ++j) {
        if (j == coupler_index) continue;
        ok = (pos - layout.coupler_positions[static_cast<size_t>(j)]).norm() >= limit;
      }
      for (int a = 0; a < layout.active_count() && ok; ++a) {
        ok = (pos - layout.active_positions[static_cast<size_t>(a)]).norm() >= limit;
      }
      if (!ok) continue;
      probe.coupler_positions[static_cast<size_t>(coupler_index)] = pos;
      const EffectiveChannel h = effective_channel(probe, ps, loads, spec);
      map.gain_db(iy, ix) = 10.0 * std::log10(h.h_eff.squaredNorm());
      map.masked(iy, ix) = false;
    }
  }
  return map;
}

}  // namespace rca
