#include "rca/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "rca/csv.hpp"
#include "rca/errors.hpp"
#include "rca/planner.hpp"
#include "rca/rng.hpp"

namespace rca {

std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose, std::uint64_t index) {
  return Prng(master)
      .fold_in(static_cast<std::uint64_t>(purpose))
      .fold_in(index)
      .next_u64();
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

namespace {

double rate_from_gain(double gain, double tx_power_w, double noise_power_w) {
  return std::log2(1.0 + tx_power_w * gain / noise_power_w);
}

// Channel power gain of one scheme on one seeded channel; throws on
// conditioning/projection failures, which run_comparison records as a
// failure marker for that (scheme, seed).
std::vector<double> scheme_rates(const Scenario& sc, Scheme scheme, int seed_index,
                                 const PathSet& ps) {
  const DipoleSpec dipole = sc.dipole();
  std::vector<double> rates;
  rates.reserve(sc.tx_powers_w.size());

  if (scheme == Scheme::FullyActive) {
    for (double p : sc.tx_powers_w) {
      rates.push_back(baseline_fully_active_rate(sc.rca_count, sc.couplers_per_rca,
                                                 sc.fully_active_spacing, ps, sc.wavelength, p,
                                                 sc.noise_power));
    }
    return rates;
  }

  const ArrayLayout fixed = sc.fixed_layout();
  const LoadConfig fixed_loads = sc.fixed_loads();
  double gain = 0.0;

  switch (scheme) {
    case Scheme::FixedCouplers:
      gain = channel_power_gain(fixed, ps, fixed_loads, dipole);
      break;
    case Scheme::RcaOptimized: {
      OptimizationConfig cfg = sc.optimizer;
      cfg.seed = derive_seed(sc.master_seed, SeedPurpose::kOptimizer,
                             static_cast<std::uint64_t>(seed_index));
      OptimizationTrace trace = optimize_positions(fixed, ps, fixed_loads, dipole, cfg);
      gain = trace.final_objective();
      if (cfg.quantization_step) {
        gain = quantize_positions(trace, *cfg.quantization_step, ps, fixed_loads, dipole)
                   .quantized_objective;
      }
      break;
    }
    case Scheme::Espar: {
      OptimizationConfig cfg = sc.optimizer;
      cfg.seed = derive_seed(sc.master_seed, SeedPurpose::kEspar,
                             static_cast<std::uint64_t>(seed_index));
      gain = optimize_loads(fixed, ps, sc.espar_bounds, dipole, cfg, sc.sign_convention)
                 .trace.final_objective();
      break;
    }
    case Scheme::FullyActive:
      break;  // handled above
  }

  for (double p : sc.tx_powers_w) rates.push_back(rate_from_gain(gain, p, sc.noise_power));
  return rates;
}

}  // namespace

ComparisonTable run_comparison(const Scenario& scenario, int threads) {
  scenario.validate();
  ComparisonTable table;
  table.schemes = scenario.schemes;
  table.tx_powers_w = scenario.tx_powers_w;
  table.per_seed_rates.assign(scenario.schemes.size(), {});
  for (auto& per_scheme : table.per_seed_rates) {
    per_scheme.assign(static_cast<size_t>(scenario.seeds), std::nullopt);
  }

  std::vector<std::vector<std::exception_ptr>> failures(
      scenario.schemes.size(),
      std::vector<std::exception_ptr>(static_cast<size_t>(scenario.seeds)));

  parallel_for(scenario.seeds, threads, [&](int seed_index) {
    const PathSet ps = sample_pathset(
        scenario.path_count,
        derive_seed(scenario.master_seed, SeedPurpose::kPaths,
                    static_cast<std::uint64_t>(seed_index)));
    for (size_t si = 0; si < scenario.schemes.size(); ++si) {
      try {
        table.per_seed_rates[si][static_cast<size_t>(seed_index)] =
            scheme_rates(scenario, scenario.schemes[si], seed_index, ps);
      } catch (const Error&) {
        table.per_seed_rates[si][static_cast<size_t>(seed_index)] = std::nullopt;
        failures[si][static_cast<size_t>(seed_index)] = std::current_exception();
      }
    }
  });

  for (const auto& per_scheme : failures) {
    for (const auto& failure : per_scheme) {
      if (failure && !table.first_failure) table.first_failure = failure;
    }
  }

  for (size_t si = 0; si < table.schemes.size(); ++si) {
    for (size_t pi = 0; pi < table.tx_powers_w.size(); ++pi) {
      int count = 0;
      double sum = 0.0;
      for (int seed = 0; seed < scenario.seeds; ++seed) {
        const auto& rates = table.per_seed_rates[si][static_cast<size_t>(seed)];
        if (!rates) continue;
        sum += (*rates)[pi];
        ++count;
      }
      const double mean = count > 0 ? sum / count : std::nan("");
      double var = 0.0;
      if (count > 1) {
        for (int seed = 0; seed < scenario.seeds; ++seed) {
          const auto& rates = table.per_seed_rates[si][static_cast<size_t>(seed)];
          if (!rates) continue;
          const double d = (*rates)[pi] - mean;
          var += d * d;
        }
        var /= (count - 1);
      }
      table.rows.push_back({table.schemes[si], table.tx_powers_w[pi], mean,
                            count > 1 ? std::sqrt(var) : 0.0, count});
    }
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << "scheme,tx_power_w,mean_rate,std_rate,seeds\n";
  for (const ComparisonRow& row : rows) {
    out << scheme_name(row.scheme) << ',' << format_value(row.tx_power_w) << ','
        << format_value(row.mean_rate) << ',' << format_value(row.std_rate) << ',' << row.seeds
        << '\n';
  }
  return out.str();
}

void cmd_gainmap(const Scenario& scenario, int coupler_index, const std::string& out_path) {
  const PathSet ps = sample_pathset(scenario.path_count,
                                    derive_seed(scenario.master_seed, SeedPurpose::kPaths, 0));
  const GainMap map = gain_map(scenario.fixed_layout(), ps, scenario.fixed_loads(),
                               scenario.dipole(), coupler_index, scenario.gainmap.resolution);
  std::ostringstream out;
  out << "x_m,y_m,gain_db,masked\n";
  for (int iy = 0; iy < map.ys.size(); ++iy) {
    for (int ix = 0; ix < map.xs.size(); ++ix) {
      out << format_value(map.xs(ix)) << ',' << format_value(map.ys(iy)) << ','
          << format_value(map.gain_db(iy, ix)) << ',' << (map.masked(iy, ix) ? 1 : 0) << '\n';
    }
  }
  write_file(out_path, out.str());
}

void cmd_compare(const Scenario& scenario, const std::string& out_path, int threads) {
  const ComparisonTable table = run_comparison(scenario, threads);
  // flush whatever succeeded (failed combinations appear as nan rows with a
  // reduced seed count), then let the first failure propagate
  write_file(out_path, table.to_csv());
  if (table.first_failure) std::rethrow_exception(table.first_failure);
}

std::string layout_csv_path(const std::string& out_path) {
  const std::string suffix = ".csv";
  if (out_path.size() > suffix.size() &&
      out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return out_path.substr(0, out_path.size() - suffix.size()) + "_layout.csv";
  }
  return out_path + "_layout.csv";
}

void cmd_optimize(const Scenario& scenario, const std::string& out_path) {
  const DipoleSpec dipole = scenario.dipole();
  const PathSet ps = sample_pathset(scenario.path_count,
                                    derive_seed(scenario.master_seed, SeedPurpose::kPaths, 0));
  OptimizationConfig cfg = scenario.optimizer;
  cfg.seed = derive_seed(scenario.master_seed, SeedPurpose::kOptimizer, 0);

  const ArrayLayout initial = scenario.fixed_layout();
  const LoadConfig loads = scenario.fixed_loads();
  OptimizationTrace trace = optimize_positions(initial, ps, loads, dipole, cfg);

  ArrayLayout final_layout = trace.final_layout;
  if (cfg.quantization_step) {
    final_layout = quantize_positions(trace, *cfg.quantization_step, ps, loads, dipole).layout;
  }

  std::ostringstream out;
  out << "iteration,objective\n";
  for (size_t i = 0; i < trace.objectives.size(); ++i) {
    out << i << ',' << format_value(trace.objectives[i]) << '\n';
  }
  write_file(out_path, out.str());

  std::ostringstream lay;
  lay << "coupler,owner,x_m,y_m,z_m\n";
  for (int i = 0; i < final_layout.coupler_count(); ++i) {
    const Vec3& p = final_layout.coupler_positions[static_cast<size_t>(i)];
    lay << i << ',' << final_layout.coupler_owner[static_cast<size_t>(i)] << ','
        << format_value(p.x()) << ',' << format_value(p.y()) << ',' << format_value(p.z())
        << '\n';
  }
  write_file(layout_csv_path(out_path), lay.str());
}

void cmd_estimate(const Scenario& scenario, const std::string& out_path) {
  const DipoleSpec dipole = scenario.dipole();
  const AngleGrid grid = scenario.estimator.grid();

  PathSet truth = sample_pathset(scenario.path_count,
                                 derive_seed(scenario.master_seed, SeedPurpose::kPaths, 0));
  if (scenario.estimator.on_grid) {
    for (Path& p : truth.paths) {
      const int idx = grid.snap(p.azimuth, p.elevation);
      p.azimuth = grid.azimuth_of(idx);
      p.elevation = grid.elevation_of(idx);
    }
  }

  const ArrayLayout base = scenario.fixed_layout();
  const LoadConfig loads = scenario.fixed_loads();

  const Prng snap_rng(derive_seed(scenario.master_seed, SeedPurpose::kSnapshots, 0));
  std::vector<ArrayLayout> snapshots;
  snapshots.reserve(static_cast<size_t>(scenario.estimator.snapshots));
  for (int i = 0; i < scenario.estimator.snapshots; ++i) {
    snapshots.push_back(random_feasible_layout(base, snap_rng.fold_in(static_cast<std::uint64_t>(i))));
  }

  const MeasurementSet measurements = synthesize_measurements(
      truth, snapshots, loads, dipole, scenario.estimator.noise_variance,
      derive_seed(scenario.master_seed, SeedPurpose::kMeasurementNoise, 0));
  const EstimatedPaths estimate =
      recover_paths(measurements, grid, scenario.estimator.sparsity, dipole);

  const Prng holdout_rng(derive_seed(scenario.master_seed, SeedPurpose::kHoldout, 0));
  std::ostringstream out;
  out << "holdout,true_mag,reconstructed_mag,rel_error\n";
  for (int h = 0; h < scenario.estimator.holdout_layouts; ++h) {
    const ArrayLayout probe =
        random_feasible_layout(base, holdout_rng.fold_in(static_cast<std::uint64_t>(h)));
    const CVector truth_h = effective_channel(probe, truth, loads, dipole).h_eff;
    const CVector recon_h = reconstruct_channel(estimate, probe, loads, dipole).h_eff;
    const double rel = (recon_h - truth_h).norm() / truth_h.norm();
    out << h << ',' << format_value(truth_h.norm()) << ',' << format_value(recon_h.norm()) << ','
        << format_value(rel) << '\n';
  }
  write_file(out_path, out.str());
}

void cmd_plan(const Scenario& scenario, const std::string& out_path) {
  const ArrayLayout initial = scenario.fixed_layout();
  const Prng target_rng(derive_seed(scenario.master_seed, SeedPurpose::kPlanTarget, 0));

  MovePlan plan;
  bool planned = false;
  std::string last_error;
  for (int attempt = 0; attempt < 50 && !planned; ++attempt) {
    const ArrayLayout target =
        random_feasible_layout(initial, target_rng.fold_in(static_cast<std::uint64_t>(attempt)));
    const Assignment assignment = assign_targets(initial, target);
    try {
      plan = plan_trajectories(assignment, initial, target, scenario.planner.speed,
                               scenario.wavelength);
      planned = true;
    } catch (const PlanningError& e) {
      last_error = e.what();  // straight-line conflict; redraw the target
    }
  }
  if (!planned) {
    throw PlanningError("cmd_plan: no plannable target after 50 draws (" + last_error + ")");
  }

  std::ostringstream out;
  out << "time_s,coupler,x_m,y_m,z_m\n";
  for (size_t i = 0; i < plan.waypoints.size(); ++i) {
    for (const Waypoint& wp : plan.waypoints[i]) {
      out << format_value(wp.time) << ',' << i << ',' << format_value(wp.position.x()) << ','
          << format_value(wp.position.y()) << ',' << format_value(wp.position.z()) << '\n';
    }
  }
  write_file(out_path, out.str());
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const DomainError&) {
    return kExitConfig;
  } catch (const ConditioningError&) {
    return kExitConditioning;
  } catch (const ProjectionError&) {
    return kExitProjection;  // includes QuantizationError
  } catch (const PlanningError&) {
    return kExitPlanning;
  } catch (const SpacingError&) {
    return kExitSpacing;
  } catch (...) {
    return kExitUnknown;
  }
}

}  // namespace rca
