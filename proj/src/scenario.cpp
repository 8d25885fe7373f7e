#include "rca/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rca/errors.hpp"

namespace rca {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("field '" + key + "' must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& obj, const std::string& key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError("field '" + key + "' must be an integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("field '" + key + "' must be a boolean");
  return v.get<bool>();
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("field '" + field + "' must be positive");
  }
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::RcaOptimized: return "rca-opt";
    case Scheme::FixedCouplers: return "fixed";
    case Scheme::Espar: return "espar";
    case Scheme::FullyActive: return "fully-active";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "rca-opt") return Scheme::RcaOptimized;
  if (name == "fixed") return Scheme::FixedCouplers;
  if (name == "espar") return Scheme::Espar;
  if (name == "fully-active") return Scheme::FullyActive;
  throw ConfigError("unknown scheme '" + name + "'");
}

AngleGrid EstimatorConfig::grid() const {
  AngleGrid g;
  g.azimuth_bins = azimuth_bins;
  g.elevation_bins = elevation_bins;
  return g;
}

ArrayLayout Scenario::fixed_layout() const {
  return fixed_coupler_layout(rca_count, couplers_per_rca, rca_spacing, fixed_coupler_spacing,
                              region_half_width, d_min);
}

LoadConfig Scenario::fixed_loads() const {
  return LoadConfig::uniform(rca_count * couplers_per_rca, coupler_load, sign_convention);
}

Scenario Scenario::defaults() {
  Scenario s;
  const double lam = s.wavelength;
  s.rca_spacing = 1.0 * lam;
  s.region_half_width = 1.0 * lam;
  s.d_min = 0.1 * lam;
  s.dipole_length = 0.5 * lam;
  s.fixed_coupler_spacing = 0.4 * lam;
  s.fully_active_spacing = 0.5 * lam;
  s.tx_powers_w.clear();
  for (int i = 0; i < 10; ++i) {
    s.tx_powers_w.push_back(std::pow(10.0, -3.0 + 4.0 * i / 9.0));
  }
  s.optimizer = OptimizationConfig::defaults_for(lam);
  return s;
}

void Scenario::validate() const {
  require_positive(wavelength, "wavelength");
  if (rca_count < 1) throw ConfigError("field 'M' must be >= 1");
  if (couplers_per_rca < 0) throw ConfigError("field 'N' must be >= 0");
  if (path_count < 1) throw ConfigError("field 'L' must be >= 1");
  require_positive(rca_spacing, "rca_spacing");
  require_positive(region_half_width, "region_half_width");
  if (!(d_min >= kMinSpacingWavelengths * wavelength) || !std::isfinite(d_min)) {
    throw ConfigError("field 'd_min' must be >= " +
                      std::to_string(kMinSpacingWavelengths * wavelength) +
                      " (impedance-model floor of 0.05 wavelengths)");
  }
  require_positive(dipole_length, "dipole_length");
  require_positive(fixed_coupler_spacing, "fixed_coupler_spacing");
  require_positive(fully_active_spacing, "fully_active_spacing");
  require_positive(noise_power, "noise_power");
  if (tx_powers_w.empty()) throw ConfigError("field 'tx_powers_w' must be nonempty");
  for (double p : tx_powers_w) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("field 'tx_powers_w' must be >= 0");
  }
  if (seeds < 1) throw ConfigError("field 'seeds' must be >= 1");
  if (schemes.empty()) throw ConfigError("field 'schemes' must be nonempty");
  if (sign_convention != 1.0 && sign_convention != -1.0) {
    throw ConfigError("field 'sign_convention' must be +1 or -1");
  }
  if (!(espar_bounds.x_min <= espar_bounds.x_max)) {
    throw ConfigError("field 'espar_bounds' must satisfy x_min <= x_max");
  }
  try {
    optimizer.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("field 'optimizer': ") + e.what());
  }
  if (estimator.azimuth_bins < 1 || estimator.elevation_bins < 1) {
    throw ConfigError("field 'estimator' grid bins must be >= 1");
  }
  if (estimator.sparsity < 0) throw ConfigError("field 'estimator.sparsity' must be >= 0");
  if (estimator.snapshots < 2 * estimator.sparsity) {
    throw ConfigError("field 'estimator.snapshots' must be >= 2*sparsity");
  }
  if (estimator.noise_variance < 0.0) {
    throw ConfigError("field 'estimator.noise_variance' must be >= 0");
  }
  if (estimator.holdout_layouts < 1) {
    throw ConfigError("field 'estimator.holdout_layouts' must be >= 1");
  }
  if (gainmap.resolution < 2) throw ConfigError("field 'gainmap.resolution' must be >= 2");
  if (couplers_per_rca > 0 &&
      (gainmap.coupler_index < 0 || gainmap.coupler_index >= rca_count * couplers_per_rca)) {
    throw ConfigError("field 'gainmap.coupler_index' out of range");
  }
  require_positive(planner.speed, "planner.speed");
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario must be a JSON object");

  reject_unknown_keys(root,
                      {"wavelength", "M", "N", "L", "rca_spacing", "region_half_width", "d_min",
                       "dipole_length", "fixed_coupler_spacing", "fully_active_spacing",
                       "noise_power", "tx_powers_w", "power_sweep", "seeds", "master_seed",
                       "schemes", "sign_convention", "coupler_load", "espar_bounds", "optimizer",
                       "estimator", "gainmap", "planner"},
                      "scenario");

  Scenario def = Scenario::defaults();
  Scenario s;
  s.wavelength = get_number(root, "wavelength", def.wavelength);
  require_positive(s.wavelength, "wavelength");
  const double lam = s.wavelength;

  s.rca_count = get_int(root, "M", def.rca_count);
  s.couplers_per_rca = get_int(root, "N", def.couplers_per_rca);
  s.path_count = get_int(root, "L", def.path_count);
  s.rca_spacing = get_number(root, "rca_spacing", 1.0 * lam);
  s.region_half_width = get_number(root, "region_half_width", 1.0 * lam);
  s.d_min = get_number(root, "d_min", 0.1 * lam);
  s.dipole_length = get_number(root, "dipole_length", 0.5 * lam);
  s.fixed_coupler_spacing = get_number(root, "fixed_coupler_spacing", 0.4 * lam);
  s.fully_active_spacing = get_number(root, "fully_active_spacing", 0.5 * lam);
  s.noise_power = get_number(root, "noise_power", def.noise_power);

  if (root.contains("tx_powers_w") && root.contains("power_sweep")) {
    throw ConfigError("give either 'tx_powers_w' or 'power_sweep', not both");
  }
  if (root.contains("tx_powers_w")) {
    const json& arr = root.at("tx_powers_w");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("field 'tx_powers_w' must be a nonempty array");
    }
    s.tx_powers_w.clear();
    for (const json& v : arr) {
      if (!v.is_number()) throw ConfigError("field 'tx_powers_w' must contain numbers");
      s.tx_powers_w.push_back(v.get<double>());
    }
  } else if (root.contains("power_sweep")) {
    const json& sweep = root.at("power_sweep");
    reject_unknown_keys(sweep, {"min_w", "max_w", "points"}, "power_sweep");
    const double lo = get_number(sweep, "min_w", 1e-3);
    const double hi = get_number(sweep, "max_w", 10.0);
    const int points = get_int(sweep, "points", 10);
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
      throw ConfigError("field 'power_sweep' must satisfy 0 < min_w <= max_w, points >= 1");
    }
    s.tx_powers_w.clear();
    for (int i = 0; i < points; ++i) {
      const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
      s.tx_powers_w.push_back(std::pow(10.0, std::log10(lo) + f * (std::log10(hi) - std::log10(lo))));
    }
  } else {
    s.tx_powers_w = def.tx_powers_w;
  }

  s.seeds = get_int(root, "seeds", def.seeds);
  s.master_seed = get_u64(root, "master_seed", def.master_seed);

  if (root.contains("schemes")) {
    const json& arr = root.at("schemes");
    if (!arr.is_array()) throw ConfigError("field 'schemes' must be an array");
    s.schemes.clear();
    for (const json& v : arr) {
      if (!v.is_string()) throw ConfigError("field 'schemes' must contain strings");
      s.schemes.push_back(scheme_from_name(v.get<std::string>()));
    }
  }

  s.sign_convention = get_number(root, "sign_convention", def.sign_convention);
  if (root.contains("coupler_load")) {
    const json& load = root.at("coupler_load");
    reject_unknown_keys(load, {"re", "im"}, "coupler_load");
    s.coupler_load = Complex(get_number(load, "re", 0.0), get_number(load, "im", 0.0));
  }
  if (root.contains("espar_bounds")) {
    const json& b = root.at("espar_bounds");
    reject_unknown_keys(b, {"x_min", "x_max"}, "espar_bounds");
    s.espar_bounds.x_min = get_number(b, "x_min", def.espar_bounds.x_min);
    s.espar_bounds.x_max = get_number(b, "x_max", def.espar_bounds.x_max);
  }

  s.optimizer = OptimizationConfig::defaults_for(lam);
  if (root.contains("optimizer")) {
    const json& o = root.at("optimizer");
    reject_unknown_keys(o,
                        {"max_outer_iterations", "step_init", "armijo_shrink", "armijo_slope",
                         "tolerance", "restarts", "fd_epsilon", "quantization_step"},
                        "optimizer");
    s.optimizer.max_outer_iterations =
        get_int(o, "max_outer_iterations", s.optimizer.max_outer_iterations);
    s.optimizer.step_init = get_number(o, "step_init", s.optimizer.step_init);
    s.optimizer.armijo_shrink = get_number(o, "armijo_shrink", s.optimizer.armijo_shrink);
    s.optimizer.armijo_slope = get_number(o, "armijo_slope", s.optimizer.armijo_slope);
    s.optimizer.tolerance = get_number(o, "tolerance", s.optimizer.tolerance);
    s.optimizer.restarts = get_int(o, "restarts", s.optimizer.restarts);
    s.optimizer.fd_epsilon = get_number(o, "fd_epsilon", s.optimizer.fd_epsilon);
    if (o.contains("quantization_step") && !o.at("quantization_step").is_null()) {
      s.optimizer.quantization_step = get_number(o, "quantization_step", 0.0);
    }
  }

  if (root.contains("estimator")) {
    const json& e = root.at("estimator");
    reject_unknown_keys(e,
                        {"azimuth_bins", "elevation_bins", "sparsity", "snapshots",
                         "noise_variance", "on_grid", "holdout_layouts"},
                        "estimator");
    s.estimator.azimuth_bins = get_int(e, "azimuth_bins", s.estimator.azimuth_bins);
    s.estimator.elevation_bins = get_int(e, "elevation_bins", s.estimator.elevation_bins);
    s.estimator.sparsity = get_int(e, "sparsity", s.estimator.sparsity);
    s.estimator.snapshots = get_int(e, "snapshots", 4 * s.estimator.sparsity);
    s.estimator.noise_variance = get_number(e, "noise_variance", s.estimator.noise_variance);
    s.estimator.on_grid = get_bool(e, "on_grid", s.estimator.on_grid);
    s.estimator.holdout_layouts = get_int(e, "holdout_layouts", s.estimator.holdout_layouts);
  }

  if (root.contains("gainmap")) {
    const json& g = root.at("gainmap");
    reject_unknown_keys(g, {"resolution", "coupler_index"}, "gainmap");
    s.gainmap.resolution = get_int(g, "resolution", s.gainmap.resolution);
    s.gainmap.coupler_index = get_int(g, "coupler_index", s.gainmap.coupler_index);
  }

  if (root.contains("planner")) {
    const json& p = root.at("planner");
    reject_unknown_keys(p, {"speed"}, "planner");
    s.planner.speed = get_number(p, "speed", s.planner.speed);
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["wavelength"] = s.wavelength;
  root["M"] = s.rca_count;
  root["N"] = s.couplers_per_rca;
  root["L"] = s.path_count;
  root["rca_spacing"] = s.rca_spacing;
  root["region_half_width"] = s.region_half_width;
  root["d_min"] = s.d_min;
  root["dipole_length"] = s.dipole_length;
  root["fixed_coupler_spacing"] = s.fixed_coupler_spacing;
  root["fully_active_spacing"] = s.fully_active_spacing;
  root["noise_power"] = s.noise_power;
  root["tx_powers_w"] = s.tx_powers_w;
  root["seeds"] = s.seeds;
  root["master_seed"] = s.master_seed;
  std::vector<std::string> names;
  for (Scheme sc : s.schemes) names.push_back(scheme_name(sc));
  root["schemes"] = names;
  root["sign_convention"] = s.sign_convention;
  root["coupler_load"] = {{"re", s.coupler_load.real()}, {"im", s.coupler_load.imag()}};
  root["espar_bounds"] = {{"x_min", s.espar_bounds.x_min}, {"x_max", s.espar_bounds.x_max}};
  json opt;
  opt["max_outer_iterations"] = s.optimizer.max_outer_iterations;
  opt["step_init"] = s.optimizer.step_init;
  opt["armijo_shrink"] = s.optimizer.armijo_shrink;
  opt["armijo_slope"] = s.optimizer.armijo_slope;
  opt["tolerance"] = s.optimizer.tolerance;
  opt["restarts"] = s.optimizer.restarts;
  opt["fd_epsilon"] = s.optimizer.fd_epsilon;
  if (s.optimizer.quantization_step) {
    opt["quantization_step"] = *s.optimizer.quantization_step;
  } else {
    opt["quantization_step"] = nullptr;
  }
  root["optimizer"] = opt;
  root["estimator"] = {{"azimuth_bins", s.estimator.azimuth_bins},
                       {"elevation_bins", s.estimator.elevation_bins},
                       {"sparsity", s.estimator.sparsity},
                       {"snapshots", s.estimator.snapshots},
                       {"noise_variance", s.estimator.noise_variance},
                       {"on_grid", s.estimator.on_grid},
                       {"holdout_layouts", s.estimator.holdout_layouts}};
  root["gainmap"] = {{"resolution", s.gainmap.resolution},
                     {"coupler_index", s.gainmap.coupler_index}};
  root["planner"] = {{"speed", s.planner.speed}};
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open scenario file for writing: " + path);
  out << scenario_to_json(s);
}

}  // namespace rca
