#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rca/scenario.hpp"

namespace rca {

// Deterministic seed derivation: master seed -> purpose stream -> index
// substream.  Workers never share generator state, so results are identical
// for any thread count.
enum class SeedPurpose : std::uint64_t {
  kPaths = 1,
  kOptimizer = 2,
  kEspar = 3,
  kMeasurementNoise = 4,
  kSnapshots = 5,
  kHoldout = 6,
  kPlanTarget = 7,
  kRandomSearch = 8,
};

std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose, std::uint64_t index);

// Runs fn(0..n-1) on up to `threads` workers; callers store results by index.
// The first (lowest-index) exception is rethrown after all workers join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct ComparisonRow {
  Scheme scheme;
  double tx_power_w;
  double mean_rate;  // NaN when every seed failed
  double std_rate;
  int seeds;  // number of successful seeds behind the row
};

struct ComparisonTable {
  std::vector<Scheme> schemes;
  std::vector<double> tx_powers_w;
  // per_seed_rates[scheme][seed] = rate per power point; nullopt marks a
  // failed (scheme, seed) combination.
  std::vector<std::vector<std::optional<std::vector<double>>>> per_seed_rates;
  std::vector<ComparisonRow> rows;  // scheme-major, powers ascending within
  // first sub-operation failure (scheme-major scan order), kept so partial
  // results can be flushed before the error propagates
  std::exception_ptr first_failure;

  std::string to_csv() const;
};

// Mean/std achievable rate per scheme and transmit power over
// scenario.seeds independently seeded channels.
ComparisonTable run_comparison(const Scenario& scenario, int threads);

// CSV-emitting subcommands (same cores the CLI binary calls).
void cmd_gainmap(const Scenario& scenario, int coupler_index, const std::string& out_path);
void cmd_compare(const Scenario& scenario, const std::string& out_path, int threads);
void cmd_optimize(const Scenario& scenario, const std::string& out_path);
void cmd_estimate(const Scenario& scenario, const std::string& out_path);
void cmd_plan(const Scenario& scenario, const std::string& out_path);

// trace CSV path -> companion layout CSV path ("runs/opt.csv" ->
// "runs/opt_layout.csv")
std::string layout_csv_path(const std::string& out_path);

// Exit-code mapping the CLI uses; tests pin it so every error class keeps a
// distinct code.
int exit_code_for_current_exception();
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUnknown = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConditioning = 3;
inline constexpr int kExitProjection = 4;
inline constexpr int kExitPlanning = 5;
inline constexpr int kExitSpacing = 6;

}  // namespace rca
