#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bouncelab/config.hpp"
#include "bouncelab/observables.hpp"
#include "bouncelab/perturbation.hpp"
#include "bouncelab/secular.hpp"

namespace bouncelab {

inline constexpr const char* version_string = "0.1.0";

struct PropagationOutcome {
  CorrelationTrace trace;
  std::optional<RevivalEstimate> estimate;
  std::vector<FractionalRevival> fractional;
  std::string failure;  // NoRevivalFound message when estimate is empty
  double n0 = 0.0;
  double t0 = 0.0;              // s, unperturbed revival time at n0
  double bounce_period = 0.0;   // s
  double max_norm_error = 0.0;  // max |norm - 1| over the trace
};

/// Propagates the configured packet over total_time and extracts the revival in
/// [window_lo, window_hi] * T0. Propagator errors propagate as exceptions.
PropagationOutcome run_propagation(const RunConfig& config);

double unperturbed_revival_time(const RunConfig& config);

/// One row of a revival-time comparison. NaN marks a method that failed; the
/// reason is appended to `flags`.
struct ComparisonRow {
  std::string key;
  double value = 0.0;
  double lambda_m = 0.0;
  double lambda_bar = 0.0;
  double t0 = 0.0;
  double numeric = 0.0, numeric_unc = 0.0, peak_height = 0.0;
  double norm_drift = 0.0;  // max |norm - 1| of the numeric trace
  double perturbative = 0.0, perturbative_unc = 0.0, perturbative_closed = 0.0;
  double secular = 0.0, secular_unc = 0.0, secular_closed = 0.0, secular_closed_a0 = 0.0;
  double q = 0.0, nu0 = 0.0, r = 0.0, a = 0.0;
  int order = 0;
  std::string flags;
};

struct ComparisonOptions {
  bool numeric = true;
  bool perturbative = true;
  bool secular = true;
  int workers = 0;  // 0: worker_count()
};

/// Evaluates each config point independently; rows come back in input order.
std::vector<ComparisonRow> run_comparison(const std::vector<RunConfig>& points,
                                          const std::string& key,
                                          const std::vector<double>& values,
                                          const ComparisonOptions& options);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// BOUNCELAB_WORKERS if set and positive, else hardware concurrency (>= 1).
int worker_count();

/// Runs task(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

struct RunManifest {
  std::string tool_version = version_string;
  std::string command;
  std::string config_text;
  std::vector<std::string> outputs;
  std::string input_hash;  // FNV-1a 64 of version, command and config text
};

RunManifest make_manifest(const std::string& command, const RunConfig& config);
std::uint64_t fnv1a(const std::string& text);
void write_manifest_json(std::ostream& out, const RunManifest& manifest);

}  // namespace bouncelab
