#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "eonsim/rsa.hpp"

namespace eonsim {

/// One Monte Carlo scenario: dynamic Poisson traffic over one topology,
/// swept over a list of offered loads (load = lambda/mu Erlang, controlled
/// through lambda).
struct ScenarioConfig {
  std::string topology = "nsfnet";  // bundled name or path to a JSON document
  int n_fs = 128;
  double mu = 1.0;
  std::vector<double> load_points = {100, 300, 600};
  double p_video = 0.8;
  int slot_min = 1;
  int slot_max = 10;
  CostWeights weights;
  FiberParams fiber;
  std::string model_path;  // quality-estimator model; required when p_video > 0
  int total_requests = 10000;
  int warmup_requests = 1000;
  std::uint64_t seed = 1;
  double u_th = 20.0;
  RsaOptions rsa;
  /// Re-run the full constraint check every N processed events (0 = ends only).
  int validate_every = 0;

  void validate() const;
};

struct MetricsRow {
  double load_erlang = 0.0;
  TrafficKind kind = TrafficKind::non_video;
  double bp = 0.0;
  bool zero_sample = false;  // no post-warmup requests of this kind
  double mean_osnr_db = std::numeric_limits<double>::quiet_NaN();
  double mean_dfr = std::numeric_limits<double>::quiet_NaN();
  double mean_psnr = std::numeric_limits<double>::quiet_NaN();
  std::int64_t n_offered = 0;
  std::int64_t n_blocked_congestion = 0;
  std::int64_t n_blocked_quality = 0;
};

struct MetricsReport {
  std::string topology;
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;  // two rows (video / non-video) per load point
  std::int64_t constraint_violations = 0;
  std::int64_t video_gate_violations = 0;
};

/// Slot-weighted blocking probability: sum of blocked demands over sum of
/// all demands. `records` holds (requested slots, blocked?).
double blocking_probability(const std::vector<std::pair<int, bool>>& records);

/// Pre-generated arrival stream; independent of the cost weights so matched
/// seeds see identical traffic under different engines.
std::vector<ConnectionRequest> generate_traffic(const ScenarioConfig& config,
                                                const NetworkTopology& topo, double lambda,
                                                std::mt19937_64& rng);

/// Runs every load point of the scenario. Deterministic given the seed.
/// `request_log`, when set, receives one decision-log CSV line per arrival.
MetricsReport run_scenario(const ScenarioConfig& config, const NetworkTopology& topo,
                           const QualityEstimator* estimator,
                           const std::function<void(const std::string&)>& request_log = {});

/// CSV/JSON writers for one or more replications.
std::string metrics_csv(const std::vector<MetricsReport>& reports);
std::string metrics_summary_json(const std::vector<MetricsReport>& reports);
extern const char* const kMetricsCsvHeader;

}  // namespace eonsim
