#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "eonsim/qot.hpp"
#include "eonsim/spectrum.hpp"
#include "eonsim/topology.hpp"
#include "eonsim/video.hpp"

namespace eonsim {

enum class TrafficKind { video, non_video };

const char* to_string(TrafficKind kind);

struct ConnectionRequest {
  std::int64_t id = 0;
  int src = -1;
  int dst = -1;
  int slot_demand = 1;  // S_q
  TrafficKind kind = TrafficKind::non_video;
  double arrival_s = 0.0;
  double holding_s = 1.0;
  double u_th = 20.0;  // minimum utility, video only
};

struct CostWeights {
  double alpha = 1.0;  // network-cost weight
  double beta = 1.0;   // video-cost weight

  void validate() const;
};

/// Everything evaluated for one (path, block) candidate. Video fields are
/// NaN for non-video requests.
struct CandidateMetrics {
  int cuts = 0;              // N_c
  int misalignment = 0;      // N_m
  int neighbor_pairs = 0;    // N_NL
  double f_network = 0.0;
  double f_video = std::numeric_limits<double>::quiet_NaN();
  double f_cost = 0.0;
  double osnr_db = 0.0;
  double ber = std::numeric_limits<double>::quiet_NaN();
  double psnr = std::numeric_limits<double>::quiet_NaN();
  double dfr = std::numeric_limits<double>::quiet_NaN();
  double utility = std::numeric_limits<double>::quiet_NaN();
};

enum class BlockReason { congestion, quality };

struct RsaOutcome {
  enum class Status { established, blocked };
  Status status = Status::blocked;
  BlockReason reason = BlockReason::congestion;
  std::optional<RoutePath> path;
  std::optional<SpectrumBlock> block;
  std::optional<CandidateMetrics> metrics;  // winner's metrics; kept on quality blocks too

  bool established() const { return status == Status::established; }
};

struct RsaOptions {
  int k = 3;
  /// Non-normative fallback: when the cheapest candidate fails the video
  /// gate, pick the cheapest candidate that passes instead of blocking.
  bool quality_fallback = false;
};

CandidateMetrics evaluate_candidate(const SpectrumGrid& grid, const NetworkTopology& topo,
                                    const FiberParams& params, const QualityEstimator* estimator,
                                    const ConnectionRequest& request, const RoutePath& path,
                                    const SpectrumBlock& block, const CostWeights& weights);

/// Algorithm: enumerate candidate blocks over the k shortest paths, pick the
/// global minimum F_cost (ties: shorter path, then node sequence, then lower
/// start slot), gate video winners on U >= u_th, then allocate.
class RsaEngine {
 public:
  RsaEngine(const NetworkTopology& topo, FiberParams params, CostWeights weights,
            RsaOptions options, const QualityEstimator* estimator);

  RsaOutcome serve_request(SpectrumGrid& grid, const ConnectionRequest& request);

  /// Candidate table for one request without allocating; used by `inspect`.
  struct CandidateRow {
    RoutePath path;
    SpectrumBlock block;
    CandidateMetrics metrics;
  };
  std::vector<CandidateRow> enumerate_candidates(const SpectrumGrid& grid,
                                                 const ConnectionRequest& request);

  const NetworkTopology& topology() const { return topo_; }
  const FiberParams& params() const { return params_; }
  const CostWeights& weights() const { return weights_; }
  const RsaOptions& options() const { return options_; }

 private:
  const std::vector<RoutePath>& cached_paths(int src, int dst);

  const NetworkTopology& topo_;
  FiberParams params_;
  CostWeights weights_;
  RsaOptions options_;
  const QualityEstimator* estimator_;
  std::map<std::pair<int, int>, std::vector<RoutePath>> path_cache_;
};

/// Brute-force reference: every simple path, every block, same cost and gate.
/// serve_request must match its F_cost whenever the winner's path is among
/// the k shortest. Intended for small instances only.
RsaOutcome exhaustive_oracle(const SpectrumGrid& grid, const NetworkTopology& topo,
                             const FiberParams& params, const QualityEstimator* estimator,
                             const ConnectionRequest& request, const CostWeights& weights);

/// One CSV decision-log line (slots displayed 1-based).
std::string decision_log_line(const NetworkTopology& topo, const ConnectionRequest& request,
                              const RsaOutcome& outcome);
extern const char* const kDecisionLogHeader;

}  // namespace eonsim
