#include "eonsim/rsa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace eonsim {

const char* to_string(TrafficKind kind) {
  return kind == TrafficKind::video ? "video" : "non_video";
}

void CostWeights::validate() const {
  if (alpha < 0 || beta < 0 || alpha + beta <= 0)
    throw std::invalid_argument("CostWeights: need alpha, beta >= 0 and alpha + beta > 0");
}

namespace {

void validate_request(const NetworkTopology& topo, const ConnectionRequest& r, int n_fs) {
  if (r.src < 0 || r.src >= topo.node_count() || r.dst < 0 || r.dst >= topo.node_count())
    throw std::invalid_argument("request: node out of range");
  if (r.src == r.dst) throw std::invalid_argument("request: src == dst");
  if (r.slot_demand < 1 || r.slot_demand > n_fs)
    throw std::invalid_argument("request: slot demand outside [1, N_FS]");
  if (r.holding_s <= 0) throw std::invalid_argument("request: holding time must be positive");
}

// Total candidate order: cost, then shorter path, then node sequence, then
// lower start slot. Shared by the engine and the exhaustive oracle so both
// resolve ties identically.
struct CandidateKey {
  double f_cost;
  double path_length;
  const RoutePath* path;
  int start;
};

bool candidate_less(const NetworkTopology& topo, const CandidateKey& a, const CandidateKey& b) {
  if (a.f_cost != b.f_cost) return a.f_cost < b.f_cost;
  if (a.path_length != b.path_length) return a.path_length < b.path_length;
  const auto& an = a.path->nodes;
  const auto& bn = b.path->nodes;
  const size_t n = std::min(an.size(), bn.size());
  for (size_t i = 0; i < n; ++i)
    if (an[i] != bn[i]) return topo.node_ids()[an[i]] < topo.node_ids()[bn[i]];
  if (an.size() != bn.size()) return an.size() < bn.size();
  return a.start < b.start;
}

struct BestTracker {
  bool has = false;
  CandidateKey key{};
  RoutePath path;
  SpectrumBlock block;
  CandidateMetrics metrics;

  void offer(const NetworkTopology& topo, const RoutePath& p, const SpectrumBlock& b,
             const CandidateMetrics& m) {
    CandidateKey k{m.f_cost, p.length_km, &p, b.start};
    if (!has || candidate_less(topo, k, key)) {
      has = true;
      path = p;
      block = b;
      metrics = m;
      key = k;
      key.path = &path;
    }
  }
};

RsaOutcome decide_and_allocate(SpectrumGrid& grid, const ConnectionRequest& request,
                               BestTracker& best, const BestTracker& gated_best,
                               bool quality_fallback) {
  RsaOutcome out;
  if (!best.has) {
    out.status = RsaOutcome::Status::blocked;
    out.reason = BlockReason::congestion;
    return out;
  }
  if (request.kind == TrafficKind::video && best.metrics.utility < request.u_th) {
    if (quality_fallback && gated_best.has) {
      best = gated_best;
    } else {
      out.status = RsaOutcome::Status::blocked;
      out.reason = BlockReason::quality;
      out.path = best.path;
      out.block = best.block;
      out.metrics = best.metrics;
      return out;
    }
  }
  grid.allocate(best.path, best.block, request.id);
  out.status = RsaOutcome::Status::established;
  out.path = std::move(best.path);
  out.block = best.block;
  out.metrics = best.metrics;
  return out;
}

}  // namespace

CandidateMetrics evaluate_candidate(const SpectrumGrid& grid, const NetworkTopology& topo,
                                    const FiberParams& params, const QualityEstimator* estimator,
                                    const ConnectionRequest& request, const RoutePath& path,
                                    const SpectrumBlock& block, const CostWeights& weights) {
  CandidateMetrics m;
  const auto pairs = neighbor_links(topo, path);
  m.neighbor_pairs = static_cast<int>(pairs.size());
  m.cuts = count_cuts(grid, path, block);
  m.misalignment = misalignment_delta(grid, pairs, block);
  // The misalignment term is defined as 0 on degenerate paths with no neighbours.
  m.f_network = m.cuts;
  if (m.neighbor_pairs > 0)
    m.f_network += static_cast<double>(m.misalignment) /
                   (static_cast<double>(request.slot_demand) * m.neighbor_pairs);
  m.osnr_db = path_osnr_db(params, path);
  if (request.kind == TrafficKind::video) {
    if (!estimator)
      throw std::invalid_argument("evaluate_candidate: video request without an estimator");
    const double osnr_app = apparent_osnr(db_to_linear(m.osnr_db), params);
    m.ber = osnr_to_ber(osnr_app, params);
    auto [psnr, dfr] = estimate(*estimator, m.ber);
    m.psnr = psnr;
    m.dfr = dfr;
    m.utility = utility(psnr, dfr);
    m.f_video = video_cost(m.utility);
    m.f_cost = weights.alpha * m.f_network + weights.beta * m.f_video;
  } else {
    m.f_cost = weights.alpha * m.f_network;
  }
  return m;
}

RsaEngine::RsaEngine(const NetworkTopology& topo, FiberParams params, CostWeights weights,
                     RsaOptions options, const QualityEstimator* estimator)
    : topo_(topo), params_(std::move(params)), weights_(weights), options_(options),
      estimator_(estimator) {
  params_.validate();
  weights_.validate();
  if (options_.k < 1) throw std::invalid_argument("RsaEngine: k must be >= 1");
}

const std::vector<RoutePath>& RsaEngine::cached_paths(int src, int dst) {
  auto key = std::make_pair(src, dst);
  auto it = path_cache_.find(key);
  if (it == path_cache_.end())
    it = path_cache_.emplace(key, k_shortest_paths(topo_, src, dst, options_.k)).first;
  return it->second;
}

RsaOutcome RsaEngine::serve_request(SpectrumGrid& grid, const ConnectionRequest& request) {
  validate_request(topo_, request, grid.slot_count());
  BestTracker best, gated_best;
  for (const RoutePath& path : cached_paths(request.src, request.dst)) {
    for (const SpectrumBlock& block : free_contiguous_blocks(grid, path, request.slot_demand)) {
      const CandidateMetrics m =
          evaluate_candidate(grid, topo_, params_, estimator_, request, path, block, weights_);
      best.offer(topo_, path, block, m);
      if (request.kind == TrafficKind::video && m.utility >= request.u_th)
        gated_best.offer(topo_, path, block, m);
    }
  }
  return decide_and_allocate(grid, request, best, gated_best, options_.quality_fallback);
}

std::vector<RsaEngine::CandidateRow> RsaEngine::enumerate_candidates(
    const SpectrumGrid& grid, const ConnectionRequest& request) {
  validate_request(topo_, request, grid.slot_count());
  std::vector<CandidateRow> rows;
  for (const RoutePath& path : cached_paths(request.src, request.dst))
    for (const SpectrumBlock& block : free_contiguous_blocks(grid, path, request.slot_demand))
      rows.push_back({path, block,
                      evaluate_candidate(grid, topo_, params_, estimator_, request, path, block,
                                         weights_)});
  return rows;
}

RsaOutcome exhaustive_oracle(const SpectrumGrid& grid, const NetworkTopology& topo,
                             const FiberParams& params, const QualityEstimator* estimator,
                             const ConnectionRequest& request, const CostWeights& weights) {
  validate_request(topo, request, grid.slot_count());
  SpectrumGrid working = grid;
  BestTracker best, gated_best;
  for (const RoutePath& path : all_simple_paths(topo, request.src, request.dst)) {
    for (const SpectrumBlock& block : free_contiguous_blocks(working, path, request.slot_demand)) {
      const CandidateMetrics m =
          evaluate_candidate(working, topo, params, estimator, request, path, block, weights);
      best.offer(topo, path, block, m);
      if (request.kind == TrafficKind::video && m.utility >= request.u_th)
        gated_best.offer(topo, path, block, m);
    }
  }
  return decide_and_allocate(working, request, best, gated_best, false);
}

const char* const kDecisionLogHeader =
    "request_id,kind,slots,outcome,path,start_slot,f_network,f_video,f_cost,osnr_db,ber,psnr,dfr";

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string decision_log_line(const NetworkTopology& topo, const ConnectionRequest& request,
                              const RsaOutcome& outcome) {
  std::string path_str, start_str;
  if (outcome.path) {
    for (size_t i = 0; i < outcome.path->nodes.size(); ++i) {
      if (i) path_str += '-';
      path_str += topo.node_ids()[outcome.path->nodes[i]];
    }
  }
  if (outcome.block) start_str = std::to_string(outcome.block->start + 1);
  std::string outcome_str = outcome.established()
                                ? "established"
                                : (outcome.reason == BlockReason::congestion ? "blocked_congestion"
                                                                             : "blocked_quality");
  const CandidateMetrics m = outcome.metrics.value_or(CandidateMetrics{});
  std::string line;
  line += std::to_string(request.id);
  line += ',';
  line += to_string(request.kind);
  line += ',';
  line += std::to_string(request.slot_demand);
  line += ',';
  line += outcome_str;
  line += ',';
  line += path_str;
  line += ',';
  line += start_str;
  line += ',';
  line += outcome.metrics ? fmt_double(m.f_network) : "";
  line += ',';
  line += outcome.metrics ? fmt_double(m.f_video) : "";
  line += ',';
  line += outcome.metrics ? fmt_double(m.f_cost) : "";
  line += ',';
  line += outcome.metrics ? fmt_double(m.osnr_db) : "";
  line += ',';
  line += outcome.metrics ? fmt_double(m.ber) : "";
  line += ',';
  line += outcome.metrics ? fmt_double(m.psnr) : "";
  line += ',';
  line += outcome.metrics ? fmt_double(m.dfr) : "";
  return line;
}

}  // namespace eonsim
