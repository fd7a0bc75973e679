#include "eonsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace eonsim {

void ScenarioConfig::validate() const {
  if (n_fs < 1) throw std::invalid_argument("scenario: n_fs must be >= 1");
  if (mu <= 0) throw std::invalid_argument("scenario: mu must be positive");
  if (load_points.empty()) throw std::invalid_argument("scenario: need at least one load point");
  for (double l : load_points)
    if (l <= 0) throw std::invalid_argument("scenario: load points must be positive");
  if (p_video < 0 || p_video > 1) throw std::invalid_argument("scenario: p_video outside [0, 1]");
  if (slot_min < 1 || slot_max < slot_min || slot_max > n_fs)
    throw std::invalid_argument("scenario: slot demand range invalid");
  if (total_requests <= warmup_requests || warmup_requests < 0)
    throw std::invalid_argument("scenario: need total_requests > warmup_requests >= 0");
  if (validate_every < 0) throw std::invalid_argument("scenario: validate_every must be >= 0");
  weights.validate();
  fiber.validate();
}

double blocking_probability(const std::vector<std::pair<int, bool>>& records) {
  if (records.empty()) throw std::invalid_argument("blocking_probability: no records");
  double offered = 0.0, blocked = 0.0;
  for (const auto& [slots, was_blocked] : records) {
    offered += slots;
    if (was_blocked) blocked += slots;
  }
  return blocked / offered;
}

std::vector<ConnectionRequest> generate_traffic(const ScenarioConfig& config,
                                                const NetworkTopology& topo, double lambda,
                                                std::mt19937_64& rng) {
  if (lambda <= 0) throw std::invalid_argument("generate_traffic: lambda must be positive");
  std::exponential_distribution<double> inter_arrival(lambda);
  std::exponential_distribution<double> holding(config.mu);
  std::uniform_int_distribution<int> node_pick(0, topo.node_count() - 1);
  std::uniform_int_distribution<int> slot_pick(config.slot_min, config.slot_max);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<ConnectionRequest> out;
  out.reserve(config.total_requests);
  double t = 0.0;
  for (int i = 0; i < config.total_requests; ++i) {
    t += inter_arrival(rng);
    ConnectionRequest r;
    r.id = i + 1;
    r.src = node_pick(rng);
    do {
      r.dst = node_pick(rng);
    } while (r.dst == r.src);
    r.slot_demand = slot_pick(rng);
    r.kind = coin(rng) < config.p_video ? TrafficKind::video : TrafficKind::non_video;
    r.arrival_s = t;
    r.holding_s = holding(rng);
    r.u_th = config.u_th;
    out.push_back(r);
  }
  return out;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step over seed^salt
  std::uint64_t z = seed ^ (salt * 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct KindAccumulator {
  double offered_slots = 0.0;
  double blocked_slots = 0.0;
  std::int64_t n_offered = 0;
  std::int64_t n_congestion = 0;
  std::int64_t n_quality = 0;
  double osnr_sum = 0.0;
  std::int64_t osnr_n = 0;
  double dfr_sum = 0.0;
  double psnr_sum = 0.0;
  std::int64_t video_n = 0;
};

MetricsRow finish_row(double load, TrafficKind kind, const KindAccumulator& acc) {
  MetricsRow row;
  row.load_erlang = load;
  row.kind = kind;
  row.n_offered = acc.n_offered;
  row.n_blocked_congestion = acc.n_congestion;
  row.n_blocked_quality = acc.n_quality;
  if (acc.n_offered == 0) {
    row.zero_sample = true;
    row.bp = 0.0;
  } else {
    row.bp = acc.blocked_slots / acc.offered_slots;
  }
  if (acc.osnr_n > 0) row.mean_osnr_db = acc.osnr_sum / acc.osnr_n;
  if (acc.video_n > 0) {
    row.mean_dfr = acc.dfr_sum / acc.video_n;
    row.mean_psnr = acc.psnr_sum / acc.video_n;
  }
  return row;
}

}  // namespace

MetricsReport run_scenario(const ScenarioConfig& config, const NetworkTopology& topo,
                           const QualityEstimator* estimator,
                           const std::function<void(const std::string&)>& request_log) {
  config.validate();
  if (config.p_video > 0 && estimator == nullptr)
    throw std::invalid_argument("run_scenario: video traffic configured without an estimator");
  FiberParams fiber = config.fiber;
  fiber.grid_slots = config.n_fs;

  MetricsReport report;
  report.topology = topo.name();
  report.seed = config.seed;

  for (size_t load_idx = 0; load_idx < config.load_points.size(); ++load_idx) {
    const double load = config.load_points[load_idx];
    const double lambda = load * config.mu;
    std::mt19937_64 rng(mix_seed(config.seed, load_idx));
    const std::vector<ConnectionRequest> arrivals =
        generate_traffic(config, topo, lambda, rng);

    SpectrumGrid grid(topo.link_count(), config.n_fs);
    RsaEngine engine(topo, fiber, config.weights, config.rsa, estimator);

    // Event loop: departures sort before arrivals at equal timestamps.
    struct Event {
      double time;
      int type;  // 0 departure, 1 arrival
      std::int64_t seq;
      int request_idx;
    };
    auto later = [](const Event& a, const Event& b) {
      if (a.time != b.time) return a.time > b.time;
      if (a.type != b.type) return a.type > b.type;
      return a.seq > b.seq;
    };
    std::priority_queue<Event, std::vector<Event>, decltype(later)> events(later);
    for (int i = 0; i < static_cast<int>(arrivals.size()); ++i)
      events.push({arrivals[i].arrival_s, 1, i, i});

    std::map<std::int64_t, Assignment> live;
    KindAccumulator acc_video, acc_nonvideo;
    std::int64_t event_no = 0;
    std::int64_t departure_seq = config.total_requests;

    auto run_validation = [&]() {
      std::vector<Assignment> list;
      list.reserve(live.size());
      for (const auto& [id, a] : live) list.push_back(a);
      report.constraint_violations +=
          static_cast<std::int64_t>(validate_assignment(grid, list).size());
    };

    while (!events.empty()) {
      const Event ev = events.top();
      events.pop();
      ++event_no;
      if (ev.type == 0) {
        grid.release(live.at(ev.request_idx).request);
        live.erase(ev.request_idx);
      } else {
        const ConnectionRequest& req = arrivals[ev.request_idx];
        const RsaOutcome outcome = engine.serve_request(grid, req);
        if (request_log) request_log(decision_log_line(topo, req, outcome));
        const bool counted = ev.request_idx >= config.warmup_requests;
        KindAccumulator& acc =
            req.kind == TrafficKind::video ? acc_video : acc_nonvideo;
        if (outcome.established()) {
          live[req.id] = {req.id, *outcome.path, *outcome.block};
          events.push({req.arrival_s + req.holding_s, 0, departure_seq++,
                       static_cast<int>(req.id)});
          if (req.kind == TrafficKind::video && outcome.metrics->utility < req.u_th)
            ++report.video_gate_violations;
        }
        if (counted) {
          ++acc.n_offered;
          acc.offered_slots += req.slot_demand;
          if (outcome.established()) {
            acc.osnr_sum += outcome.metrics->osnr_db;
            ++acc.osnr_n;
            if (req.kind == TrafficKind::video) {
              acc.dfr_sum += outcome.metrics->dfr;
              acc.psnr_sum += outcome.metrics->psnr;
              ++acc.video_n;
            }
          } else {
            acc.blocked_slots += req.slot_demand;
            if (outcome.reason == BlockReason::congestion)
              ++acc.n_congestion;
            else
              ++acc.n_quality;
          }
        }
      }
      if (config.validate_every > 0 && event_no % config.validate_every == 0) run_validation();
    }
    run_validation();

    report.rows.push_back(finish_row(load, TrafficKind::video, acc_video));
    report.rows.push_back(finish_row(load, TrafficKind::non_video, acc_nonvideo));
  }
  return report;
}

const char* const kMetricsCsvHeader =
    "topology,seed,load_erlang,kind,bp,mean_osnr_db,mean_dfr,mean_psnr,"
    "n_offered,n_blocked_congestion,n_blocked_quality";

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string metrics_csv(const std::vector<MetricsReport>& reports) {
  std::string out = kMetricsCsvHeader;
  out += '\n';
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      out += rep.topology;
      out += ',';
      out += std::to_string(rep.seed);
      out += ',';
      out += fmt(row.load_erlang);
      out += ',';
      out += to_string(row.kind);
      out += ',';
      out += fmt(row.bp);
      out += ',';
      out += fmt(row.mean_osnr_db);
      out += ',';
      out += fmt(row.mean_dfr);
      out += ',';
      out += fmt(row.mean_psnr);
      out += ',';
      out += std::to_string(row.n_offered);
      out += ',';
      out += std::to_string(row.n_blocked_congestion);
      out += ',';
      out += std::to_string(row.n_blocked_quality);
      out += '\n';
    }
  }
  return out;
}

std::string metrics_summary_json(const std::vector<MetricsReport>& reports) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& rep : reports) {
    nlohmann::json r;
    r["topology"] = rep.topology;
    r["seed"] = rep.seed;
    r["constraint_violations"] = rep.constraint_violations;
    r["video_gate_violations"] = rep.video_gate_violations;
    r["rows"] = nlohmann::json::array();
    for (const auto& row : rep.rows) {
      nlohmann::json j;
      j["load_erlang"] = row.load_erlang;
      j["kind"] = to_string(row.kind);
      j["bp"] = row.bp;
      j["zero_sample"] = row.zero_sample;
      j["mean_osnr_db"] = std::isnan(row.mean_osnr_db) ? nlohmann::json() : nlohmann::json(row.mean_osnr_db);
      j["mean_dfr"] = std::isnan(row.mean_dfr) ? nlohmann::json() : nlohmann::json(row.mean_dfr);
      j["mean_psnr"] = std::isnan(row.mean_psnr) ? nlohmann::json() : nlohmann::json(row.mean_psnr);
      j["n_offered"] = row.n_offered;
      j["n_blocked_congestion"] = row.n_blocked_congestion;
      j["n_blocked_quality"] = row.n_blocked_quality;
      r["rows"].push_back(j);
    }
    doc.push_back(r);
  }
  return doc.dump(2) + "\n";
}

}  // namespace eonsim
