#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "eonsim/config.hpp"
#include "eonsim/rsa.hpp"
#include "eonsim/sim.hpp"

namespace fs = std::filesystem;
using namespace eonsim;

namespace {

std::string fmt(double v, const char* spec = "%.10g") {
  if (std::isnan(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

ConfigDoc load_config(const std::string& path) {
  if (path.empty()) return ConfigDoc::parse("");
  ConfigDoc doc = ConfigDoc::load_file(path);
  doc.check_known_keys();
  return doc;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoull(item));
  }
  if (out.empty()) throw std::runtime_error("--seed: empty seed list");
  return out;
}

// --- train -------------------------------------------------------------

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::string& seed_text) {
  ConfigDoc doc = load_config(config_path);
  GopModel gop = gop_from_config(doc);
  TrainOptions train = train_options_from_config(doc);
  std::uint64_t seed = seed_text.empty() ? doc.get_uint64("scenario", "seed", 1)
                                         : parse_seed_list(seed_text).front();

  fs::create_directories(out_dir);

  TrainResult result = train_quality_model(gop, train.ber_grid, train.gops_per_point,
                                           train.fit, seed);

  std::string gt_csv = "ber,psnr,dfr\n";
  for (const auto& s : result.ground_truth)
    gt_csv += fmt(s.ber) + "," + fmt(s.psnr) + "," + fmt(s.dfr) + "\n";
  write_file(fs::path(out_dir) / "ground_truth.csv", gt_csv);

  std::string report = "neurons,train_mse,test_mse\n";
  for (const auto& row : result.curve)
    report += std::to_string(row.neurons) + "," + fmt(row.train_mse) + "," +
              fmt(row.test_mse) + "\n";
  write_file(fs::path(out_dir) / "training_report.csv", report);
  result.model.save_file((fs::path(out_dir) / "model.json").string());

  std::printf("trained %zu neurons; train MSE %.6g, test MSE %.6g\n",
              result.model.centers_ber.size(), result.model.final_train_mse,
              result.final_test_mse);
  std::printf("wrote %s/model.json, training_report.csv, ground_truth.csv\n", out_dir.c_str());
  return 0;
}

// --- run ---------------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& topology_override, const std::string& loads_override,
            const std::string& seed_text, double beta_override, const std::string& data_dir,
            const std::string& request_log) {
  ConfigDoc doc = load_config(config_path);
  ScenarioConfig config = scenario_from_config(doc);
  if (!topology_override.empty()) config.topology = topology_override;
  if (!loads_override.empty()) {
    config.load_points.clear();
    std::istringstream ss(loads_override);
    std::string item;
    while (std::getline(ss, item, ',')) config.load_points.push_back(std::stod(item));
  }
  if (beta_override >= 0) config.weights.beta = beta_override;
  std::vector<std::uint64_t> seeds =
      seed_text.empty() ? std::vector<std::uint64_t>{config.seed} : parse_seed_list(seed_text);
  config.validate();

  NetworkTopology topo =
      NetworkTopology::load_file(resolve_topology_path(config.topology, data_dir));

  QualityEstimator estimator;
  const QualityEstimator* est_ptr = nullptr;
  if (config.p_video > 0) {
    if (config.model_path.empty())
      throw std::runtime_error("run: video traffic configured but no model file given "
                               "(set [scenario] model or p_video = 0)");
    estimator = QualityEstimator::load_file(config.model_path);
    est_ptr = &estimator;
  }

  fs::create_directories(out_dir);
  std::ofstream log_stream;
  std::function<void(const std::string&)> log_sink;
  if (!request_log.empty()) {
    log_stream.open(request_log, std::ios::binary | std::ios::trunc);
    if (!log_stream) throw std::runtime_error("cannot write '" + request_log + "'");
    log_stream << kDecisionLogHeader << '\n';
    log_sink = [&log_stream](const std::string& line) { log_stream << line << '\n'; };
  }
  std::vector<MetricsReport> reports;
  int failures = 0;
  for (std::uint64_t seed : seeds) {
    ScenarioConfig c = config;
    c.seed = seed;
    try {
      reports.push_back(run_scenario(c, topo, est_ptr, log_sink));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "replication seed=%llu failed: %s\n",
                   static_cast<unsigned long long>(seed), e.what());
      ++failures;
    }
  }
  write_file(fs::path(out_dir) / "results.csv", metrics_csv(reports));
  write_file(fs::path(out_dir) / "summary.json", metrics_summary_json(reports));
  std::printf("wrote %s/results.csv and summary.json (%zu replications, %d failed)\n",
              out_dir.c_str(), reports.size(), failures);
  return failures == 0 ? 0 : 1;
}

// --- inspect -----------------------------------------------------------

int cmd_inspect(const std::string& config_path, const std::string& topology,
                const std::string& grid_path, const std::string& src, const std::string& dst,
                int slots, const std::string& kind_text, const std::string& model_path, int k,
                const std::string& data_dir) {
  ConfigDoc doc = load_config(config_path);
  FiberParams fiber = fiber_from_config(doc);
  NetworkTopology topo = NetworkTopology::load_file(resolve_topology_path(topology, data_dir));

  SpectrumGrid grid = [&] {
    if (grid_path.empty()) return SpectrumGrid(topo.link_count(), fiber.grid_slots);
    std::ifstream in(grid_path);
    if (!in) throw std::runtime_error("cannot open grid snapshot '" + grid_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return SpectrumGrid::parse_snapshot(topo, ss.str());
  }();
  fiber.grid_slots = grid.slot_count();

  ConnectionRequest req;
  req.id = 0;
  req.src = topo.node_index(src);
  req.dst = topo.node_index(dst);
  if (req.src < 0 || req.dst < 0) throw std::runtime_error("inspect: unknown node id");
  req.slot_demand = slots;
  req.kind = kind_text == "video" ? TrafficKind::video : TrafficKind::non_video;
  req.u_th = doc.get_double("scenario", "u_th", 20.0);

  QualityEstimator estimator;
  const QualityEstimator* est_ptr = nullptr;
  if (req.kind == TrafficKind::video) {
    if (model_path.empty()) throw std::runtime_error("inspect: video request needs --model");
    estimator = QualityEstimator::load_file(model_path);
    est_ptr = &estimator;
  }

  CostWeights weights;
  weights.alpha = doc.get_double("weights", "alpha", 1.0);
  weights.beta = doc.get_double("weights", "beta", 1.0);
  RsaOptions options;
  options.k = k;

  RsaEngine engine(topo, fiber, weights, options, est_ptr);
  auto rows = engine.enumerate_candidates(grid, req);

  std::printf("request %s -> %s, %d slot(s), %s; slots shown 1-based\n", src.c_str(), dst.c_str(),
              slots, to_string(req.kind));
  std::printf("%-18s %-9s %4s %4s %5s %9s %9s %9s %9s %9s %7s %7s %9s\n", "path", "slots", "N_c",
              "N_m", "N_NL", "F_net", "OSNR_dB", "BER", "PSNR", "DFR", "U", "F_video", "F_cost");
  for (const auto& row : rows) {
    std::string path_str;
    for (size_t i = 0; i < row.path.nodes.size(); ++i) {
      if (i) path_str += '-';
      path_str += topo.node_ids()[row.path.nodes[i]];
    }
    std::string block_str = "{" + std::to_string(row.block.start + 1) + ".." +
                            std::to_string(row.block.start + row.block.size) + "}";
    const auto& m = row.metrics;
    std::printf("%-18s %-9s %4d %4d %5d %9.4g %9.4g %9.3g %9.4g %9.4g %7.4g %7.4g %9.4g\n",
                path_str.c_str(), block_str.c_str(), m.cuts, m.misalignment, m.neighbor_pairs,
                m.f_network, m.osnr_db, m.ber, m.psnr, m.dfr, m.utility, m.f_video, m.f_cost);
  }

  SpectrumGrid scratch = grid;
  req.id = 1;
  RsaOutcome outcome = engine.serve_request(scratch, req);
  if (outcome.established()) {
    std::string path_str;
    for (size_t i = 0; i < outcome.path->nodes.size(); ++i) {
      if (i) path_str += '-';
      path_str += topo.node_ids()[outcome.path->nodes[i]];
    }
    std::printf("decision: establish on %s slots {%d..%d}, F_cost %.6g\n", path_str.c_str(),
                outcome.block->start + 1, outcome.block->start + outcome.block->size,
                outcome.metrics->f_cost);
  } else {
    std::printf("decision: %s\n", outcome.reason == BlockReason::congestion
                                      ? "blocked (congestion)"
                                      : "blocked (quality)");
  }
  return 0;
}

// --- validate-fixtures ---------------------------------------------------

int cmd_validate_fixtures(const std::string& data_dir) {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok) ++failures;
  };

  NetworkTopology fig1 = NetworkTopology::load_file(data_dir + "/fig1.json");
  NetworkTopology nsf = NetworkTopology::load_file(data_dir + "/nsfnet.json");
  NetworkTopology usb = NetworkTopology::load_file(data_dir + "/usbackbone.json");
  check(fig1.node_count() == 6 && fig1.link_count() == 8, "fig1: 6 nodes, 8 links");
  check(nsf.node_count() == 14, "nsfnet: 14 nodes");
  check(usb.node_count() == 24, "usbackbone: 24 nodes");

  std::ifstream in(data_dir + "/fig1-grid.txt");
  std::ostringstream ss;
  ss << in.rdbuf();
  SpectrumGrid grid = SpectrumGrid::parse_snapshot(fig1, ss.str());
  check(grid.slot_count() == 10, "fig1 grid: 10 slots");

  const int A = fig1.node_index("A"), F = fig1.node_index("F");
  auto paths = k_shortest_paths(fig1, A, F, 2);
  check(paths.size() == 2, "fig1: two candidate routes A->F");
  const RoutePath& acef = paths[0];
  const RoutePath& abdf = paths[1];
  check(acef.nodes.size() == 4 && fig1.node_ids()[acef.nodes[1]] == "C", "route 1 is A-C-E-F");
  check(abdf.nodes.size() == 4 && fig1.node_ids()[abdf.nodes[1]] == "B", "route 2 is A-B-D-F");

  auto blocks1 = free_contiguous_blocks(grid, acef, 2);
  check(blocks1.size() == 2 && blocks1[0].start == 7 && blocks1[1].start == 8,
        "A-C-E-F candidates are {8,9} and {9,10}");
  auto blocks2 = free_contiguous_blocks(grid, abdf, 2);
  check(blocks2.size() == 1 && blocks2[0].start == 4, "A-B-D-F candidate is {5,6}");

  check(count_cuts(grid, acef, {7, 2}) == 2, "cuts(A-C-E-F, {8,9}) = 2");
  check(count_cuts(grid, acef, {8, 2}) == 0, "cuts(A-C-E-F, {9,10}) = 0");
  check(count_cuts(grid, abdf, {4, 2}) == 1, "cuts(A-B-D-F, {5,6}) = 1");

  check(static_cast<int>(neighbor_links(fig1, acef).size()) == 6, "A-C-E-F has 6 neighbour pairs");
  check(static_cast<int>(neighbor_links(fig1, abdf).size()) == 5, "A-B-D-F has 5 neighbour pairs");
  check(misalignment_delta(grid, fig1, acef, {7, 2}) == 6, "misalignment(A-C-E-F, {8,9}) = 6");
  check(misalignment_delta(grid, fig1, acef, {8, 2}) == 8, "misalignment(A-C-E-F, {9,10}) = 8");
  check(misalignment_delta(grid, fig1, abdf, {4, 2}) == -6, "misalignment(A-B-D-F, {5,6}) = -6");

  FiberParams fiber;
  fiber.grid_slots = grid.slot_count();
  CostWeights weights;
  ConnectionRequest req;
  req.id = 1;
  req.src = A;
  req.dst = F;
  req.slot_demand = 2;
  req.kind = TrafficKind::non_video;
  RsaEngine engine(fig1, fiber, weights, {2, false}, nullptr);
  SpectrumGrid scratch = grid;
  RsaOutcome outcome = engine.serve_request(scratch, req);
  check(outcome.established() && outcome.block->start == 4 &&
            fig1.node_ids()[outcome.path->nodes[1]] == "B",
        "winner is A-B-D-F with {5,6}");
  check(outcome.metrics && std::abs(outcome.metrics->f_network - 0.4) < 1e-12,
        "winning F_network = 0.4");

  std::printf(failures ? "%d fixture check(s) FAILED\n" : "all fixture checks passed\n", failures);
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic optical network RSA simulator with video-quality-aware provisioning"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", topology, loads, seeds, grid_path;
  std::string src, dst, kind = "nonvideo", model_path, data_dir = "data", request_log;
  int slots = 1, k = 3;
  double beta_override = -1.0;

  auto* train = app.add_subcommand("train", "Fit the BER->(PSNR, DFR) quality model");
  train->add_option("--config", config_path, "configuration file");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--seed", seeds, "training seed");

  auto* run = app.add_subcommand("run", "Run traffic scenarios and write result tables");
  run->add_option("--config", config_path, "configuration file");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--topology", topology, "bundled topology name or JSON path");
  run->add_option("--loads", loads, "comma list of Erlang load points");
  run->add_option("--seed", seeds, "comma list of replication seeds");
  run->add_option("--beta", beta_override, "override the video-cost weight");
  run->add_option("--data-dir", data_dir, "bundled topology directory");
  run->add_option("--log-requests", request_log, "per-request decision log CSV");

  auto* inspect = app.add_subcommand("inspect", "Trace one request through the decision engine");
  inspect->add_option("--config", config_path, "configuration file");
  inspect->add_option("--topology", topology, "bundled topology name or JSON path")->required();
  inspect->add_option("--grid", grid_path, "grid snapshot file (default: empty grid)");
  inspect->add_option("--src", src, "source node id")->required();
  inspect->add_option("--dst", dst, "destination node id")->required();
  inspect->add_option("--slots", slots, "requested slot count")->required();
  inspect->add_option("--kind", kind, "video | nonvideo");
  inspect->add_option("--model", model_path, "quality model (video requests)");
  inspect->add_option("--k", k, "candidate path count");
  inspect->add_option("--data-dir", data_dir, "bundled topology directory");

  auto* validate = app.add_subcommand("validate-fixtures", "Replay the bundled worked example");
  validate->add_option("--data-dir", data_dir, "bundled topology directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return cmd_train(config_path, out_dir, seeds);
    if (app.got_subcommand(run))
      return cmd_run(config_path, out_dir, topology, loads, seeds, beta_override, data_dir,
                     request_log);
    if (app.got_subcommand(inspect))
      return cmd_inspect(config_path, topology, grid_path, src, dst, slots, kind, model_path, k,
                         data_dir);
    if (app.got_subcommand(validate)) return cmd_validate_fixtures(data_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
