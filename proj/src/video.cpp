#include "eonsim/video.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"

namespace eonsim {

namespace {

constexpr double kBerFloor = 1e-12;  // log-space clamp for ber -> input transform

double packet_error_prob(double ber, std::int64_t packet_bits) {
  if (ber <= 0) return 0.0;
  if (ber >= 1) return 1.0;
  // 1 - (1-ber)^bits, evaluated stably for tiny ber
  return -std::expm1(static_cast<double>(packet_bits) * std::log1p(-ber));
}

// Positions of the I/P anchors and, per frame, its reference frames.
struct GopDependencies {
  std::vector<std::vector<int>> refs;  // refs[i] = frames frame i needs decoded
};

GopDependencies build_dependencies(const GopModel& gop) {
  GopDependencies deps;
  deps.refs.resize(gop.gop_length);
  int last_anchor = -1;
  std::vector<int> anchors;
  for (int i = 0; i < gop.gop_length; ++i)
    if (gop.pattern[i] != 'B') anchors.push_back(i);
  for (int i = 0; i < gop.gop_length; ++i) {
    char t = gop.pattern[i];
    if (t == 'I') {
      last_anchor = i;
    } else if (t == 'P') {
      deps.refs[i].push_back(last_anchor);
      last_anchor = i;
    } else {  // B: nearest anchors on both sides; trailing Bs have none ahead
      int prev = -1, next = -1;
      for (int a : anchors) {
        if (a < i) prev = a;
        if (a > i && next < 0) next = a;
      }
      deps.refs[i].push_back(prev);
      if (next >= 0) deps.refs[i].push_back(next);
    }
  }
  return deps;
}

}  // namespace

void GopModel::validate() const {
  if (gop_length < 1 || static_cast<int>(pattern.size()) != gop_length)
    throw std::invalid_argument("GopModel: pattern length must equal gop_length");
  if (pattern[0] != 'I') throw std::invalid_argument("GopModel: first frame must be I");
  for (char c : pattern)
    if (c != 'I' && c != 'P' && c != 'B')
      throw std::invalid_argument("GopModel: pattern may only contain I/P/B");
  if (theta <= 0 || theta > 1) throw std::invalid_argument("GopModel: theta must be in (0, 1]");
  if (psnr_enc_db <= 0) throw std::invalid_argument("GopModel: baseline PSNR must be positive");
  if (packet_bits < 1 || i_frame_bits < 1 || p_frame_bits < 1 || b_frame_bits < 1)
    throw std::invalid_argument("GopModel: sizes must be positive");
}

std::int64_t GopModel::frame_bits(char type) const {
  switch (type) {
    case 'I': return i_frame_bits;
    case 'P': return p_frame_bits;
    case 'B': return b_frame_bits;
    default: throw std::invalid_argument("GopModel: unknown frame type");
  }
}

int GopModel::packets_per_frame(char type) const {
  const std::int64_t bits = frame_bits(type);
  return static_cast<int>((bits + packet_bits - 1) / packet_bits);
}

double psnr_from_mse(double mse) {
  if (mse < 0) throw std::invalid_argument("psnr_from_mse: negative mse");
  if (mse == 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

GroundTruthStats generate_ground_truth_detailed(const GopModel& gop, double ber, int gop_count,
                                                std::uint64_t seed) {
  gop.validate();
  if (gop_count < 1) throw std::invalid_argument("generate_ground_truth: gop_count must be >= 1");
  if (ber < 0 || ber > 0.5) throw std::invalid_argument("generate_ground_truth: ber outside [0, 0.5]");

  const double p_pkt = packet_error_prob(ber, gop.packet_bits);
  std::mt19937_64 rng(seed);

  std::int64_t decodable_total = 0;
  double psnr_sum = 0.0;
  std::int64_t psnr_frames = 0;
  double dfr_sq_sum = 0.0;

  std::vector<char> intact(gop.gop_length);
  std::vector<double> lost_frac(gop.gop_length);
  std::vector<char> decodable(gop.gop_length);

  for (int g = 0; g < gop_count; ++g) {
    for (int i = 0; i < gop.gop_length; ++i) {
      const int pkts = gop.packets_per_frame(gop.pattern[i]);
      int lost = 0;
      if (p_pkt > 0) {
        std::binomial_distribution<int> dist(pkts, p_pkt);
        lost = dist(rng);
      }
      lost_frac[i] = static_cast<double>(lost) / pkts;
      intact[i] = (1.0 - lost_frac[i]) + 1e-12 >= gop.theta;
    }
    // decode walk: anchors chain, B frames need their surrounding anchors
    int last_anchor_ok = -1;  // -1 none yet; else 0/1
    std::vector<char> anchor_ok(gop.gop_length, 0);
    for (int i = 0; i < gop.gop_length; ++i) {
      char t = gop.pattern[i];
      if (t == 'I') {
        anchor_ok[i] = intact[i];
        decodable[i] = intact[i];
        last_anchor_ok = i;
      } else if (t == 'P') {
        anchor_ok[i] = intact[i] && (last_anchor_ok >= 0 && anchor_ok[last_anchor_ok]);
        decodable[i] = anchor_ok[i];
        last_anchor_ok = i;
      } else {
        decodable[i] = 0;  // filled below once the following anchor is known
      }
    }
    for (int i = 0; i < gop.gop_length; ++i) {
      if (gop.pattern[i] != 'B') continue;
      int prev = -1, next = -1;
      for (int j = i - 1; j >= 0; --j)
        if (gop.pattern[j] != 'B') { prev = j; break; }
      for (int j = i + 1; j < gop.gop_length; ++j)
        if (gop.pattern[j] != 'B') { next = j; break; }
      bool ok = intact[i] && prev >= 0 && anchor_ok[prev];
      if (next >= 0) ok = ok && anchor_ok[next];
      decodable[i] = ok;
    }
    int dec = 0;
    for (int i = 0; i < gop.gop_length; ++i) {
      if (!decodable[i]) continue;
      ++dec;
      psnr_sum += gop.psnr_enc_db - gop.kappa_db * lost_frac[i];
      ++psnr_frames;
    }
    decodable_total += dec;
    const double gop_dfr = static_cast<double>(dec) / gop.gop_length;
    dfr_sq_sum += gop_dfr * gop_dfr;
  }

  GroundTruthStats stats;
  stats.sample.ber = ber;
  stats.sample.dfr =
      static_cast<double>(decodable_total) / (static_cast<double>(gop_count) * gop.gop_length);
  stats.sample.psnr = psnr_frames > 0 ? std::max(0.0, psnr_sum / psnr_frames) : 0.0;
  const double mean = stats.sample.dfr;
  const double var = std::max(0.0, dfr_sq_sum / gop_count - mean * mean);
  stats.dfr_stderr = std::sqrt(var / gop_count);
  return stats;
}

VideoSample generate_ground_truth(const GopModel& gop, double ber, int gop_count,
                                  std::uint64_t seed) {
  return generate_ground_truth_detailed(gop, ber, gop_count, seed).sample;
}

int decodable_frame_count(const GopModel& gop, std::uint32_t intact_mask) {
  gop.validate();
  if (gop.gop_length > 31) throw std::invalid_argument("decodable_frame_count: GOP too long");
  const GopDependencies deps = build_dependencies(gop);
  // Resolve in two passes: anchors first (their refs precede them), then Bs.
  std::vector<char> ok(gop.gop_length, 0);
  for (int i = 0; i < gop.gop_length; ++i) {
    if (gop.pattern[i] == 'B') continue;
    bool v = (intact_mask >> i) & 1u;
    for (int r : deps.refs[i]) v = v && ok[r];
    ok[i] = v;
  }
  int count = 0;
  for (int i = 0; i < gop.gop_length; ++i) {
    if (gop.pattern[i] == 'B') {
      bool v = (intact_mask >> i) & 1u;
      for (int r : deps.refs[i]) v = v && ok[r];
      if (v) ++count;
    } else if (ok[i]) {
      ++count;
    }
  }
  return count;
}

double dfr_expectation_oracle(const GopModel& gop, double frame_error_prob) {
  gop.validate();
  if (frame_error_prob < 0 || frame_error_prob > 1)
    throw std::invalid_argument("dfr_expectation_oracle: probability outside [0, 1]");
  if (gop.gop_length > 20)
    throw std::invalid_argument("dfr_expectation_oracle: enumeration capped at 20 frames");
  const double p = frame_error_prob;
  const int n = gop.gop_length;
  double expectation = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) prob *= ((mask >> i) & 1u) ? (1.0 - p) : p;
    if (prob == 0.0) continue;
    expectation += prob * decodable_frame_count(gop, mask);
  }
  return expectation / n;
}

// --- estimator -------------------------------------------------------------

namespace {

double normalized_input(const QualityEstimator& est, double ber) {
  const double x = std::log10(std::max(ber, kBerFloor));
  const double span = est.input_log_hi - est.input_log_lo;
  double u = span > 0 ? (x - est.input_log_lo) / span : 0.0;
  return std::clamp(u, 0.0, 1.0);  // evaluation outside the trained range sticks to the edge
}

double kernel(double u, double c, double spread) {
  const double d = u - c;
  return std::exp(-d * d / (2.0 * spread * spread));
}

}  // namespace

std::pair<double, double> estimate(const QualityEstimator& est, double ber) {
  if (ber < 0) throw std::invalid_argument("estimate: negative ber");
  const double u = normalized_input(est, ber);
  double psnr = est.psnr_bias;
  double dfr = est.dfr_bias;
  for (size_t i = 0; i < est.centers_ber.size(); ++i) {
    const double c = normalized_input(est, est.centers_ber[i]);
    const double phi = kernel(u, c, est.spread);
    psnr += est.psnr_weights[i] * phi;
    dfr += est.dfr_weights[i] * phi;
  }
  return {std::max(0.0, psnr), std::clamp(dfr, 0.0, 1.0)};
}

double estimator_mse(const QualityEstimator& est, const std::vector<VideoSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("estimator_mse: no samples");
  double acc = 0.0;
  for (const auto& s : samples) {
    auto [psnr, dfr] = estimate(est, s.ber);
    acc += (psnr - s.psnr) * (psnr - s.psnr) + (dfr - s.dfr) * (dfr - s.dfr);
  }
  return acc / (2.0 * samples.size());
}

QualityEstimator fit_estimator(
    const std::vector<VideoSample>& samples, const FitOptions& options,
    const std::function<void(const QualityEstimator&, double train_mse)>& observer) {
  if (samples.size() < 2) throw std::invalid_argument("fit_estimator: need at least 2 samples");
  if (options.spread <= 0) throw std::invalid_argument("fit_estimator: spread must be positive");

  QualityEstimator est;
  est.spread = options.spread;
  est.mse_goal = options.mse_goal;

  const size_t n = samples.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double x = std::log10(std::max(s.ber, kBerFloor));
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!(hi > lo))
    throw std::invalid_argument("fit_estimator: degenerate data (all ber values identical)");
  est.input_log_lo = lo;
  est.input_log_hi = hi;

  std::vector<double> u(n);
  for (size_t i = 0; i < n; ++i) u[i] = normalized_input(est, samples[i].ber);

  Eigen::MatrixXd targets(n, 2);
  for (size_t i = 0; i < n; ++i) {
    targets(i, 0) = samples[i].psnr;
    targets(i, 1) = samples[i].dfr;
  }

  // Raw (unclamped) predictions; the fit works on the linear model itself.
  auto raw_mse = [&](const Eigen::MatrixXd& design, const Eigen::MatrixXd& coef) {
    const Eigen::MatrixXd resid = design * coef - targets;
    return resid.squaredNorm() / (2.0 * n);
  };

  std::set<size_t> used;
  Eigen::MatrixXd design = Eigen::MatrixXd::Ones(n, 1);
  Eigen::MatrixXd coef =
      design.completeOrthogonalDecomposition().solve(targets);  // bias-only start
  double mse = raw_mse(design, coef);

  auto publish = [&]() {
    const int m = static_cast<int>(est.centers_ber.size());
    est.psnr_weights.assign(m, 0.0);
    est.dfr_weights.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
      est.psnr_weights[j] = coef(j, 0);
      est.dfr_weights[j] = coef(j, 1);
    }
    est.psnr_bias = coef(m, 0);
    est.dfr_bias = coef(m, 1);
    est.final_train_mse = mse;
  };
  publish();
  if (observer) observer(est, mse);

  while (mse > options.mse_goal &&
         static_cast<int>(est.centers_ber.size()) < options.max_neurons) {
    // next center: the sample with the largest residual not already used
    const Eigen::MatrixXd resid = design * coef - targets;
    double worst = -1.0;
    size_t pick = n;
    for (size_t i = 0; i < n; ++i) {
      if (used.count(i)) continue;
      const double r = resid(i, 0) * resid(i, 0) + resid(i, 1) * resid(i, 1);
      if (r > worst) {
        worst = r;
        pick = i;
      }
    }
    if (pick == n) break;  // every sample is already a center
    used.insert(pick);
    est.centers_ber.push_back(samples[pick].ber);

    const int m = static_cast<int>(est.centers_ber.size());
    Eigen::MatrixXd next(n, m + 1);
    for (int j = 0; j < m - 1; ++j) next.col(j) = design.col(j);
    for (size_t i = 0; i < n; ++i) next(i, m - 1) = kernel(u[i], u[pick], est.spread);
    next.col(m) = Eigen::VectorXd::Ones(n);
    design = std::move(next);
    coef = design.completeOrthogonalDecomposition().solve(targets);  // minimum-norm on rank loss
    mse = raw_mse(design, coef);
    publish();
    if (observer) observer(est, mse);
  }
  return est;
}

TrainResult train_quality_model(const GopModel& gop, const std::vector<double>& ber_grid,
                                int gops_per_point, const FitOptions& fit, std::uint64_t seed) {
  if (ber_grid.size() < 3)
    throw std::invalid_argument("train_quality_model: need at least 3 grid points");
  TrainResult result;
  for (size_t i = 0; i < ber_grid.size(); ++i)
    result.ground_truth.push_back(
        generate_ground_truth(gop, ber_grid[i], gops_per_point, seed + 1000 * i));

  std::vector<size_t> order(result.ground_truth.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const size_t n_train = (result.ground_truth.size() * 2 + 2) / 3;
  std::vector<VideoSample> train_set, test_set;
  for (size_t i = 0; i < order.size(); ++i)
    (i < n_train ? train_set : test_set).push_back(result.ground_truth[order[i]]);

  result.model = fit_estimator(
      train_set, fit, [&](const QualityEstimator& est, double train_mse) {
        const double test_mse = test_set.empty() ? 0.0 : estimator_mse(est, test_set);
        result.curve.push_back(
            {static_cast<int>(est.centers_ber.size()), train_mse, test_mse});
      });
  result.model.train_seed = seed;
  result.final_test_mse = test_set.empty() ? 0.0 : estimator_mse(result.model, test_set);
  return result;
}

double utility(double psnr, double dfr) {
  if (psnr < 0 || dfr < 0 || dfr > 1) throw std::invalid_argument("utility: inputs out of range");
  return psnr * dfr;
}

double video_cost(double u) {
  if (u < 0) throw std::invalid_argument("video_cost: negative utility");
  if (u <= kUtilityFloor) return kVideoCostCap;
  return std::log10(1.0 / u);
}

// --- model file ------------------------------------------------------------

std::string QualityEstimator::to_json() const {
  nlohmann::json doc;
  doc["spread"] = spread;
  doc["input_log_lo"] = input_log_lo;
  doc["input_log_hi"] = input_log_hi;
  doc["centers_ber"] = centers_ber;
  doc["weights"] = {{"psnr", psnr_weights}, {"dfr", dfr_weights}};
  doc["bias"] = {{"psnr", psnr_bias}, {"dfr", dfr_bias}};
  doc["training"] = {{"seed", train_seed}, {"mse_goal", mse_goal},
                     {"final_train_mse", final_train_mse}};
  return doc.dump(2) + "\n";
}

QualityEstimator QualityEstimator::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("model: JSON parse failure: ") + e.what());
  }
  QualityEstimator est;
  est.spread = doc.at("spread").get<double>();
  est.input_log_lo = doc.at("input_log_lo").get<double>();
  est.input_log_hi = doc.at("input_log_hi").get<double>();
  est.centers_ber = doc.at("centers_ber").get<std::vector<double>>();
  est.psnr_weights = doc.at("weights").at("psnr").get<std::vector<double>>();
  est.dfr_weights = doc.at("weights").at("dfr").get<std::vector<double>>();
  est.psnr_bias = doc.at("bias").at("psnr").get<double>();
  est.dfr_bias = doc.at("bias").at("dfr").get<double>();
  est.train_seed = doc.at("training").at("seed").get<std::uint64_t>();
  est.mse_goal = doc.at("training").at("mse_goal").get<double>();
  est.final_train_mse = doc.at("training").at("final_train_mse").get<double>();
  if (est.psnr_weights.size() != est.centers_ber.size() ||
      est.dfr_weights.size() != est.centers_ber.size())
    throw std::runtime_error("model: weight/center count mismatch");
  return est;
}

void QualityEstimator::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("model: cannot write '" + path + "'");
  out << to_json();
}

QualityEstimator QualityEstimator::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("model: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace eonsim
