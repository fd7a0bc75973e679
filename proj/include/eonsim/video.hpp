#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace eonsim {

/// Group-of-pictures structure and loss-concealment constants for the
/// analytic ground-truth generator.
struct GopModel {
  int gop_length = 12;
  std::string pattern = "IBBPBBPBBPBB";  // frame types, first must be I
  std::int64_t i_frame_bits = 160000;
  std::int64_t p_frame_bits = 80000;
  std::int64_t b_frame_bits = 40000;
  std::int64_t packet_bits = 8000;
  double theta = 1.0;        // intact-packet fraction needed to decode a frame
  double kappa_db = 20.0;    // concealment penalty per lost-packet fraction
  double psnr_enc_db = 40.0; // encoder baseline PSNR

  void validate() const;
  std::int64_t frame_bits(char type) const;
  int packets_per_frame(char type) const;
};

struct VideoSample {
  double ber = 0.0;
  double psnr = 0.0;
  double dfr = 0.0;
};

/// PSNR from mean squared error, capped at 60 dB for mse = 0.
double psnr_from_mse(double mse);

/// Monte Carlo over `gop_count` GOPs of the packet-loss channel at the given
/// BER. A frame decodes when enough of its packets survive and its reference
/// chain decodes (I: none; P: previous anchor; B: surrounding anchors).
VideoSample generate_ground_truth(const GopModel& gop, double ber, int gop_count,
                                  std::uint64_t seed);

struct GroundTruthStats {
  VideoSample sample;
  double dfr_stderr = 0.0;  // standard error of the per-GOP DFR mean
};
GroundTruthStats generate_ground_truth_detailed(const GopModel& gop, double ber, int gop_count,
                                                std::uint64_t seed);

/// Decodable-frame count for one explicit intact/lost pattern (bit i set =
/// frame i intact). Used by the exact enumeration below and by tests.
int decodable_frame_count(const GopModel& gop, std::uint32_t intact_mask);

/// Exact expected DFR under i.i.d. frame losses with probability p, by
/// enumerating all 2^gop_length patterns.
double dfr_expectation_oracle(const GopModel& gop, double frame_error_prob);

/// Radial-basis-function regressor mapping BER to (PSNR, DFR). Inputs are
/// log10(ber) (ber clamped below at 1e-12) normalized to [0,1] over the
/// training range; predictions clamp DFR to [0,1] and PSNR to >= 0.
struct QualityEstimator {
  double spread = 0.12;          // kernel width in normalized input units
  double input_log_lo = -12.0;   // training-range normalization
  double input_log_hi = 0.0;
  std::vector<double> centers_ber;   // raw BER of each kernel center
  std::vector<double> psnr_weights;  // one weight per center
  std::vector<double> dfr_weights;
  double psnr_bias = 0.0;
  double dfr_bias = 0.0;
  // training metadata carried in the model file
  double mse_goal = 0.0;
  double final_train_mse = 0.0;
  std::uint64_t train_seed = 0;

  std::string to_json() const;
  static QualityEstimator from_json(const std::string& text);
  void save_file(const std::string& path) const;
  static QualityEstimator load_file(const std::string& path);
};

struct FitOptions {
  double spread = 0.12;
  double mse_goal = 1e-3;
  int max_neurons = 10;
};

/// Incremental fit: bias-only start, then repeatedly add one Gaussian center
/// at the worst-residual sample and re-solve the output layer by least
/// squares. The per-step training MSE is non-increasing. The optional
/// observer sees the model after every step (bias-only step included).
QualityEstimator fit_estimator(
    const std::vector<VideoSample>& samples, const FitOptions& options,
    const std::function<void(const QualityEstimator&, double train_mse)>& observer = {});

/// Clamped (psnr, dfr) prediction.
std::pair<double, double> estimate(const QualityEstimator& est, double ber);

struct TrainReportRow {
  int neurons = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

struct TrainResult {
  QualityEstimator model;
  std::vector<VideoSample> ground_truth;
  std::vector<TrainReportRow> curve;  // one row per fit step, bias-only first
  double final_test_mse = 0.0;
};

/// Ground truth over the BER grid, deterministic 2/3-1/3 split, incremental
/// fit, and per-step train/test error curve. Shared by the CLI and tests.
TrainResult train_quality_model(const GopModel& gop, const std::vector<double>& ber_grid,
                                int gops_per_point, const FitOptions& fit, std::uint64_t seed);

/// Per-sample mean squared error over both outputs.
double estimator_mse(const QualityEstimator& est, const std::vector<VideoSample>& samples);

/// User QoE scalar U = psnr * dfr.
double utility(double psnr, double dfr);

/// Video cost log10(1/U), saturated at 3 for U <= 1e-3.
double video_cost(double u);

constexpr double kUtilityFloor = 1e-3;
constexpr double kVideoCostCap = 3.0;
constexpr double kPsnrCap = 60.0;

}  // namespace eonsim
