#include "eonsim/qot.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace eonsim {

namespace {

constexpr double kMinZeta = 1e-6;

double clamped_zeta(const FiberParams& p) {
  if (p.zeta < kMinZeta) {
    static bool warned = false;
    if (!warned) {
      std::fprintf(stderr, "eonsim: zeta=%g clamped to %g in the span-enhancement factor\n",
                   p.zeta, kMinZeta);
      warned = true;
    }
    return kMinZeta;
  }
  return p.zeta;
}

// Built-in BER curves: ber = scale * erfc(sqrt(osnr / divisor)).
const std::map<std::string, std::pair<double, double>>& builtin_modulations() {
  static const std::map<std::string, std::pair<double, double>> table = {
      {"bpsk", {0.5, 1.0}},
      {"qpsk", {0.5, 2.0}},
      {"16qam", {0.375, 10.0}},
      {"64qam", {7.0 / 24.0, 42.0}},
  };
  return table;
}

}  // namespace

void FiberParams::validate() const {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("FiberParams: " + what);
  };
  if (gamma_per_w_km <= 0) bad("gamma must be positive");
  if (alpha_per_km <= 0) bad("alpha must be positive");
  if (beta2_ps2_per_km == 0) bad("beta2 must be nonzero");
  if (span_km <= 0) bad("span length must be positive");
  if (zeta < 0 || zeta > 1) bad("zeta must be in [0, 1]");
  if (slot_ghz <= 0) bad("slot bandwidth must be positive");
  if (guard_ghz < 0) bad("guard band must be non-negative");
  if (grid_slots < 1) bad("grid needs at least one slot");
  if (launch_w_per_ghz <= 0) bad("launch density must be positive");
  if (planck_js <= 0 || light_freq_hz <= 0) bad("h and nu must be positive");
  if (noise_figure <= 0) bad("noise figure must be positive");
  if (node_penalty_db < 0) bad("node penalty must be non-negative");
  if (code_free_distance < 1) bad("code free distance must be >= 1");
  if (code_rate <= 0 || code_rate > 1) bad("code rate must be in (0, 1]");
}

double FiberParams::corner_freq_ghz() const {
  return std::sqrt(alpha_per_km / std::abs(beta2_ns2_per_km())) / (2.0 * std::numbers::pi);
}

double FiberParams::base_bandwidth_ghz() const {
  double fw = corner_freq_ghz();
  return 4.0 * fw * fw / total_bandwidth_ghz();
}

double noise_enhancement(const FiberParams& p, int spans) {
  if (spans < 1) throw std::invalid_argument("noise_enhancement: spans must be >= 1");
  if (spans == 1) return 1.0;
  const double x = std::exp(-p.alpha_per_km * clamped_zeta(p) * p.span_km);
  const double n = static_cast<double>(spans);
  const double num = 2.0 * (n - 1.0 + std::pow(x, n) - n * x) * x;
  const double den = n * (x - 1.0) * (x - 1.0);
  return num / den + 1.0;
}

double nonlinear_threshold(const FiberParams& p, int spans) {
  const double he = noise_enhancement(p, spans);
  const double db = p.channel_spacing_ghz();
  const double guard_ratio = p.guard_ghz / db;
  double bracket = std::log(p.total_bandwidth_ghz() / p.base_bandwidth_ghz());
  if (guard_ratio > 0.0) {
    if (p.grid_slots < 3)
      throw std::domain_error("nonlinear_threshold: guard-band term needs at least 3 channels");
    bracket -= guard_ratio * std::log(static_cast<double>(p.grid_slots - 2));
  }
  if (bracket <= 0.0)
    throw std::domain_error("nonlinear_threshold: bandwidth bracket is non-positive (" +
                            std::to_string(bracket) + ")");
  const double base = std::sqrt(std::numbers::pi * p.alpha_per_km *
                                std::abs(p.beta2_ns2_per_km()) /
                                (p.gamma_per_w_km * p.gamma_per_w_km * spans * he));
  return base * std::pow(1.0 - guard_ratio, -0.5) * std::pow(bracket, -0.5);
}

double nonlinear_noise_density(const FiberParams& p, int spans) {
  const double r = p.launch_w_per_ghz / nonlinear_threshold(p, spans);
  return r * r * p.launch_w_per_ghz;
}

double ase_noise_density(const FiberParams& p, int spans) {
  // h*nu is W/Hz; the factor 1e9 moves it to W/GHz.
  return 0.5 * spans * std::exp(p.alpha_per_km * p.span_km) * p.planck_js * p.light_freq_hz *
         1e9 * p.noise_figure;
}

double link_osnr(const FiberParams& p, int spans) {
  const double i0 = nonlinear_threshold(p, spans);
  const double r = p.launch_w_per_ghz / i0;
  const double signal = p.launch_w_per_ghz * std::exp(-r * r);
  const double n0 = ase_noise_density(p, spans);
  return signal / (n0 + p.launch_w_per_ghz - signal);
}

double link_osnr_approx(const FiberParams& p, int spans) {
  const double i0 = nonlinear_threshold(p, spans);
  const double r = p.launch_w_per_ghz / i0;
  return p.launch_w_per_ghz / (ase_noise_density(p, spans) + p.launch_w_per_ghz * r * r);
}

double optimal_launch_density(const FiberParams& p, int spans) {
  const double i0 = nonlinear_threshold(p, spans);
  return std::cbrt(ase_noise_density(p, spans) * i0 * i0 / 2.0);
}

int span_count(const FiberParams& p, double length_km) {
  if (length_km <= 0) throw std::invalid_argument("span_count: length must be positive");
  return std::max(1, static_cast<int>(std::ceil(length_km / p.span_km)));
}

double path_osnr_db(const FiberParams& p, const RoutePath& path) {
  if (path.empty()) throw std::invalid_argument("path_osnr_db: empty path");
  const int spans = span_count(p, path.length_km);
  return linear_to_db(link_osnr(p, spans)) - path.hop_count() * p.node_penalty_db;
}

double apparent_osnr(double osnr_linear, const FiberParams& p) {
  if (osnr_linear < 0) throw std::invalid_argument("apparent_osnr: negative OSNR");
  return p.code_free_distance * p.code_rate * osnr_linear;
}

double osnr_to_ber(double osnr_linear, const FiberParams& p, const std::string& modulation) {
  if (osnr_linear < 0) throw std::invalid_argument("osnr_to_ber: negative OSNR");
  auto it = p.extra_modulations.find(modulation);
  if (it == p.extra_modulations.end()) {
    const auto& table = builtin_modulations();
    it = table.find(modulation);
    if (it == table.end())
      throw std::invalid_argument("osnr_to_ber: unknown modulation '" + modulation + "'");
  }
  const auto [scale, divisor] = it->second;
  return scale * std::erfc(std::sqrt(osnr_linear / divisor));
}

double osnr_to_ber(double osnr_linear, const FiberParams& p) {
  return osnr_to_ber(osnr_linear, p, p.modulation);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace eonsim
