#pragma once

#include <map>
#include <string>

#include "eonsim/topology.hpp"

namespace eonsim {

/// Physical-layer constants for the nonlinear-noise / OSNR model.
///
/// Unit discipline: power in W, frequency in GHz, length in km, so spectral
/// densities come out in W/GHz directly. beta2 is stored in the conventional
/// ps^2/km and converted once (see beta2_ns2_per_km).
struct FiberParams {
  double gamma_per_w_km = 1.3;        // fiber nonlinearity coefficient
  double alpha_per_km = 0.0461;       // attenuation, linear (0.2 dB/km)
  double beta2_ps2_per_km = -21.7;    // group-velocity dispersion
  double span_km = 80.0;              // amplifier spacing L
  double zeta = 1.0;                  // residual dispersion ratio
  double slot_ghz = 12.5;             // per-slot bandwidth B1
  double guard_ghz = 0.0;             // guard band between channels
  int grid_slots = 128;               // total channels on the grid (N_FS = 2N+1)
  double launch_w_per_ghz = 9.3e-6;   // launch power spectral density I
  double planck_js = 6.62607015e-34;
  double light_freq_hz = 193.4e12;
  double noise_figure = 3.16;         // amplifier noise figure, linear (5 dB)
  double node_penalty_db = 1.0;       // per-hop cross-connect penalty
  double code_free_distance = 1.0;    // channel code free distance
  double code_rate = 1.0;             // channel code rate, in (0, 1]
  std::string modulation = "qpsk";
  // name -> {scale, snr divisor} for BER = scale * erfc(sqrt(osnr / divisor))
  std::map<std::string, std::pair<double, double>> extra_modulations;

  /// Throws std::invalid_argument when any constant is out of range.
  void validate() const;

  double beta2_ns2_per_km() const { return beta2_ps2_per_km * 1e-6; }
  double channel_spacing_ghz() const { return slot_ghz + guard_ghz; }
  double total_bandwidth_ghz() const { return grid_slots * channel_spacing_ghz(); }
  /// f_w = (1/2pi) sqrt(alpha/|beta2|), in GHz.
  double corner_freq_ghz() const;
  /// B0 = 4 f_w^2 / B, in GHz.
  double base_bandwidth_ghz() const;
};

/// Multi-span nonlinear noise enhancement factor h_e; exactly 1 for a single
/// span and non-decreasing in the span count.
double noise_enhancement(const FiberParams& p, int spans);

/// Nonlinear threshold launch density I0 (W/GHz). Throws std::domain_error
/// when the bandwidth bracket is non-positive, reporting the offending term.
double nonlinear_threshold(const FiberParams& p, int spans);

/// Nonlinear noise density I_NL = (I/I0)^2 * I (W/GHz).
double nonlinear_noise_density(const FiberParams& p, int spans);

/// ASE noise spectral density n0 = 0.5 Ns e^{alpha L} h nu N_F (W/GHz).
double ase_noise_density(const FiberParams& p, int spans);

/// Exact per-link OSNR: I e^{-(I/I0)^2} / (n0 + I - I e^{-(I/I0)^2}).
double link_osnr(const FiberParams& p, int spans);

/// Small-signal approximation I / (n0 + I (I/I0)^2); used by tests.
double link_osnr_approx(const FiberParams& p, int spans);

/// Launch density maximizing the approximate OSNR: (n0 I0^2 / 2)^(1/3).
double optimal_launch_density(const FiberParams& p, int spans);

/// Spans for a path: ceil(total length / span length), at least 1.
int span_count(const FiberParams& p, double length_km);

/// End-to-end OSNR in dB: 10 log10(link OSNR) - hops * node penalty.
double path_osnr_db(const FiberParams& p, const RoutePath& path);

/// Coding-gain adjusted OSNR (linear): d_free * R_C * osnr.
double apparent_osnr(double osnr_linear, const FiberParams& p);

/// BER for the given modulation at the (linear) apparent OSNR. Strictly
/// decreasing, 0.5 at zero OSNR for the bpsk/qpsk forms. Throws on unknown
/// modulation ids.
double osnr_to_ber(double osnr_linear, const FiberParams& p, const std::string& modulation);
double osnr_to_ber(double osnr_linear, const FiberParams& p);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace eonsim
