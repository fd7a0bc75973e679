#pragma once

#include <map>
#include <string>
#include <vector>

#include "eonsim/sim.hpp"
#include "eonsim/video.hpp"

namespace eonsim {

/// Sectioned key/value configuration document:
///   [section]
///   key = value   # comment
/// Values are scalars or comma lists; sections and keys are validated
/// against the known schema before a run starts.
class ConfigDoc {
 public:
  static ConfigDoc parse(const std::string& text);
  static ConfigDoc load_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Throws listing any section/key outside the known schema.
  void check_known_keys() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

FiberParams fiber_from_config(const ConfigDoc& doc);
GopModel gop_from_config(const ConfigDoc& doc);
FitOptions fit_options_from_config(const ConfigDoc& doc);
ScenarioConfig scenario_from_config(const ConfigDoc& doc);

struct TrainOptions {
  std::vector<double> ber_grid;  // default: 25 points log-spaced on [1e-9, 0.3]
  int gops_per_point = 10000;
  FitOptions fit;
};
TrainOptions train_options_from_config(const ConfigDoc& doc);

/// Default BER grid used by training when none is configured.
std::vector<double> default_ber_grid();

/// Resolves a bundled topology name (fig1 / nsfnet / usbackbone) against the
/// data directory, or passes file paths through.
std::string resolve_topology_path(const std::string& name_or_path, const std::string& data_dir);

}  // namespace eonsim
