#include "eonsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eonsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::vector<std::string>>& known_schema() {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"fiber",
       {"gamma", "alpha_per_km", "beta2_ps2_per_km", "span_km", "zeta", "slot_ghz", "guard_ghz",
        "launch_w_per_ghz", "planck_js", "light_freq_hz", "noise_figure", "node_penalty_db",
        "d_free", "code_rate", "modulation"}},
      {"gop",
       {"length", "pattern", "i_bits", "p_bits", "b_bits", "packet_bits", "theta", "kappa_db",
        "psnr_enc_db"}},
      {"weights", {"alpha", "beta"}},
      {"estimator", {"spread", "mse_goal", "max_neurons"}},
      {"train", {"ber_min", "ber_max", "ber_points", "gops_per_point"}},
      {"scenario",
       {"topology", "n_fs", "mu", "load_points", "p_video", "slot_min", "slot_max",
        "total_requests", "warmup_requests", "seed", "u_th", "k", "quality_fallback",
        "validate_every", "model"}},
  };
  return schema;
}

}  // namespace

ConfigDoc ConfigDoc::parse(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(line_no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::runtime_error("config line " + std::to_string(line_no) + ": empty section name");
      doc.sections_[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": key outside a section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    doc.sections_[section][key] = value;
  }
  return doc;
}

ConfigDoc ConfigDoc::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

std::string ConfigDoc::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double ConfigDoc::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config: [" + section + "] " + key + " = '" + v + "' is not a number");
  }
}

int ConfigDoc::get_int(const std::string& section, const std::string& key, int fallback) const {
  double d = get_double(section, key, fallback);
  if (d != std::floor(d))
    throw std::runtime_error("config: [" + section + "] " + key + " must be an integer");
  return static_cast<int>(d);
}

std::uint64_t ConfigDoc::get_uint64(const std::string& section, const std::string& key,
                                    std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: [" + section + "] " + key + " = '" + v +
                             "' is not an unsigned integer");
  }
}

bool ConfigDoc::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get_string(section, key, "");
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: [" + section + "] " + key + " must be a boolean");
}

std::vector<double> ConfigDoc::get_double_list(const std::string& section, const std::string& key,
                                               const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::runtime_error("config: [" + section + "] " + key + " has non-numeric entry '" +
                               item + "'");
    }
  }
  if (out.empty())
    throw std::runtime_error("config: [" + section + "] " + key + " is an empty list");
  return out;
}

void ConfigDoc::check_known_keys() const {
  const auto& schema = known_schema();
  std::string problems;
  for (const auto& [section, keys] : sections_) {
    auto s = schema.find(section);
    if (s == schema.end()) {
      problems += " unknown section [" + section + "];";
      continue;
    }
    for (const auto& [key, value] : keys)
      if (std::find(s->second.begin(), s->second.end(), key) == s->second.end())
        problems += " unknown key [" + section + "] " + key + ";";
  }
  if (!problems.empty()) throw std::runtime_error("config:" + problems);
}

FiberParams fiber_from_config(const ConfigDoc& doc) {
  FiberParams p;
  p.gamma_per_w_km = doc.get_double("fiber", "gamma", p.gamma_per_w_km);
  p.alpha_per_km = doc.get_double("fiber", "alpha_per_km", p.alpha_per_km);
  p.beta2_ps2_per_km = doc.get_double("fiber", "beta2_ps2_per_km", p.beta2_ps2_per_km);
  p.span_km = doc.get_double("fiber", "span_km", p.span_km);
  p.zeta = doc.get_double("fiber", "zeta", p.zeta);
  p.slot_ghz = doc.get_double("fiber", "slot_ghz", p.slot_ghz);
  p.guard_ghz = doc.get_double("fiber", "guard_ghz", p.guard_ghz);
  p.launch_w_per_ghz = doc.get_double("fiber", "launch_w_per_ghz", p.launch_w_per_ghz);
  p.planck_js = doc.get_double("fiber", "planck_js", p.planck_js);
  p.light_freq_hz = doc.get_double("fiber", "light_freq_hz", p.light_freq_hz);
  p.noise_figure = doc.get_double("fiber", "noise_figure", p.noise_figure);
  p.node_penalty_db = doc.get_double("fiber", "node_penalty_db", p.node_penalty_db);
  p.code_free_distance = doc.get_double("fiber", "d_free", p.code_free_distance);
  p.code_rate = doc.get_double("fiber", "code_rate", p.code_rate);
  p.modulation = doc.get_string("fiber", "modulation", p.modulation);
  p.validate();
  return p;
}

GopModel gop_from_config(const ConfigDoc& doc) {
  GopModel g;
  g.gop_length = doc.get_int("gop", "length", g.gop_length);
  g.pattern = doc.get_string("gop", "pattern", g.pattern);
  g.i_frame_bits = doc.get_int("gop", "i_bits", static_cast<int>(g.i_frame_bits));
  g.p_frame_bits = doc.get_int("gop", "p_bits", static_cast<int>(g.p_frame_bits));
  g.b_frame_bits = doc.get_int("gop", "b_bits", static_cast<int>(g.b_frame_bits));
  g.packet_bits = doc.get_int("gop", "packet_bits", static_cast<int>(g.packet_bits));
  g.theta = doc.get_double("gop", "theta", g.theta);
  g.kappa_db = doc.get_double("gop", "kappa_db", g.kappa_db);
  g.psnr_enc_db = doc.get_double("gop", "psnr_enc_db", g.psnr_enc_db);
  g.validate();
  return g;
}

FitOptions fit_options_from_config(const ConfigDoc& doc) {
  FitOptions f;
  f.spread = doc.get_double("estimator", "spread", f.spread);
  f.mse_goal = doc.get_double("estimator", "mse_goal", f.mse_goal);
  f.max_neurons = doc.get_int("estimator", "max_neurons", f.max_neurons);
  return f;
}

std::vector<double> default_ber_grid() {
  // Upper edge keeps the decodable-frame count away from total extinction so
  // the conditional PSNR stays defined across the grid.
  const double lo = 1e-9, hi = 3e-5;
  const int n = 25;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return grid;
}

TrainOptions train_options_from_config(const ConfigDoc& doc) {
  TrainOptions t;
  const double lo = doc.get_double("train", "ber_min", 1e-9);
  const double hi = doc.get_double("train", "ber_max", 3e-5);
  const int n = doc.get_int("train", "ber_points", 25);
  if (!(lo > 0) || !(hi > lo) || n < 2)
    throw std::runtime_error("config: [train] grid needs 0 < ber_min < ber_max and >= 2 points");
  t.ber_grid.resize(n);
  for (int i = 0; i < n; ++i)
    t.ber_grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  t.gops_per_point = doc.get_int("train", "gops_per_point", t.gops_per_point);
  if (t.gops_per_point < 1) throw std::runtime_error("config: [train] gops_per_point must be >= 1");
  t.fit = fit_options_from_config(doc);
  return t;
}

ScenarioConfig scenario_from_config(const ConfigDoc& doc) {
  ScenarioConfig c;
  c.topology = doc.get_string("scenario", "topology", c.topology);
  c.n_fs = doc.get_int("scenario", "n_fs", c.n_fs);
  c.mu = doc.get_double("scenario", "mu", c.mu);
  c.load_points = doc.get_double_list("scenario", "load_points", c.load_points);
  c.p_video = doc.get_double("scenario", "p_video", c.p_video);
  c.slot_min = doc.get_int("scenario", "slot_min", c.slot_min);
  c.slot_max = doc.get_int("scenario", "slot_max", c.slot_max);
  c.weights.alpha = doc.get_double("weights", "alpha", c.weights.alpha);
  c.weights.beta = doc.get_double("weights", "beta", c.weights.beta);
  c.fiber = fiber_from_config(doc);
  c.model_path = doc.get_string("scenario", "model", c.model_path);
  c.total_requests = doc.get_int("scenario", "total_requests", c.total_requests);
  c.warmup_requests = doc.get_int("scenario", "warmup_requests", c.warmup_requests);
  c.seed = doc.get_uint64("scenario", "seed", c.seed);
  c.u_th = doc.get_double("scenario", "u_th", c.u_th);
  c.rsa.k = doc.get_int("scenario", "k", c.rsa.k);
  c.rsa.quality_fallback = doc.get_bool("scenario", "quality_fallback", c.rsa.quality_fallback);
  c.validate_every = doc.get_int("scenario", "validate_every", c.validate_every);
  c.validate();
  return c;
}

std::string resolve_topology_path(const std::string& name_or_path, const std::string& data_dir) {
  if (name_or_path.find('/') != std::string::npos ||
      name_or_path.find(".json") != std::string::npos)
    return name_or_path;
  return data_dir + "/" + name_or_path + ".json";
}

}  // namespace eonsim
