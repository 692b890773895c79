#include "crtrack/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace crtrack {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;
};

// The whole tunable surface; every default stated elsewhere appears here.
constexpr KeyDefault kDefaults[] = {
    {"kalman.process_position_noise", "1"},
    {"kalman.process_velocity_noise", "0.01"},
    {"kalman.measurement_position_noise", "1"},
    {"kalman.measurement_area_noise", "10"},
    {"kalman.init_position_var", "10"},
    {"kalman.init_velocity_var", "10000"},
    {"assoc.iou_gate", "0.3"},
    {"assoc.appearance_weight", "0.25"},
    {"assoc.similarity_threshold", "0.25"},
    {"assoc.ocm_weight", "0.2"},
    {"assoc.velocity_span", "3"},
    {"assoc.min_hits", "3"},
    {"assoc.max_age", "30"},
    {"assoc.second_stage", "true"},
    {"assoc.oru", "true"},
    {"assoc.similarity_mode", "split_cosine"},
    {"assoc.bank_capacity", "10"},
    {"assoc.ema_alpha", "0.9"},
    {"asa.k", "10"},
    {"asa.negative_cost_threshold", "6"},
    {"asa.candidate_radius_scale", "2.5"},
    {"asa.soft_targets", "false"},
    {"asa.lambda_cls", "1"},
    {"asa.lambda_reg", "1"},
    {"asa.lambda_iou", "3"},
    {"asa.lambda_dis", "2"},
    {"loss.lambda_cls", "1"},
    {"loss.lambda_reg", "1"},
    {"loss.lambda_iou", "3"},
    {"loss.unlabeled_weight_mode", "ratio_to_labeled"},
    {"loss.pseudo_confidence_threshold", "0.7"},
    {"loss.pseudo_nms_iou", "0.65"},
    {"anu.keep_rate", "0.999"},
    {"augment.contrast", "0.7"},
    {"augment.gamma", "2.2"},
    {"augment.brightness_min", "0.2"},
    {"augment.brightness_max", "0.5"},
    {"augment.blur_sigma_min", "0.5"},
    {"augment.blur_sigma_max", "2"},
    {"augment.noise_sigma_min", "2"},
    {"augment.noise_sigma_max", "15"},
    {"metrics.iou_threshold", "0.5"},
    {"metrics.min_visibility", "0.1"},
    {"metrics.pedestrian_class", "1"},
    {"synth.num_frames", "100"},
    {"synth.num_objects", "8"},
    {"synth.width", "1920"},
    {"synth.height", "1080"},
    {"synth.speed_min", "2"},
    {"synth.speed_max", "6"},
    {"synth.crossings", "0"},
    {"synth.bounce_crossings", "false"},
    {"corrupt.severity", "0"},
    {"corrupt.miss_rate", "0.25"},
    {"corrupt.jitter", "0.12"},
    {"corrupt.fp_rate", "0.6"},
    {"corrupt.score_noise", "0.25"},
    {"corrupt.embedding_noise", "0.06"},
    {"corrupt.occlusion_iou", "0.4"},
    {"corrupt.embedding_dim", "16"},
};

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double_or_throw(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(out))
    throw std::runtime_error("config key " + key + ": '" + value + "' is not a finite number");
  return out;
}

}  // namespace

Config::Config() {
  for (const auto& kd : kDefaults) values_[kd.key] = kd.value;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> errors;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
      continue;
    }
    if (const auto it = seen.find(key); it != seen.end()) {
      errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key +
                       "' (first set on line " + std::to_string(it->second) + ")");
      continue;
    }
    try {
      cfg.set(key, value);
      seen[key] = lineno;
    } catch (const std::exception& e) {
      errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = origin + ": invalid config";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double_or_throw(key, raw(key));
}

int Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(std::llround(v));
  if (static_cast<double>(i) != v)
    throw std::runtime_error("config key " + key + ": '" + raw(key) + "' is not an integer");
  return i;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("config key " + key + ": '" + v + "' is not a boolean");
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

KalmanParams Config::kalman() const {
  KalmanParams p;
  p.process_position_noise = get_double("kalman.process_position_noise");
  p.process_velocity_noise = get_double("kalman.process_velocity_noise");
  p.measurement_position_noise = get_double("kalman.measurement_position_noise");
  p.measurement_area_noise = get_double("kalman.measurement_area_noise");
  p.init_position_var = get_double("kalman.init_position_var");
  p.init_velocity_var = get_double("kalman.init_velocity_var");
  return p;
}

AssociationConfig Config::association() const {
  AssociationConfig c;
  c.iou_gate = get_double("assoc.iou_gate");
  c.appearance_weight = get_double("assoc.appearance_weight");
  c.similarity_threshold = get_double("assoc.similarity_threshold");
  c.ocm_weight = get_double("assoc.ocm_weight");
  c.velocity_span = get_int("assoc.velocity_span");
  c.min_hits = get_int("assoc.min_hits");
  c.max_age = get_int("assoc.max_age");
  c.second_stage_enabled = get_bool("assoc.second_stage");
  c.oru_enabled = get_bool("assoc.oru");
  const std::string& mode = raw("assoc.similarity_mode");
  if (mode == "split_cosine")
    c.similarity_mode = SimilarityMode::split_cosine;
  else if (mode == "matrix_product")
    c.similarity_mode = SimilarityMode::matrix_product;
  else
    throw std::runtime_error(
        "config key assoc.similarity_mode: expected split_cosine or matrix_product");
  c.bank_capacity = get_int("assoc.bank_capacity");
  c.ema_alpha = get_double("assoc.ema_alpha");
  c.kalman = kalman();
  return c;
}

AsaWeights Config::asa_weights() const {
  AsaWeights w;
  w.lambda_cls = get_double("asa.lambda_cls");
  w.lambda_reg = get_double("asa.lambda_reg");
  w.lambda_iou = get_double("asa.lambda_iou");
  w.lambda_dis = get_double("asa.lambda_dis");
  return w;
}

AsaConfig Config::asa() const {
  AsaConfig c;
  c.k = get_int("asa.k");
  c.negative_cost_threshold = get_double("asa.negative_cost_threshold");
  c.candidate_radius_scale = get_double("asa.candidate_radius_scale");
  c.soft_targets = get_bool("asa.soft_targets");
  return c;
}

LossWeights Config::loss_weights() const {
  LossWeights w;
  w.lambda_cls = get_double("loss.lambda_cls");
  w.lambda_reg = get_double("loss.lambda_reg");
  w.lambda_iou = get_double("loss.lambda_iou");
  return w;
}

UnlabeledWeightMode Config::unlabeled_mode() const {
  const std::string& mode = raw("loss.unlabeled_weight_mode");
  if (mode == "ratio_to_labeled") return UnlabeledWeightMode::ratio_to_labeled;
  if (mode == "fraction_of_batch") return UnlabeledWeightMode::fraction_of_batch;
  throw std::runtime_error(
      "config key loss.unlabeled_weight_mode: expected ratio_to_labeled or fraction_of_batch");
}

double Config::pseudo_confidence_threshold() const {
  return get_double("loss.pseudo_confidence_threshold");
}

double Config::pseudo_nms_iou() const { return get_double("loss.pseudo_nms_iou"); }

double Config::anu_keep_rate() const { return get_double("anu.keep_rate"); }

AugmentRanges Config::augment() const {
  AugmentRanges r;
  r.contrast = get_double("augment.contrast");
  r.gamma = get_double("augment.gamma");
  r.brightness_min = get_double("augment.brightness_min");
  r.brightness_max = get_double("augment.brightness_max");
  r.blur_sigma_min = get_double("augment.blur_sigma_min");
  r.blur_sigma_max = get_double("augment.blur_sigma_max");
  r.noise_sigma_min = get_double("augment.noise_sigma_min");
  r.noise_sigma_max = get_double("augment.noise_sigma_max");
  return r;
}

MetricsConfig Config::metrics() const {
  MetricsConfig c;
  c.iou_threshold = get_double("metrics.iou_threshold");
  c.min_visibility = get_double("metrics.min_visibility");
  c.pedestrian_class = get_int("metrics.pedestrian_class");
  return c;
}

ScenarioConfig Config::scenario() const {
  ScenarioConfig c;
  c.num_frames = get_int("synth.num_frames");
  c.num_objects = get_int("synth.num_objects");
  c.width = get_int("synth.width");
  c.height = get_int("synth.height");
  c.speed_min = get_double("synth.speed_min");
  c.speed_max = get_double("synth.speed_max");
  c.crossings = get_int("synth.crossings");
  c.bounce_crossings = get_bool("synth.bounce_crossings");
  return c;
}

CorruptionConfig Config::corruption() const {
  CorruptionConfig c;
  c.severity = get_double("corrupt.severity");
  c.miss_rate = get_double("corrupt.miss_rate");
  c.jitter = get_double("corrupt.jitter");
  c.fp_rate = get_double("corrupt.fp_rate");
  c.score_noise = get_double("corrupt.score_noise");
  c.embedding_noise = get_double("corrupt.embedding_noise");
  c.occlusion_iou = get_double("corrupt.occlusion_iou");
  c.embedding_dim = get_int("corrupt.embedding_dim");
  return c;
}

}  // namespace crtrack
