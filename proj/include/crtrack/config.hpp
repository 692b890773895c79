#pragma once

#include <map>
#include <string>

#include "crtrack/asa.hpp"
#include "crtrack/association.hpp"
#include "crtrack/augment.hpp"
#include "crtrack/metrics.hpp"
#include "crtrack/motion.hpp"
#include "crtrack/ssl_loss.hpp"
#include "crtrack/synth.hpp"

namespace crtrack {

// Plain `key = value` configuration covering every tunable default in the
// library. Unknown or duplicate keys and malformed values are errors carrying
// line numbers; serialize() emits the effective settings sorted by key.
class Config {
 public:
  Config();  // all defaults

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text, const std::string& origin = "<config>");

  void set(const std::string& key, const std::string& value);
  const std::string& raw(const std::string& key) const;

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  std::string serialize() const;

  KalmanParams kalman() const;
  AssociationConfig association() const;
  AsaWeights asa_weights() const;
  AsaConfig asa() const;
  LossWeights loss_weights() const;
  UnlabeledWeightMode unlabeled_mode() const;
  double pseudo_confidence_threshold() const;
  double pseudo_nms_iou() const;
  double anu_keep_rate() const;
  AugmentRanges augment() const;
  MetricsConfig metrics() const;
  ScenarioConfig scenario() const;      // seed left at its default; set by callers
  CorruptionConfig corruption() const;  // likewise

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace crtrack
