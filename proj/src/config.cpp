// sedkit/config.cpp

#include "sedkit/config.h"

#include <map>
#include <stdexcept>

#include "sedkit/dataio.h"
#include "sedkit/errors.h"

namespace sedkit {

namespace {

std::string strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return parse_number(value, key, 0, "value");
  } catch (const ParseError&) {
    throw std::invalid_argument("invalid number '" + value + "' for key '" + key + "'");
  }
}

double* psds_field(PsdsParams& p, const std::string& name) {
  if (name == "rho_dtc") return &p.rho_dtc;
  if (name == "rho_gtc") return &p.rho_gtc;
  if (name == "rho_cttc") return &p.rho_cttc;
  if (name == "alpha_ct") return &p.alpha_ct;
  if (name == "alpha_st") return &p.alpha_st;
  if (name == "e_max") return &p.e_max;
  return nullptr;
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_shortest(values[i]);
  }
  return out;
}

void emit_psds(std::string& out, const std::string& prefix, const PsdsParams& p) {
  out += prefix + ".rho_dtc=" + format_shortest(p.rho_dtc) + '\n';
  out += prefix + ".rho_gtc=" + format_shortest(p.rho_gtc) + '\n';
  out += prefix + ".rho_cttc=" + format_shortest(p.rho_cttc) + '\n';
  out += prefix + ".alpha_ct=" + format_shortest(p.alpha_ct) + '\n';
  out += prefix + ".alpha_st=" + format_shortest(p.alpha_st) + '\n';
  out += prefix + ".e_max=" + format_shortest(p.e_max) + '\n';
}

}  // namespace

const PsdsParams& ToolkitConfig::profile(const std::string& name) const {
  if (name == "psds1") return psds1;
  if (name == "psds2") return psds2;
  throw std::invalid_argument("unknown profile '" + name + "' (expected psds1 or psds2)");
}

void ToolkitConfig::validate() const {
  if (!(hop_s > 0.0)) throw std::invalid_argument("hop_s must be positive");
  if (thresholds.empty()) throw std::invalid_argument("thresholds must not be empty");
  for (double t : thresholds)
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("thresholds must lie in (0,1)");
  psds1.validate();
  psds2.validate();
  if (loss.lambda_iou < 0 || loss.lambda_l1 < 0 || loss.cost_class_weight < 0 || loss.no_object_weight < 0)
    throw std::invalid_argument("loss weights must be non-negative");
  if (window_search_max < 1) throw std::invalid_argument("window.search_max must be >= 1");
}

void apply_config_value(ToolkitConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "hop_s") {
    cfg.hop_s = to_double(key, value);
  } else if (key == "classes") {
    cfg.classes.clear();
    for (const auto& f : split_fields(value, ',')) {
      auto name = strip(f);
      if (name.empty()) throw std::invalid_argument("empty class name in 'classes'");
      cfg.classes.push_back(name);
    }
  } else if (key == "thresholds") {
    cfg.thresholds.clear();
    for (const auto& f : split_fields(value, ',')) cfg.thresholds.push_back(to_double(key, f));
  } else if (key.rfind("psds1.", 0) == 0 || key.rfind("psds2.", 0) == 0) {
    PsdsParams& p = key[4] == '1' ? cfg.psds1 : cfg.psds2;
    double* field = psds_field(p, key.substr(6));
    if (!field) throw std::invalid_argument("unknown config key '" + key + "'");
    *field = to_double(key, value);
  } else if (key == "loss.lambda_iou") {
    cfg.loss.lambda_iou = to_double(key, value);
  } else if (key == "loss.lambda_l1") {
    cfg.loss.lambda_l1 = to_double(key, value);
  } else if (key == "loss.cost_class_weight") {
    cfg.loss.cost_class_weight = to_double(key, value);
  } else if (key == "loss.no_object_weight") {
    cfg.loss.no_object_weight = to_double(key, value);
  } else if (key == "window.search_max") {
    const double v = to_double(key, value);
    if (v != static_cast<int>(v)) throw std::invalid_argument("window.search_max must be an integer");
    cfg.window_search_max = static_cast<int>(v);
  } else if (key == "window.tie_mean") {
    if (value != "0" && value != "1") throw std::invalid_argument("window.tie_mean must be 0 or 1");
    cfg.window_tie_mean = value == "1";
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ToolkitConfig parse_config(std::string_view text, const std::string& source) {
  ToolkitConfig cfg;
  std::size_t number = 0;
  for (const auto& raw : split_fields(text, '\n')) {
    ++number;
    const std::string line = strip(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected key=value");
    try {
      apply_config_value(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, number, e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
  return cfg;
}

std::string to_config_text(const ToolkitConfig& cfg) {
  std::string out;
  out += "hop_s=" + format_shortest(cfg.hop_s) + '\n';
  if (!cfg.classes.empty()) {
    out += "classes=";
    for (std::size_t i = 0; i < cfg.classes.size(); ++i) out += (i ? "," : "") + cfg.classes[i];
    out += '\n';
  }
  out += "thresholds=" + join_numbers(cfg.thresholds) + '\n';
  emit_psds(out, "psds1", cfg.psds1);
  emit_psds(out, "psds2", cfg.psds2);
  out += "loss.lambda_iou=" + format_shortest(cfg.loss.lambda_iou) + '\n';
  out += "loss.lambda_l1=" + format_shortest(cfg.loss.lambda_l1) + '\n';
  out += "loss.cost_class_weight=" + format_shortest(cfg.loss.cost_class_weight) + '\n';
  out += "loss.no_object_weight=" + format_shortest(cfg.loss.no_object_weight) + '\n';
  out += "window.search_max=" + std::to_string(cfg.window_search_max) + '\n';
  out += std::string("window.tie_mean=") + (cfg.window_tie_mean ? "1" : "0") + '\n';
  return out;
}

}  // namespace sedkit
