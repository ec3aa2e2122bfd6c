// sedkit/config.h
//
// Flat key=value run configuration. Lines starting with '#' are comments.
//
//   hop_s                     frame hop in seconds shared by all score grids
//   classes                   comma-separated class order (default: sorted
//                             ground-truth labels)
//   thresholds                comma-separated operating-point thresholds
//   psds1.<param>, psds2.<param>
//                             rho_dtc, rho_gtc, rho_cttc, alpha_ct,
//                             alpha_st, e_max
//   loss.lambda_iou, loss.lambda_l1, loss.cost_class_weight,
//   loss.no_object_weight
//   window.search_max         largest window length tried (odd lengths only)
//   window.tie_mean           1: mean length derived from median length,
//                             0: mean length searched separately
//
// Unknown keys are errors.

#ifndef SEDKIT_CONFIG_H_
#define SEDKIT_CONFIG_H_

#include <string>
#include <string_view>
#include <vector>

#include "sedkit/assignment.h"
#include "sedkit/psds.h"

namespace sedkit {

struct ToolkitConfig {
  double hop_s = 0.02;
  std::vector<std::string> classes;
  std::vector<double> thresholds = default_thresholds();
  PsdsParams psds1 = PsdsParams::psds1();
  PsdsParams psds2 = PsdsParams::psds2();
  LossWeights loss;
  int window_search_max = 500;
  bool window_tie_mean = true;

  /// Profile lookup by name ("psds1" / "psds2").
  const PsdsParams& profile(const std::string& name) const;
  void validate() const;
};

/// Starts from defaults and applies every key in `text`.
ToolkitConfig parse_config(std::string_view text, const std::string& source = "config");

/// Applies a single key/value pair; throws std::invalid_argument for unknown
/// keys or bad values.
void apply_config_value(ToolkitConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c exactly.
std::string to_config_text(const ToolkitConfig& cfg);

}  // namespace sedkit

#endif  // SEDKIT_CONFIG_H_
