// sedkit/postproc.h
//
// Median-then-mean smoothing of frame probabilities and the per-class search
// for filter lengths. Window lengths are in frames and always odd.

#ifndef SEDKIT_POSTPROC_H_
#define SEDKIT_POSTPROC_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sedkit/dataset.h"
#include "sedkit/psds.h"

namespace sedkit {

struct WindowConfig {
  std::vector<int> median_len;
  std::vector<int> mean_len;

  /// Median and mean lengths of 1 for every class (no smoothing).
  static WindowConfig identity(std::size_t num_classes);
  std::size_t num_classes() const { return median_len.size(); }
  /// Throws std::invalid_argument unless lengths are odd, >= 1, and
  /// mean_len >= median_len.
  void validate() const;
  bool operator==(const WindowConfig&) const = default;
};

/// Centered sliding median with edge-replication padding.
std::vector<double> median_filter(std::span<const double> row, int window);

/// Centered sliding mean with edge-replication padding. Outputs are clamped
/// to the range of their window, so constant stretches stay exact.
std::vector<double> mean_filter(std::span<const double> row, int window);

/// Mean length paired with a median length: 1 stays 1, otherwise the
/// smallest odd integer >= 1.5 * median_len.
int tied_mean_length(int median_len);

FrameGrid apply_pipeline(const FrameGrid& grid, const WindowConfig& cfg);
ScoreBundle apply_pipeline(const ScoreBundle& scores, const WindowConfig& cfg);

struct TuneOptions {
  int search_max = 500;
  bool tie_mean = true;
  std::vector<double> thresholds = default_thresholds();
  int jobs = 1;
};

struct TuneResult {
  WindowConfig config;
  /// Objective PSDS_c / PSDS of each class at the chosen length, and of the
  /// no-smoothing candidate, both measured while that class was searched.
  std::vector<double> chosen_objective;
  std::vector<double> baseline_objective;
};

/// Objective of class c: PSDS_c / PSDS. When PSDS is 0 the ratio is +inf if
/// PSDS_c > 0 and 0 otherwise.
double window_objective(const PsdsResult& result, std::size_t c);

/// One coordinate pass over classes in index order. For each class, every
/// odd length up to search_max is tried with the other classes frozen; the
/// first maximizer (smallest length) wins.
TuneResult tune_windows(const Dataset& dataset, const ScoreBundle& scores, const PsdsParams& params,
                        const TuneOptions& options = {});

/// `class,median_len,mean_len` rows in class order.
std::string write_window_csv(const WindowConfig& cfg, const std::vector<std::string>& class_names);
WindowConfig parse_window_csv(std::string_view text, const std::vector<std::string>& class_names,
                              const std::string& source = "windows");

}  // namespace sedkit

#endif  // SEDKIT_POSTPROC_H_
