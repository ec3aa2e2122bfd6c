// sedkit/psds.h
//
// Polyphonic sound detection score (PSDS) over a set of operating points,
// both the class-averaged score and the class-specific variant in which the
// effective TP rate of a class is that class's own TP ratio.

#ifndef SEDKIT_PSDS_H_
#define SEDKIT_PSDS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sedkit/dataset.h"
#include "sedkit/events.h"

namespace sedkit {

/// Tolerance and penalty parameters of one PSDS profile. Ratios are
/// intersection fractions, e_max is in false positives per hour.
struct PsdsParams {
  double rho_dtc = 0.7;
  double rho_gtc = 0.7;
  double rho_cttc = 0.3;
  double alpha_ct = 0.0;
  double alpha_st = 1.0;
  double e_max = 100.0;

  static PsdsParams psds1() { return {0.7, 0.7, 0.3, 0.0, 1.0, 100.0}; }
  static PsdsParams psds2() { return {0.1, 0.1, 0.3, 0.5, 1.0, 100.0}; }

  void validate() const;
  bool operator==(const PsdsParams&) const = default;
};

/// The 50 default operating-point thresholds, evenly spaced over
/// [0.01, 0.99].
std::vector<double> default_thresholds();

/// Match counts of the detections of a single class within one clip.
struct ClassCounts {
  int tp = 0;                 // ground-truth events of this class that were detected
  int fp = 0;                 // detections of this class that are not true positives
  std::vector<int> cross;     // cross[c'] = FPs that cross-trigger onto class c'

  ClassCounts& operator+=(const ClassCounts& other);
  bool operator==(const ClassCounts&) const = default;
};

/// Counts for class `c` only. Depends on the class-c detections and on the
/// ground truth of every class (cross-triggers).
ClassCounts match_class(const EventSet& gt, const EventSet& det, int c,
                        std::size_t num_classes, const PsdsParams& params);

/// Per-class counts for one clip; detections need not be de-overlapped.
std::vector<ClassCounts> match_clip(const EventSet& gt, const EventSet& det,
                                    std::size_t num_classes, const PsdsParams& params);

struct OperatingPoint {
  double threshold = 0.0;
  std::vector<double> tp_ratio;  // r_TP,c in [0,1]
  std::vector<double> efpr;      // effective FP per hour
  std::vector<int> gt_count;     // ground-truth events per class
};

/// Converts aggregated per-class counts into an operating point.
OperatingPoint make_operating_point(double threshold, std::span<const ClassCounts> counts,
                                    std::span<const int> gt_count, double dataset_hours,
                                    const PsdsParams& params);

/// Binarizes every clip at `threshold`, de-overlaps, and matches against the
/// dataset. Clips missing from the bundle contribute no detections.
OperatingPoint operating_point(const Dataset& dataset, const ScoreBundle& scores,
                               double threshold, const PsdsParams& params);

struct RocStep {
  double efpr = 0.0;
  double tp_ratio = 0.0;
};

/// Per-class right-continuous staircase upper envelope. `active[c]` is false
/// for classes without ground truth; they are excluded from class statistics.
struct RocCurve {
  std::vector<std::vector<RocStep>> steps;
  std::vector<bool> active;

  std::size_t num_classes() const { return steps.size(); }
  /// Envelope value of class c at eFPR e (0 below the first step).
  double tp_ratio_at(std::size_t c, double e) const;
};

RocCurve build_roc(std::span<const OperatingPoint> points);

/// Class-averaged PSDS: normalized integral of mean - alpha_st * std of the
/// active classes' TP ratios, clipped at zero.
double psds_overall(const RocCurve& roc, const PsdsParams& params);

/// Class-specific PSDS of class c.
double psds_class(const RocCurve& roc, std::size_t c, const PsdsParams& params);

struct PsdsResult {
  RocCurve roc;
  std::vector<OperatingPoint> points;
  double overall = 0.0;
  std::vector<double> per_class;
};

/// Caches per-(class, threshold) match counts so that re-scoring after a
/// change to a single class only redoes that class.
class PsdsEvaluator {
 public:
  PsdsEvaluator(const Dataset& dataset, std::vector<double> thresholds, PsdsParams params,
                int jobs = 1);

  PsdsResult evaluate(const ScoreBundle& scores);

  /// Recomputes the cached counts of class c from `scores` and returns the
  /// resulting scores. The cache for other classes must have been filled by a
  /// previous evaluate().
  PsdsResult reevaluate_class(const ScoreBundle& scores, std::size_t c);

  /// Like reevaluate_class but leaves the cache untouched.
  PsdsResult probe_class(const ScoreBundle& scores, std::size_t c) const;

  const PsdsParams& params() const { return params_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

 private:
  // counts[c][k]: class-c counts summed over clips at threshold k.
  using Table = std::vector<std::vector<ClassCounts>>;

  std::vector<ClassCounts> class_counts(const ScoreBundle& scores, std::size_t c) const;
  PsdsResult finish(const Table& table) const;

  const Dataset& dataset_;
  std::vector<double> thresholds_;
  PsdsParams params_;
  int jobs_;
  std::vector<int> gt_count_;
  double hours_ = 0.0;
  Table cache_;
};

}  // namespace sedkit

#endif  // SEDKIT_PSDS_H_
