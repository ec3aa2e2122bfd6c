// sedkit/dataset.h
//
// In-memory dataset and model-score containers shared by evaluation, fusion
// and post-processing.

#ifndef SEDKIT_DATASET_H_
#define SEDKIT_DATASET_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "sedkit/events.h"

namespace sedkit {

struct Dataset {
  std::map<std::string, EventSet> ground_truth;  // one entry per clip in durations
  std::map<std::string, double> durations;
  std::vector<std::string> class_names;

  std::size_t num_classes() const { return class_names.size(); }
  /// Index of `label` in class_names, or -1.
  int class_index(const std::string& label) const;
  double total_hours() const;
  /// Ground-truth event count per class.
  std::vector<int> gt_counts() const;
  /// Throws std::invalid_argument if an invariant is broken.
  void validate() const;
};

struct ScoreBundle {
  std::string model_id;
  double hop_s = 0.0;
  std::vector<std::string> class_names;
  std::map<std::string, FrameGrid> grids;

  std::size_t num_classes() const { return class_names.size(); }
  /// Throws std::invalid_argument unless every grid shares hop and class count.
  void validate() const;
};

}  // namespace sedkit

#endif  // SEDKIT_DATASET_H_
