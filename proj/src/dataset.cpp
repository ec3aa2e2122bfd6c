// sedkit/dataset.cpp

#include "sedkit/dataset.h"

#include <algorithm>
#include <stdexcept>

namespace sedkit {

int Dataset::class_index(const std::string& label) const {
  auto it = std::find(class_names.begin(), class_names.end(), label);
  return it == class_names.end() ? -1 : static_cast<int>(it - class_names.begin());
}

double Dataset::total_hours() const {
  double seconds = 0.0;
  for (const auto& [clip, d] : durations) seconds += d;
  return seconds / 3600.0;
}

std::vector<int> Dataset::gt_counts() const {
  std::vector<int> counts(num_classes(), 0);
  for (const auto& [clip, set] : ground_truth)
    for (const auto& e : set.events) ++counts[static_cast<std::size_t>(e.class_id)];
  return counts;
}

void Dataset::validate() const {
  for (const auto& [clip, set] : ground_truth) {
    auto it = durations.find(clip);
    if (it == durations.end())
      throw std::invalid_argument("clip '" + clip + "' has ground truth but no duration");
    if (set.clip_duration_s != it->second)
      throw std::invalid_argument("clip '" + clip + "' duration disagrees with durations table");
    validate_event_set(set);
    for (const auto& e : set.events)
      if (static_cast<std::size_t>(e.class_id) >= num_classes())
        throw std::invalid_argument("clip '" + clip + "' has an event outside the class list");
  }
  for (const auto& [clip, d] : durations)
    if (!(d > 0.0)) throw std::invalid_argument("clip '" + clip + "' has a non-positive duration");
}

void ScoreBundle::validate() const {
  if (!(hop_s > 0.0)) throw std::invalid_argument("score bundle '" + model_id + "' has no hop");
  for (const auto& [clip, grid] : grids) {
    if (grid.num_classes() != num_classes())
      throw std::invalid_argument("clip '" + clip + "' of '" + model_id + "' has " +
                                  std::to_string(grid.num_classes()) + " classes, expected " +
                                  std::to_string(num_classes()));
    if (grid.hop_s() != hop_s)
      throw std::invalid_argument("clip '" + clip + "' of '" + model_id + "' uses a different hop");
    grid.validate();
  }
}

}  // namespace sedkit
