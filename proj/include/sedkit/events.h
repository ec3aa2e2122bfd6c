// sedkit/events.h
//
// Event-level and frame-level representations of sound event detections,
// plus the conversions between them.

#ifndef SEDKIT_EVENTS_H_
#define SEDKIT_EVENTS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sedkit {

/// Tolerance used when a normalized box or interval sits just outside the
/// clip because of floating-point round trips.
inline constexpr double kBoundaryTolerance = 1e-9;

struct Event {
  int class_id = 0;
  double onset_s = 0.0;
  double offset_s = 0.0;
  double score = 1.0;

  double duration() const { return offset_s - onset_s; }
  bool operator==(const Event&) const = default;
};

/// Throws std::invalid_argument unless 0 <= onset < offset and score in [0,1].
void validate_event(const Event& event);

/// Half-open time interval [begin, end) in seconds.
struct Interval {
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
};

/// Event boundary expressed as center and length, both as fractions of the
/// clip duration.
struct NormalizedBox {
  double center = 0.5;
  double length = 1.0;
  bool operator==(const NormalizedBox&) const = default;
};

/// Validates and clamps a box that violates the clip edges by at most
/// kBoundaryTolerance. Larger violations throw std::invalid_argument.
NormalizedBox checked_box(NormalizedBox box);

struct EventSet {
  std::string clip_id;
  double clip_duration_s = 0.0;
  std::vector<Event> events;
};

/// Throws std::invalid_argument if any event is malformed or ends after the
/// clip.
void validate_event_set(const EventSet& set);

/// Per-clip class-by-frame probability matrix, stored row-major [C x T].
class FrameGrid {
 public:
  FrameGrid() = default;
  FrameGrid(std::string clip_id, double hop_s, double duration_s,
            std::size_t num_classes, std::size_t num_frames);

  const std::string& clip_id() const { return clip_id_; }
  double hop_s() const { return hop_s_; }
  double duration_s() const { return duration_s_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_frames() const { return num_frames_; }

  double at(std::size_t c, std::size_t t) const { return probs_[c * num_frames_ + t]; }
  double& at(std::size_t c, std::size_t t) { return probs_[c * num_frames_ + t]; }

  std::span<const double> row(std::size_t c) const {
    return {probs_.data() + c * num_frames_, num_frames_};
  }
  std::span<double> row(std::size_t c) {
    return {probs_.data() + c * num_frames_, num_frames_};
  }

  /// Drops trailing frames; used to reconcile grids differing by rounding.
  void truncate(std::size_t num_frames);

  /// Throws std::invalid_argument if an entry lies outside [0,1].
  void validate() const;

  bool operator==(const FrameGrid&) const = default;

 private:
  std::string clip_id_;
  double hop_s_ = 0.0;
  double duration_s_ = 0.0;
  std::size_t num_classes_ = 0;
  std::size_t num_frames_ = 0;
  std::vector<double> probs_;
};

/// Clip-level tags, hard {0,1} labels or predicted probabilities.
struct ClipLabel {
  std::vector<double> tags;
};

/// Number of frames covering a clip: ceil(duration / hop), tolerant of
/// representation error in the quotient.
std::size_t frame_count(double duration_s, double hop_s);

std::pair<double, double> box_to_interval(NormalizedBox box, double clip_duration_s);
NormalizedBox interval_to_box(double onset_s, double offset_s, double clip_duration_s);

/// 1-D intersection over union. Zero for disjoint intervals.
double segment_iou(Interval a, Interval b);

/// Overlap length of two intervals (0 when disjoint).
double intersection_length(Interval a, Interval b);

/// Paints every event onto a [C x T] grid. A frame belongs to an event when
/// its center lies in [onset, offset); overlapping events keep the max score.
FrameGrid rasterize(const EventSet& events, double hop_s, std::size_t num_classes);

/// Turns maximal runs of frames with prob >= threshold into events whose
/// boundaries sit on frame edges; the event score is the run maximum.
EventSet binarize_to_events(const FrameGrid& grid, std::span<const double> thresholds);

/// Events of class c only, using the same run rule as binarize_to_events.
EventSet binarize_class(const FrameGrid& grid, std::size_t c, double threshold);

/// Within each class, groups events that overlap (transitively) and keeps
/// only the best one of each group: highest score, then earlier onset, then
/// longer duration. Survivors keep their input order.
EventSet de_overlap(const EventSet& events);

}  // namespace sedkit

#endif  // SEDKIT_EVENTS_H_
