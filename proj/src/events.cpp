// sedkit/events.cpp

#include "sedkit/events.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sedkit {

namespace {

bool overlaps(const Event& a, const Event& b) {
  return a.onset_s < b.offset_s && b.onset_s < a.offset_s;
}

// True when a should survive instead of b.
bool better(const Event& a, const Event& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.onset_s != b.onset_s) return a.onset_s < b.onset_s;
  return a.duration() > b.duration();
}

}  // namespace

void validate_event(const Event& event) {
  if (event.class_id < 0)
    throw std::invalid_argument("event class id must be non-negative");
  if (!(event.onset_s >= 0.0))
    throw std::invalid_argument("event onset must be >= 0");
  if (!(event.onset_s < event.offset_s))
    throw std::invalid_argument("event onset must precede offset");
  if (!(event.score >= 0.0 && event.score <= 1.0))
    throw std::invalid_argument("event score must lie in [0,1]");
}

NormalizedBox checked_box(NormalizedBox box) {
  if (!(box.length > 0.0) || !std::isfinite(box.center))
    throw std::invalid_argument("box length must be positive");
  double lo = box.center - box.length / 2.0;
  double hi = box.center + box.length / 2.0;
  if (lo < -kBoundaryTolerance || hi > 1.0 + kBoundaryTolerance || box.length > 1.0 + kBoundaryTolerance)
    throw std::invalid_argument("box extends outside the clip");
  const double clamped_lo = std::clamp(lo, 0.0, 1.0);
  const double clamped_hi = std::clamp(hi, 0.0, 1.0);
  if (clamped_lo != lo || clamped_hi != hi)
    box = {(clamped_lo + clamped_hi) / 2.0, clamped_hi - clamped_lo};
  return box;
}

void validate_event_set(const EventSet& set) {
  for (const auto& e : set.events) {
    validate_event(e);
    if (e.offset_s > set.clip_duration_s + kBoundaryTolerance)
      throw std::invalid_argument("event in clip '" + set.clip_id + "' ends after the clip");
  }
}

FrameGrid::FrameGrid(std::string clip_id, double hop_s, double duration_s,
                     std::size_t num_classes, std::size_t num_frames)
    : clip_id_(std::move(clip_id)),
      hop_s_(hop_s),
      duration_s_(duration_s),
      num_classes_(num_classes),
      num_frames_(num_frames),
      probs_(num_classes * num_frames, 0.0) {
  if (!(hop_s > 0.0)) throw std::invalid_argument("hop must be positive");
  if (!(duration_s > 0.0)) throw std::invalid_argument("clip duration must be positive");
}

void FrameGrid::truncate(std::size_t num_frames) {
  if (num_frames >= num_frames_) return;
  std::vector<double> kept(num_classes_ * num_frames);
  for (std::size_t c = 0; c < num_classes_; ++c)
    std::copy_n(probs_.begin() + c * num_frames_, num_frames, kept.begin() + c * num_frames);
  probs_ = std::move(kept);
  num_frames_ = num_frames;
}

void FrameGrid::validate() const {
  for (double p : probs_)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("probability outside [0,1] in clip '" + clip_id_ + "'");
}

std::size_t frame_count(double duration_s, double hop_s) {
  if (!(hop_s > 0.0) || !(duration_s > 0.0))
    throw std::invalid_argument("duration and hop must be positive");
  const double q = duration_s / hop_s;
  return static_cast<std::size_t>(std::ceil(q - 1e-9 * std::max(1.0, q)));
}

std::pair<double, double> box_to_interval(NormalizedBox box, double clip_duration_s) {
  if (!(clip_duration_s > 0.0)) throw std::invalid_argument("clip duration must be positive");
  box = checked_box(box);
  return {(box.center - box.length / 2.0) * clip_duration_s,
          (box.center + box.length / 2.0) * clip_duration_s};
}

NormalizedBox interval_to_box(double onset_s, double offset_s, double clip_duration_s) {
  if (!(clip_duration_s > 0.0)) throw std::invalid_argument("clip duration must be positive");
  if (!(onset_s < offset_s)) throw std::invalid_argument("interval is inverted or empty");
  const double tol = kBoundaryTolerance * clip_duration_s;
  if (onset_s < -tol || offset_s > clip_duration_s + tol)
    throw std::invalid_argument("interval lies outside the clip");
  return checked_box({(onset_s + offset_s) / (2.0 * clip_duration_s),
                      (offset_s - onset_s) / clip_duration_s});
}

double intersection_length(Interval a, Interval b) {
  return std::max(0.0, std::min(a.end, b.end) - std::max(a.begin, b.begin));
}

double segment_iou(Interval a, Interval b) {
  if (!(a.begin < a.end) || !(b.begin < b.end))
    throw std::invalid_argument("segment_iou requires non-empty intervals");
  const double inter = intersection_length(a, b);
  const double uni = std::max(a.end, b.end) - std::min(a.begin, b.begin);
  if (inter <= 0.0) return 0.0;
  // The union can exceed the summed lengths minus overlap only by rounding.
  return std::min(1.0, inter / uni);
}

FrameGrid rasterize(const EventSet& events, double hop_s, std::size_t num_classes) {
  validate_event_set(events);
  FrameGrid grid(events.clip_id, hop_s, events.clip_duration_s, num_classes,
                 frame_count(events.clip_duration_s, hop_s));
  for (const auto& e : events.events) {
    if (static_cast<std::size_t>(e.class_id) >= num_classes)
      throw std::invalid_argument("event class id exceeds class count");
    // Frames t with onset <= (t + 0.5) * hop < offset.
    auto first = static_cast<long>(std::ceil(e.onset_s / hop_s - 0.5));
    first = std::max(first - 1, 0L);
    for (auto t = static_cast<std::size_t>(first); t < grid.num_frames(); ++t) {
      const double center = (static_cast<double>(t) + 0.5) * hop_s;
      if (center < e.onset_s) continue;
      if (center >= e.offset_s) break;
      double& cell = grid.at(static_cast<std::size_t>(e.class_id), t);
      cell = std::max(cell, e.score);
    }
  }
  return grid;
}

EventSet binarize_class(const FrameGrid& grid, std::size_t c, double threshold) {
  if (c >= grid.num_classes()) throw std::invalid_argument("class index out of range");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("thresholds must lie in (0,1)");
  EventSet out{grid.clip_id(), grid.duration_s(), {}};
  const double hop = grid.hop_s();
  const auto row = grid.row(c);
  std::size_t t = 0;
  while (t < row.size()) {
    if (row[t] < threshold) {
      ++t;
      continue;
    }
    const std::size_t start = t;
    double peak = row[t];
    while (t < row.size() && row[t] >= threshold) peak = std::max(peak, row[t++]);
    const double onset = static_cast<double>(start) * hop;
    const double offset = std::min(static_cast<double>(t) * hop, grid.duration_s());
    if (onset < offset) out.events.push_back({static_cast<int>(c), onset, offset, peak});
  }
  return out;
}

EventSet binarize_to_events(const FrameGrid& grid, std::span<const double> thresholds) {
  if (thresholds.size() != grid.num_classes())
    throw std::invalid_argument("one threshold per class is required");
  EventSet out{grid.clip_id(), grid.duration_s(), {}};
  for (std::size_t c = 0; c < grid.num_classes(); ++c) {
    auto part = binarize_class(grid, c, thresholds[c]);
    out.events.insert(out.events.end(), part.events.begin(), part.events.end());
  }
  return out;
}

EventSet de_overlap(const EventSet& events) {
  const auto& in = events.events;
  const std::size_t n = in.size();

  // Union-find over same-class overlaps.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (in[i].class_id == in[j].class_id && overlaps(in[i], in[j]))
        parent[find(i)] = find(j);

  std::vector<std::size_t> best(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& b = best[find(i)];
    if (b == n || better(in[i], in[b])) b = i;
  }

  EventSet out{events.clip_id, events.clip_duration_s, {}};
  for (std::size_t i = 0; i < n; ++i)
    if (best[find(i)] == i) out.events.push_back(in[i]);
  return out;
}

}  // namespace sedkit
