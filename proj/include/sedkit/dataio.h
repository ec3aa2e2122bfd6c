// sedkit/dataio.h
//
// Readers and writers for the DCASE-style text formats:
//
//   ground truth / detections  filename<TAB>onset<TAB>offset<TAB>event_label
//   durations                  filename<TAB>duration
//   frame scores               one CSV per clip, header of class names,
//                              one row per frame
//   predictions                filename<TAB>center<TAB>length<TAB><class...><TAB>no_event
//   tags                       filename<TAB><class...>
//
// All parsers throw ParseError naming the source and the offending line.

#ifndef SEDKIT_DATAIO_H_
#define SEDKIT_DATAIO_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sedkit/assignment.h"
#include "sedkit/dataset.h"
#include "sedkit/events.h"

namespace sedkit {

struct LabeledEvent {
  std::string label;
  double onset_s = 0.0;
  double offset_s = 0.0;
  double score = 1.0;  // optional `score` column of detection files
  bool operator==(const LabeledEvent&) const = default;
};

/// Ground-truth or detection rows grouped by clip, each clip's rows sorted
/// by (onset, offset, label).
using AnnotationTable = std::map<std::string, std::vector<LabeledEvent>>;

/// An optional `score` column (in [0,1]) is read when present.
AnnotationTable parse_ground_truth(std::string_view text, const std::string& source = "ground truth");
std::map<std::string, double> parse_durations(std::string_view text, const std::string& source = "durations");

/// Builds a Dataset from parsed tables. With an empty `class_names` the
/// classes are the sorted set of labels appearing in `table`.
Dataset make_dataset(const AnnotationTable& table, const std::map<std::string, double>& durations,
                     std::vector<std::string> class_names = {});

/// Renders detection rows onto each clip's frame grid (clips without rows get
/// an all-zero grid). Labels outside `class_names` are an error.
ScoreBundle rasterize_table(const AnnotationTable& table, const std::map<std::string, double>& durations,
                            const std::vector<std::string>& class_names, double hop_s, std::string model_id);

/// Parses one clip's score CSV and reorders its columns to `class_names`.
FrameGrid parse_frame_scores(std::string_view text, const std::string& clip_id,
                             const std::vector<std::string>& class_names, double hop_s,
                             double duration_s, const std::string& source);

/// Loads every `<clip_id>.csv` in `dir`. Durations default to frames * hop
/// for clips absent from `durations`.
ScoreBundle load_frame_scores(const std::filesystem::path& dir, const std::vector<std::string>& class_names,
                              double hop_s, const std::map<std::string, double>& durations,
                              std::string model_id = {});

/// Shortest round-trip formatting, so re-written scores equal their input.
std::string write_frame_scores(const FrameGrid& grid, const std::vector<std::string>& class_names);

/// Writes `<clip_id>.csv` for every grid into `dir` (created if needed).
void save_frame_scores(const ScoreBundle& bundle, const std::filesystem::path& dir);

/// Ground-truth schema with 6 fractional digits; clips in key order, events
/// sorted by (onset, offset, class).
std::string write_detections(const std::map<std::string, EventSet>& events,
                             const std::vector<std::string>& class_names);

std::map<std::string, std::vector<Prediction>> parse_predictions(std::string_view text,
                                                                 const std::vector<std::string>& class_names,
                                                                 const std::string& source = "predictions");

std::map<std::string, ClipLabel> parse_tags(std::string_view text, const std::vector<std::string>& class_names,
                                            const std::string& source = "tags");

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Splits on `sep`, keeping empty fields; strips a trailing '\r'.
std::vector<std::string> split_fields(std::string_view line, char sep);

/// Strict decimal parse of the whole field; throws ParseError on failure.
double parse_number(std::string_view field, const std::string& source, std::size_t line, const std::string& what);

/// Fixed-point formatting with the given number of fractional digits.
std::string format_fixed(double value, int digits);

/// Shortest representation that parses back to the same double.
std::string format_shortest(double value);

}  // namespace sedkit

#endif  // SEDKIT_DATAIO_H_
