// sedkit/dataio.cpp

#include "sedkit/dataio.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sedkit/errors.h"

namespace sedkit {

namespace fs = std::filesystem;

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; });
}

std::vector<Line> non_blank_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++number;
    const auto line = text.substr(pos, end - pos);
    if (!is_blank(line)) out.push_back({number, line});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

// Accumulates row errors so that a file reports all of them at once.
class ErrorLog {
 public:
  explicit ErrorLog(std::string source) : source_(std::move(source)) {}

  void add(std::size_t line, const std::string& what) {
    if (first_line_ == 0) first_line_ = line;
    if (!messages_.empty()) messages_ += "; ";
    messages_ += "line " + std::to_string(line) + ": " + what;
  }

  void raise_if_any() const {
    if (first_line_ != 0) throw ParseError(source_, first_line_, messages_);
  }

 private:
  std::string source_;
  std::size_t first_line_ = 0;
  std::string messages_;
};

// Maps required column names to their position in a header row.
std::map<std::string, std::size_t> locate_columns(const std::vector<std::string>& header,
                                                  const std::vector<std::string>& required,
                                                  const std::string& source, std::size_t line) {
  std::map<std::string, std::size_t> at;
  for (const auto& name : required) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(source, line, "missing column '" + name + "'");
    at[name] = static_cast<std::size_t>(it - header.begin());
  }
  return at;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::vector<std::string> split_fields(std::string_view line, char sep) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = line.find(sep, pos);
    out.emplace_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line, const std::string& what) {
  const std::string s = trim(field);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParseError(source, line, "invalid " + what + " '" + s + "'");
  return value;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string out(buf);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string format_shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::logic_error("number formatting failed");
  return std::string(buf, ptr);
}

AnnotationTable parse_ground_truth(std::string_view text, const std::string& source) {
  const auto lines = non_blank_lines(text);
  if (lines.empty()) throw ParseError(source, 1, "missing column 'filename'");
  const auto header = split_fields(lines.front().text, '\t');
  const auto col = locate_columns(header, {"filename", "onset", "offset", "event_label"}, source,
                                  lines.front().number);
  std::size_t width = 0;
  for (const auto& [name, idx] : col) width = std::max(width, idx + 1);
  const auto score_it = std::find(header.begin(), header.end(), "score");
  const bool has_score = score_it != header.end();
  const auto score_col = static_cast<std::size_t>(score_it - header.begin());
  if (has_score) width = std::max(width, score_col + 1);

  AnnotationTable table;
  ErrorLog errors(source);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto fields = split_fields(line.text, '\t');
    if (fields.size() < width) {
      errors.add(line.number, "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
      continue;
    }
    try {
      LabeledEvent e;
      const std::string clip = trim(fields[col.at("filename")]);
      e.label = trim(fields[col.at("event_label")]);
      e.onset_s = parse_number(fields[col.at("onset")], source, line.number, "onset");
      e.offset_s = parse_number(fields[col.at("offset")], source, line.number, "offset");
      if (clip.empty()) throw ParseError(source, line.number, "empty filename");
      if (e.label.empty()) throw ParseError(source, line.number, "empty event label");
      if (e.onset_s < 0.0) throw ParseError(source, line.number, "negative onset");
      if (!(e.onset_s < e.offset_s)) throw ParseError(source, line.number, "onset must precede offset");
      if (has_score) {
        e.score = parse_number(fields[score_col], source, line.number, "score");
        if (!(e.score >= 0.0 && e.score <= 1.0)) throw ParseError(source, line.number, "score outside [0,1]");
      }
      table[clip].push_back(std::move(e));
    } catch (const ParseError& err) {
      std::string what = err.what();
      errors.add(line.number, what.substr(what.find(": ") + 2));
    }
  }
  errors.raise_if_any();
  for (auto& [clip, events] : table)
    std::sort(events.begin(), events.end(), [](const LabeledEvent& a, const LabeledEvent& b) {
      return std::tie(a.onset_s, a.offset_s, a.label) < std::tie(b.onset_s, b.offset_s, b.label);
    });
  return table;
}

std::map<std::string, double> parse_durations(std::string_view text, const std::string& source) {
  const auto lines = non_blank_lines(text);
  if (lines.empty()) throw ParseError(source, 1, "missing column 'filename'");
  const auto header = split_fields(lines.front().text, '\t');
  const auto col = locate_columns(header, {"filename", "duration"}, source, lines.front().number);
  const std::size_t width = std::max(col.at("filename"), col.at("duration")) + 1;

  std::map<std::string, double> out;
  ErrorLog errors(source);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto fields = split_fields(line.text, '\t');
    if (fields.size() < width) {
      errors.add(line.number, "expected " + std::to_string(width) + " fields");
      continue;
    }
    const std::string clip = trim(fields[col.at("filename")]);
    double d = 0.0;
    try {
      d = parse_number(fields[col.at("duration")], source, line.number, "duration");
    } catch (const ParseError&) {
      errors.add(line.number, "invalid duration");
      continue;
    }
    if (!(d > 0.0)) {
      errors.add(line.number, "duration must be positive");
      continue;
    }
    if (!out.emplace(clip, d).second) errors.add(line.number, "duplicate filename '" + clip + "'");
  }
  errors.raise_if_any();
  return out;
}

Dataset make_dataset(const AnnotationTable& table, const std::map<std::string, double>& durations,
                     std::vector<std::string> class_names) {
  if (class_names.empty()) {
    std::set<std::string> labels;
    for (const auto& [clip, events] : table)
      for (const auto& e : events) labels.insert(e.label);
    class_names.assign(labels.begin(), labels.end());
  }
  Dataset ds;
  ds.class_names = std::move(class_names);
  ds.durations = durations;
  for (const auto& [clip, duration] : durations) ds.ground_truth[clip] = EventSet{clip, duration, {}};
  for (const auto& [clip, events] : table) {
    auto it = ds.ground_truth.find(clip);
    if (it == ds.ground_truth.end())
      throw std::invalid_argument("clip '" + clip + "' has ground truth but no duration");
    for (const auto& e : events) {
      const int c = ds.class_index(e.label);
      if (c < 0) throw std::invalid_argument("clip '" + clip + "' uses unknown class '" + e.label + "'");
      it->second.events.push_back({c, e.onset_s, e.offset_s, 1.0});
    }
  }
  ds.validate();
  return ds;
}

ScoreBundle rasterize_table(const AnnotationTable& table, const std::map<std::string, double>& durations,
                            const std::vector<std::string>& class_names, double hop_s, std::string model_id) {
  ScoreBundle bundle;
  bundle.model_id = std::move(model_id);
  bundle.hop_s = hop_s;
  bundle.class_names = class_names;
  for (const auto& [clip, events] : table)
    if (!durations.count(clip)) throw std::invalid_argument("clip '" + clip + "' has detections but no duration");
  for (const auto& [clip, duration] : durations) {
    EventSet set{clip, duration, {}};
    if (auto it = table.find(clip); it != table.end())
      for (const auto& e : it->second) {
        auto c = std::find(class_names.begin(), class_names.end(), e.label);
        if (c == class_names.end())
          throw std::invalid_argument("clip '" + clip + "' uses unknown class '" + e.label + "'");
        set.events.push_back({static_cast<int>(c - class_names.begin()), e.onset_s,
                              std::min(e.offset_s, duration), e.score});
      }
    bundle.grids.emplace(clip, rasterize(set, hop_s, class_names.size()));
  }
  bundle.validate();
  return bundle;
}

FrameGrid parse_frame_scores(std::string_view text, const std::string& clip_id,
                             const std::vector<std::string>& class_names, double hop_s,
                             double duration_s, const std::string& source) {
  const auto lines = non_blank_lines(text);
  if (lines.empty()) throw ParseError(source, 1, "missing header of class names");
  auto header = split_fields(lines.front().text, ',');
  for (auto& h : header) h = trim(h);

  // column index -> class index
  std::vector<std::size_t> to_class(header.size());
  std::vector<bool> seen(class_names.size(), false);
  for (std::size_t k = 0; k < header.size(); ++k) {
    auto it = std::find(class_names.begin(), class_names.end(), header[k]);
    if (it == class_names.end())
      throw ParseError(source, lines.front().number, "unknown class name '" + header[k] + "'");
    const auto c = static_cast<std::size_t>(it - class_names.begin());
    if (seen[c]) throw ParseError(source, lines.front().number, "duplicate class name '" + header[k] + "'");
    seen[c] = true;
    to_class[k] = c;
  }
  for (std::size_t c = 0; c < class_names.size(); ++c)
    if (!seen[c]) throw ParseError(source, lines.front().number, "missing class '" + class_names[c] + "'");

  const std::size_t frames = lines.size() - 1;
  if (frames == 0) throw ParseError(source, lines.front().number, "no frames");
  if (duration_s <= 0.0) duration_s = static_cast<double>(frames) * hop_s;
  FrameGrid grid(clip_id, hop_s, duration_s, class_names.size(), frames);
  ErrorLog errors(source);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto& line = lines[t + 1];
    const auto fields = split_fields(line.text, ',');
    if (fields.size() != header.size()) {
      errors.add(line.number, "expected " + std::to_string(header.size()) + " values, got " +
                                  std::to_string(fields.size()));
      continue;
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      double v = 0.0;
      try {
        v = parse_number(fields[k], source, line.number, "score");
      } catch (const ParseError&) {
        errors.add(line.number, "invalid score '" + trim(fields[k]) + "'");
        continue;
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        errors.add(line.number, "value " + trim(fields[k]) + " outside [0,1]");
        continue;
      }
      grid.at(to_class[k], t) = v;
    }
  }
  errors.raise_if_any();
  return grid;
}

ScoreBundle load_frame_scores(const fs::path& dir, const std::vector<std::string>& class_names,
                              double hop_s, const std::map<std::string, double>& durations,
                              std::string model_id) {
  if (!fs::is_directory(dir)) throw ParseError(dir.string(), 0, "not a directory");
  ScoreBundle bundle;
  bundle.model_id = model_id.empty() ? dir.filename().string() : std::move(model_id);
  if (bundle.model_id.empty()) bundle.model_id = dir.parent_path().filename().string();
  bundle.hop_s = hop_s;
  bundle.class_names = class_names;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    const std::string name = file.filename().string();
    const std::string clip = name.substr(0, name.size() - 4);
    auto dit = durations.find(clip);
    const double duration = dit != durations.end() ? dit->second : 0.0;
    FrameGrid grid = parse_frame_scores(read_text_file(file), clip, class_names, hop_s, duration, file.string());
    if (duration > 0.0) {
      const auto expected = frame_count(duration, hop_s);
      const auto got = grid.num_frames();
      if ((got > expected ? got - expected : expected - got) > 1)
        throw ParseError(file.string(), 0, "has " + std::to_string(got) + " frames, expected " +
                                               std::to_string(expected) + " for a " + format_shortest(duration) +
                                               " s clip at hop " + format_shortest(hop_s));
    }
    bundle.grids.emplace(clip, std::move(grid));
  }
  return bundle;
}

std::string write_frame_scores(const FrameGrid& grid, const std::vector<std::string>& class_names) {
  if (class_names.size() != grid.num_classes()) throw std::invalid_argument("class names do not match grid");
  std::string out;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    if (c) out += ',';
    out += class_names[c];
  }
  out += '\n';
  for (std::size_t t = 0; t < grid.num_frames(); ++t) {
    for (std::size_t c = 0; c < grid.num_classes(); ++c) {
      if (c) out += ',';
      out += format_shortest(grid.at(c, t));
    }
    out += '\n';
  }
  return out;
}

void save_frame_scores(const ScoreBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [clip, grid] : bundle.grids)
    write_text_file(dir / (clip + ".csv"), write_frame_scores(grid, bundle.class_names));
}

std::string write_detections(const std::map<std::string, EventSet>& events,
                             const std::vector<std::string>& class_names) {
  std::string out = "filename\tonset\toffset\tevent_label\n";
  for (const auto& [clip, set] : events) {
    std::vector<Event> sorted = set.events;
    std::sort(sorted.begin(), sorted.end(), [](const Event& a, const Event& b) {
      return std::tie(a.onset_s, a.offset_s, a.class_id) < std::tie(b.onset_s, b.offset_s, b.class_id);
    });
    for (const auto& e : sorted) {
      if (static_cast<std::size_t>(e.class_id) >= class_names.size())
        throw std::invalid_argument("event class outside the class list");
      out += clip + '\t' + format_fixed(e.onset_s, 6) + '\t' + format_fixed(e.offset_s, 6) + '\t' +
             class_names[static_cast<std::size_t>(e.class_id)] + '\n';
    }
  }
  return out;
}

std::map<std::string, std::vector<Prediction>> parse_predictions(std::string_view text,
                                                                 const std::vector<std::string>& class_names,
                                                                 const std::string& source) {
  const auto lines = non_blank_lines(text);
  if (lines.empty()) throw ParseError(source, 1, "missing column 'filename'");
  const auto header = split_fields(lines.front().text, '\t');
  std::vector<std::string> required{"filename", "center", "length"};
  required.insert(required.end(), class_names.begin(), class_names.end());
  required.push_back("no_event");
  const auto col = locate_columns(header, required, source, lines.front().number);
  std::size_t width = 0;
  for (const auto& [name, idx] : col) width = std::max(width, idx + 1);

  std::map<std::string, std::vector<Prediction>> out;
  ErrorLog errors(source);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto fields = split_fields(line.text, '\t');
    if (fields.size() < width) {
      errors.add(line.number, "expected " + std::to_string(width) + " fields");
      continue;
    }
    try {
      Prediction p;
      p.box.center = parse_number(fields[col.at("center")], source, line.number, "center");
      p.box.length = parse_number(fields[col.at("length")], source, line.number, "length");
      for (const auto& name : class_names)
        p.class_probs.push_back(parse_number(fields[col.at(name)], source, line.number, "probability"));
      p.class_probs.push_back(parse_number(fields[col.at("no_event")], source, line.number, "probability"));
      try {
        validate_prediction(p);
        p.box = checked_box(p.box);
      } catch (const std::invalid_argument& e) {
        throw ParseError(source, line.number, e.what());
      }
      out[trim(fields[col.at("filename")])].push_back(std::move(p));
    } catch (const ParseError& err) {
      std::string what = err.what();
      errors.add(line.number, what.substr(what.find(": ") + 2));
    }
  }
  errors.raise_if_any();
  return out;
}

std::map<std::string, ClipLabel> parse_tags(std::string_view text, const std::vector<std::string>& class_names,
                                            const std::string& source) {
  const auto lines = non_blank_lines(text);
  if (lines.empty()) throw ParseError(source, 1, "missing column 'filename'");
  const auto header = split_fields(lines.front().text, '\t');
  std::vector<std::string> required{"filename"};
  required.insert(required.end(), class_names.begin(), class_names.end());
  const auto col = locate_columns(header, required, source, lines.front().number);
  std::size_t width = 0;
  for (const auto& [name, idx] : col) width = std::max(width, idx + 1);

  std::map<std::string, ClipLabel> out;
  ErrorLog errors(source);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto fields = split_fields(line.text, '\t');
    if (fields.size() < width) {
      errors.add(line.number, "expected " + std::to_string(width) + " fields");
      continue;
    }
    try {
      ClipLabel label;
      for (const auto& name : class_names) {
        const double v = parse_number(fields[col.at(name)], source, line.number, "tag");
        if (!(v >= 0.0 && v <= 1.0)) throw ParseError(source, line.number, "tag outside [0,1]");
        label.tags.push_back(v);
      }
      const std::string clip = trim(fields[col.at("filename")]);
      if (!out.emplace(clip, std::move(label)).second)
        throw ParseError(source, line.number, "duplicate filename '" + clip + "'");
    } catch (const ParseError& err) {
      std::string what = err.what();
      errors.add(line.number, what.substr(what.find(": ") + 2));
    }
  }
  errors.raise_if_any();
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace sedkit
