// sedkit/postproc.cpp

#include "sedkit/postproc.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "sedkit/dataio.h"
#include "sedkit/errors.h"

namespace sedkit {

namespace {

void check_window(int window) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("filter window must be odd and >= 1, got " + std::to_string(window));
}

// Replicate-padded access.
double padded(std::span<const double> row, long i) {
  const long last = static_cast<long>(row.size()) - 1;
  return row[static_cast<std::size_t>(std::clamp(i, 0L, last))];
}

// Replaces row c of every grid in `dst` by the filtered row c of `src`.
void smooth_class(const ScoreBundle& src, ScoreBundle& dst, std::size_t c, int median_len, int mean_len) {
  for (auto& [clip, grid] : dst.grids) {
    const auto filtered = mean_filter(median_filter(src.grids.at(clip).row(c), median_len), mean_len);
    std::copy(filtered.begin(), filtered.end(), grid.row(c).begin());
  }
}

}  // namespace

WindowConfig WindowConfig::identity(std::size_t num_classes) {
  return {std::vector<int>(num_classes, 1), std::vector<int>(num_classes, 1)};
}

void WindowConfig::validate() const {
  if (median_len.size() != mean_len.size()) throw std::invalid_argument("window config is ragged");
  for (std::size_t c = 0; c < median_len.size(); ++c) {
    check_window(median_len[c]);
    check_window(mean_len[c]);
    if (mean_len[c] < median_len[c])
      throw std::invalid_argument("mean window must not be shorter than the median window");
  }
}

std::vector<double> median_filter(std::span<const double> row, int window) {
  check_window(window);
  std::vector<double> out(row.begin(), row.end());
  if (window == 1 || row.empty()) return out;
  const long half = window / 2;

  std::vector<double> sorted;
  sorted.reserve(static_cast<std::size_t>(window));
  for (long i = -half; i <= half; ++i) sorted.push_back(padded(row, i));
  std::sort(sorted.begin(), sorted.end());

  const long n = static_cast<long>(row.size());
  for (long t = 0; t < n; ++t) {
    out[static_cast<std::size_t>(t)] = sorted[static_cast<std::size_t>(half)];
    if (t + 1 == n) break;
    const double leaving = padded(row, t - half);
    const double entering = padded(row, t + half + 1);
    sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), leaving));
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), entering), entering);
  }
  return out;
}

std::vector<double> mean_filter(std::span<const double> row, int window) {
  check_window(window);
  std::vector<double> out(row.begin(), row.end());
  if (window == 1 || row.empty()) return out;
  const long half = window / 2;
  const long n = static_cast<long>(row.size());

  // Prefix sums over the padded row: prefix[k] = sum of padded[-half .. k-half-1].
  std::vector<double> prefix(static_cast<std::size_t>(n + 2 * half + 1), 0.0);
  for (long k = 0; k < n + 2 * half; ++k)
    prefix[static_cast<std::size_t>(k + 1)] = prefix[static_cast<std::size_t>(k)] + padded(row, k - half);

  // Monotone deques give the window min/max used to clamp rounding error.
  std::deque<long> lo, hi;
  auto push = [&](long k) {
    const double v = padded(row, k - half);
    while (!lo.empty() && padded(row, lo.back() - half) >= v) lo.pop_back();
    while (!hi.empty() && padded(row, hi.back() - half) <= v) hi.pop_back();
    lo.push_back(k);
    hi.push_back(k);
  };
  for (long k = 0; k < window - 1; ++k) push(k);
  for (long t = 0; t < n; ++t) {
    push(t + window - 1);
    while (lo.front() < t) lo.pop_front();
    while (hi.front() < t) hi.pop_front();
    const double sum = prefix[static_cast<std::size_t>(t + window)] - prefix[static_cast<std::size_t>(t)];
    out[static_cast<std::size_t>(t)] =
        std::clamp(sum / window, padded(row, lo.front() - half), padded(row, hi.front() - half));
  }
  return out;
}

int tied_mean_length(int median_len) {
  check_window(median_len);
  if (median_len == 1) return 1;
  int len = (3 * median_len + 1) / 2;  // ceil(1.5 * median_len)
  if (len % 2 == 0) ++len;
  return len;
}

FrameGrid apply_pipeline(const FrameGrid& grid, const WindowConfig& cfg) {
  cfg.validate();
  if (cfg.num_classes() != grid.num_classes())
    throw std::invalid_argument("window config class count differs from grid");
  FrameGrid out = grid;
  for (std::size_t c = 0; c < grid.num_classes(); ++c) {
    const auto filtered = mean_filter(median_filter(grid.row(c), cfg.median_len[c]), cfg.mean_len[c]);
    std::copy(filtered.begin(), filtered.end(), out.row(c).begin());
  }
  return out;
}

ScoreBundle apply_pipeline(const ScoreBundle& scores, const WindowConfig& cfg) {
  ScoreBundle out = scores;
  for (auto& [clip, grid] : out.grids) grid = apply_pipeline(scores.grids.at(clip), cfg);
  return out;
}

double window_objective(const PsdsResult& result, std::size_t c) {
  const double class_score = result.per_class.at(c);
  if (result.overall > 0.0) return class_score / result.overall;
  return class_score > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

TuneResult tune_windows(const Dataset& dataset, const ScoreBundle& scores, const PsdsParams& params,
                        const TuneOptions& options) {
  if (options.search_max < 1) throw std::invalid_argument("search_max must be >= 1");
  const std::size_t n = dataset.num_classes();
  if (scores.num_classes() != n) throw std::invalid_argument("score bundle class count differs from dataset");

  PsdsEvaluator evaluator(dataset, options.thresholds, params, options.jobs);
  evaluator.evaluate(scores);
  ScoreBundle working = scores;

  TuneResult result;
  result.config = WindowConfig::identity(n);
  result.chosen_objective.assign(n, 0.0);
  result.baseline_objective.assign(n, 0.0);

  for (std::size_t c = 0; c < n; ++c) {
    int best_median = 1;
    int best_mean = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (int len = 1; len <= options.search_max; len += 2) {
      const int mean_len = options.tie_mean ? tied_mean_length(len) : len;
      smooth_class(scores, working, c, len, mean_len);
      const double objective = window_objective(evaluator.probe_class(working, c), c);
      if (len == 1) result.baseline_objective[c] = objective;
      if (objective > best) {
        best = objective;
        best_median = len;
        best_mean = mean_len;
      }
    }
    if (!options.tie_mean) {
      for (int len = best_median + 2; len <= options.search_max; len += 2) {
        smooth_class(scores, working, c, best_median, len);
        const double objective = window_objective(evaluator.probe_class(working, c), c);
        if (objective > best) {
          best = objective;
          best_mean = len;
        }
      }
    }
    result.config.median_len[c] = best_median;
    result.config.mean_len[c] = best_mean;
    result.chosen_objective[c] = best;
    smooth_class(scores, working, c, best_median, best_mean);
    evaluator.reevaluate_class(working, c);
  }
  return result;
}

std::string write_window_csv(const WindowConfig& cfg, const std::vector<std::string>& class_names) {
  cfg.validate();
  if (class_names.size() != cfg.num_classes()) throw std::invalid_argument("class names do not match windows");
  std::string out = "class,median_len,mean_len\n";
  for (std::size_t c = 0; c < class_names.size(); ++c)
    out += class_names[c] + ',' + std::to_string(cfg.median_len[c]) + ',' + std::to_string(cfg.mean_len[c]) + '\n';
  return out;
}

WindowConfig parse_window_csv(std::string_view text, const std::vector<std::string>& class_names,
                              const std::string& source) {
  WindowConfig cfg;
  cfg.median_len.assign(class_names.size(), 0);
  cfg.mean_len.assign(class_names.size(), 0);
  std::size_t line = 0;
  bool header_seen = false;
  for (const auto& raw : split_fields(text, '\n')) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(raw, ',');
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "class" || fields[1] != "median_len" || fields[2] != "mean_len")
        throw ParseError(source, line, "expected header 'class,median_len,mean_len'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(source, line, "expected 3 fields");
    auto it = std::find(class_names.begin(), class_names.end(), fields[0]);
    if (it == class_names.end()) throw ParseError(source, line, "unknown class name '" + fields[0] + "'");
    const auto c = static_cast<std::size_t>(it - class_names.begin());
    if (cfg.median_len[c] != 0) throw ParseError(source, line, "duplicate class '" + fields[0] + "'");
    const double median = parse_number(fields[1], source, line, "median_len");
    const double mean = parse_number(fields[2], source, line, "mean_len");
    if (median != std::floor(median) || mean != std::floor(mean) || median < 1 || mean < 1)
      throw ParseError(source, line, "window lengths must be positive integers");
    cfg.median_len[c] = static_cast<int>(median);
    cfg.mean_len[c] = static_cast<int>(mean);
  }
  if (!header_seen) throw ParseError(source, 1, "expected header 'class,median_len,mean_len'");
  for (std::size_t c = 0; c < class_names.size(); ++c)
    if (cfg.median_len[c] == 0) throw ParseError(source, 0, "no window for class '" + class_names[c] + "'");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
  return cfg;
}

}  // namespace sedkit
