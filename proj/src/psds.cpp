// sedkit/psds.cpp

#include "sedkit/psds.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sedkit {

namespace {

// Intersection ratios are compared with this slack so that ratios which are
// equal to the criterion in exact arithmetic are not lost to rounding.
constexpr double kCriterionSlack = 1e-12;

bool meets(double covered, double length, double rho) {
  return covered >= rho * length - kCriterionSlack * length;
}

Interval span_of(const Event& e) { return {e.onset_s, e.offset_s}; }

// Integrates the clipped eTPR over [0, e_max) given a callback producing the
// per-class TP ratios at a given eFPR.
template <typename RateAt>
double integrate(const std::vector<double>& breakpoints, double e_max, RateAt&& rate_at) {
  double area = 0.0;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const double lo = breakpoints[k];
    const double hi = k + 1 < breakpoints.size() ? breakpoints[k + 1] : e_max;
    if (hi <= lo) continue;
    area += std::max(0.0, rate_at(lo)) * (hi - lo);
  }
  return std::clamp(area / e_max, 0.0, 1.0);
}

std::vector<double> breakpoints_for(const RocCurve& roc, std::span<const std::size_t> classes,
                                    double e_max) {
  std::vector<double> points{0.0};
  for (auto c : classes)
    for (const auto& s : roc.steps[c])
      if (s.efpr < e_max) points.push_back(s.efpr);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t count = std::min(workers, n);
  for (std::size_t w = 0; w < count; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += count) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

void PsdsParams::validate() const {
  auto ratio = [](double r, const char* name) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0,1]");
  };
  ratio(rho_dtc, "rho_dtc");
  ratio(rho_gtc, "rho_gtc");
  ratio(rho_cttc, "rho_cttc");
  if (!(alpha_ct >= 0.0)) throw std::invalid_argument("alpha_ct must be >= 0");
  if (!(alpha_st >= 0.0)) throw std::invalid_argument("alpha_st must be >= 0");
  if (!(e_max > 0.0)) throw std::invalid_argument("e_max must be positive");
}

std::vector<double> default_thresholds() {
  constexpr int kCount = 50;
  std::vector<double> out(kCount);
  for (int i = 0; i < kCount; ++i) out[i] = 0.01 + 0.98 * i / (kCount - 1);
  return out;
}

ClassCounts& ClassCounts::operator+=(const ClassCounts& other) {
  tp += other.tp;
  fp += other.fp;
  if (cross.size() < other.cross.size()) cross.resize(other.cross.size(), 0);
  for (std::size_t i = 0; i < other.cross.size(); ++i) cross[i] += other.cross[i];
  return *this;
}

ClassCounts match_class(const EventSet& gt, const EventSet& det, int c,
                        std::size_t num_classes, const PsdsParams& params) {
  ClassCounts counts;
  counts.cross.assign(num_classes, 0);

  std::vector<const Event*> dets, gts;
  for (const auto& d : det.events)
    if (d.class_id == c) dets.push_back(&d);
  for (const auto& g : gt.events)
    if (g.class_id == c) gts.push_back(&g);

  std::vector<bool> dtc(dets.size(), false);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    double covered = 0.0;
    for (const auto* g : gts) covered += intersection_length(span_of(*dets[i]), span_of(*g));
    dtc[i] = meets(covered, dets[i]->duration(), params.rho_dtc);
  }

  std::vector<bool> detected(gts.size(), false);
  for (std::size_t j = 0; j < gts.size(); ++j) {
    double covered = 0.0;
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (dtc[i]) covered += intersection_length(span_of(*dets[i]), span_of(*gts[j]));
    detected[j] = meets(covered, gts[j]->duration(), params.rho_gtc);
    if (detected[j]) ++counts.tp;
  }

  for (std::size_t i = 0; i < dets.size(); ++i) {
    bool true_positive = false;
    if (dtc[i])
      for (std::size_t j = 0; j < gts.size() && !true_positive; ++j)
        true_positive = detected[j] && intersection_length(span_of(*dets[i]), span_of(*gts[j])) > 0.0;
    if (true_positive) continue;
    ++counts.fp;
    std::vector<double> other(num_classes, 0.0);
    for (const auto& g : gt.events)
      if (g.class_id != c) other[static_cast<std::size_t>(g.class_id)] += intersection_length(span_of(*dets[i]), span_of(g));
    for (std::size_t k = 0; k < num_classes; ++k)
      if (static_cast<int>(k) != c && other[k] > 0.0 && meets(other[k], dets[i]->duration(), params.rho_cttc))
        ++counts.cross[k];
  }
  return counts;
}

std::vector<ClassCounts> match_clip(const EventSet& gt, const EventSet& det,
                                    std::size_t num_classes, const PsdsParams& params) {
  std::vector<ClassCounts> out;
  out.reserve(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c)
    out.push_back(match_class(gt, det, static_cast<int>(c), num_classes, params));
  return out;
}

OperatingPoint make_operating_point(double threshold, std::span<const ClassCounts> counts,
                                    std::span<const int> gt_count, double dataset_hours,
                                    const PsdsParams& params) {
  if (counts.size() != gt_count.size()) throw std::invalid_argument("count/class size mismatch");
  if (!(dataset_hours > 0.0)) throw std::invalid_argument("dataset duration must be positive");
  const std::size_t n = counts.size();
  OperatingPoint op;
  op.threshold = threshold;
  op.gt_count.assign(gt_count.begin(), gt_count.end());
  op.tp_ratio.resize(n);
  op.efpr.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    op.tp_ratio[c] = gt_count[c] > 0 ? static_cast<double>(counts[c].tp) / gt_count[c] : 0.0;
    double cross_term = 0.0;
    if (n > 1) {
      double sum = 0.0;
      for (std::size_t k = 0; k < counts[c].cross.size(); ++k)
        if (k != c) sum += counts[c].cross[k];
      cross_term = params.alpha_ct * sum / static_cast<double>(n - 1);
    }
    op.efpr[c] = (counts[c].fp + cross_term) / dataset_hours;
  }
  return op;
}

OperatingPoint operating_point(const Dataset& dataset, const ScoreBundle& scores,
                               double threshold, const PsdsParams& params) {
  params.validate();
  const std::size_t n = dataset.num_classes();
  if (scores.num_classes() != n) throw std::invalid_argument("score bundle class count differs from dataset");
  for (const auto& [clip, grid] : scores.grids)
    if (!dataset.durations.count(clip)) throw std::invalid_argument("scores for unknown clip '" + clip + "'");

  std::vector<ClassCounts> total(n);
  for (auto& t : total) t.cross.assign(n, 0);
  const std::vector<double> thresholds(n, threshold);
  for (const auto& [clip, duration] : dataset.durations) {
    auto git = dataset.ground_truth.find(clip);
    const EventSet gt = git != dataset.ground_truth.end() ? git->second : EventSet{clip, duration, {}};
    auto sit = scores.grids.find(clip);
    if (sit == scores.grids.end()) {
      // Missing scores behave like an all-zero grid.
      for (std::size_t c = 0; c < n; ++c) total[c] += match_class(gt, {clip, duration, {}}, static_cast<int>(c), n, params);
      continue;
    }
    const EventSet det = de_overlap(binarize_to_events(sit->second, thresholds));
    const auto counts = match_clip(gt, det, n, params);
    for (std::size_t c = 0; c < n; ++c) total[c] += counts[c];
  }
  const auto gt_count = dataset.gt_counts();
  return make_operating_point(threshold, total, gt_count, dataset.total_hours(), params);
}

double RocCurve::tp_ratio_at(std::size_t c, double e) const {
  const auto& s = steps.at(c);
  auto it = std::upper_bound(s.begin(), s.end(), e,
                             [](double value, const RocStep& step) { return value < step.efpr; });
  return it == s.begin() ? 0.0 : std::prev(it)->tp_ratio;
}

RocCurve build_roc(std::span<const OperatingPoint> points) {
  if (points.empty()) throw std::invalid_argument("cannot build a ROC curve from zero operating points");
  const std::size_t n = points.front().tp_ratio.size();
  RocCurve roc;
  roc.steps.resize(n);
  roc.active.resize(n);
  for (const auto& p : points)
    if (p.tp_ratio.size() != n || p.efpr.size() != n || p.gt_count != points.front().gt_count)
      throw std::invalid_argument("operating points disagree on classes");
  for (std::size_t c = 0; c < n; ++c) {
    roc.active[c] = points.front().gt_count.empty() || points.front().gt_count[c] > 0;
    std::vector<RocStep> raw;
    raw.reserve(points.size());
    for (const auto& p : points) raw.push_back({p.efpr[c], p.tp_ratio[c]});
    std::sort(raw.begin(), raw.end(), [](const RocStep& a, const RocStep& b) {
      return a.efpr != b.efpr ? a.efpr < b.efpr : a.tp_ratio > b.tp_ratio;
    });
    double best = 0.0;
    for (const auto& s : raw) {
      if (s.tp_ratio <= best) continue;
      best = s.tp_ratio;
      if (!roc.steps[c].empty() && roc.steps[c].back().efpr == s.efpr)
        roc.steps[c].back().tp_ratio = best;
      else
        roc.steps[c].push_back({s.efpr, best});
    }
  }
  return roc;
}

double psds_overall(const RocCurve& roc, const PsdsParams& params) {
  params.validate();
  std::vector<std::size_t> classes;
  for (std::size_t c = 0; c < roc.num_classes(); ++c)
    if (roc.active[c]) classes.push_back(c);
  if (classes.empty()) return 0.0;
  const auto breakpoints = breakpoints_for(roc, classes, params.e_max);
  const double count = static_cast<double>(classes.size());
  return integrate(breakpoints, params.e_max, [&](double e) {
    double mean = 0.0;
    for (auto c : classes) mean += roc.tp_ratio_at(c, e);
    mean /= count;
    double var = 0.0;
    for (auto c : classes) {
      const double d = roc.tp_ratio_at(c, e) - mean;
      var += d * d;
    }
    return mean - params.alpha_st * std::sqrt(var / count);
  });
}

double psds_class(const RocCurve& roc, std::size_t c, const PsdsParams& params) {
  params.validate();
  if (c >= roc.num_classes()) throw std::invalid_argument("class index out of range");
  if (!roc.active[c]) return 0.0;
  const std::size_t cls[] = {c};
  const auto breakpoints = breakpoints_for(roc, cls, params.e_max);
  return integrate(breakpoints, params.e_max, [&](double e) {
    // Class-dependent indicators: the class mean is the class's own TP
    // ratio, so its deviation from that mean vanishes identically.
    const double mu = roc.tp_ratio_at(c, e);
    const double sigma = roc.tp_ratio_at(c, e) - mu;
    return mu - params.alpha_st * sigma;
  });
}

PsdsEvaluator::PsdsEvaluator(const Dataset& dataset, std::vector<double> thresholds,
                             PsdsParams params, int jobs)
    : dataset_(dataset),
      thresholds_(std::move(thresholds)),
      params_(params),
      jobs_(jobs),
      gt_count_(dataset.gt_counts()),
      hours_(dataset.total_hours()) {
  params_.validate();
  if (thresholds_.empty()) throw std::invalid_argument("at least one threshold is required");
  for (double t : thresholds_)
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("thresholds must lie in (0,1)");
  std::sort(thresholds_.begin(), thresholds_.end());
}

std::vector<ClassCounts> PsdsEvaluator::class_counts(const ScoreBundle& scores, std::size_t c) const {
  const std::size_t n = dataset_.num_classes();
  std::vector<ClassCounts> out(thresholds_.size());
  parallel_for(thresholds_.size(), jobs_, [&](std::size_t k) {
    ClassCounts total;
    total.cross.assign(n, 0);
    for (const auto& [clip, duration] : dataset_.durations) {
      auto git = dataset_.ground_truth.find(clip);
      const EventSet empty{clip, duration, {}};
      const EventSet& gt = git != dataset_.ground_truth.end() ? git->second : empty;
      auto sit = scores.grids.find(clip);
      if (sit == scores.grids.end()) continue;  // no detections, nothing to count
      const EventSet det = de_overlap(binarize_class(sit->second, c, thresholds_[k]));
      total += match_class(gt, det, static_cast<int>(c), n, params_);
    }
    out[k] = std::move(total);
  });
  return out;
}

PsdsResult PsdsEvaluator::finish(const Table& table) const {
  const std::size_t n = dataset_.num_classes();
  PsdsResult result;
  result.points.reserve(thresholds_.size());
  std::vector<ClassCounts> row(n);
  for (std::size_t k = 0; k < thresholds_.size(); ++k) {
    for (std::size_t c = 0; c < n; ++c) row[c] = table[c][k];
    result.points.push_back(make_operating_point(thresholds_[k], row, gt_count_, hours_, params_));
  }
  result.roc = build_roc(result.points);
  result.overall = psds_overall(result.roc, params_);
  result.per_class.resize(n);
  for (std::size_t c = 0; c < n; ++c) result.per_class[c] = psds_class(result.roc, c, params_);
  return result;
}

PsdsResult PsdsEvaluator::evaluate(const ScoreBundle& scores) {
  if (scores.num_classes() != dataset_.num_classes())
    throw std::invalid_argument("score bundle class count differs from dataset");
  for (const auto& [clip, grid] : scores.grids)
    if (!dataset_.durations.count(clip)) throw std::invalid_argument("scores for unknown clip '" + clip + "'");
  cache_.assign(dataset_.num_classes(), {});
  for (std::size_t c = 0; c < dataset_.num_classes(); ++c) cache_[c] = class_counts(scores, c);
  return finish(cache_);
}

PsdsResult PsdsEvaluator::reevaluate_class(const ScoreBundle& scores, std::size_t c) {
  if (cache_.size() != dataset_.num_classes()) throw std::logic_error("reevaluate_class before evaluate");
  cache_.at(c) = class_counts(scores, c);
  return finish(cache_);
}

PsdsResult PsdsEvaluator::probe_class(const ScoreBundle& scores, std::size_t c) const {
  if (cache_.size() != dataset_.num_classes()) throw std::logic_error("probe_class before evaluate");
  Table table = cache_;
  table.at(c) = class_counts(scores, c);
  return finish(table);
}

}  // namespace sedkit
