// sedkit/assignment.cpp

#include "sedkit/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sedkit {

namespace {

double clamp_prob(double p) { return std::clamp(p, kLogEpsilon, 1.0 - kLogEpsilon); }

void check_match(std::size_t num_gt, std::size_t num_preds, const MatchResult& match) {
  if (match.assignment.size() != num_gt)
    throw std::invalid_argument("matching does not cover every ground-truth event");
  for (auto j : match.assignment)
    if (j >= num_preds) throw std::invalid_argument("matching refers to a missing prediction");
}

double focal_positive(double p, double gamma, double alpha) {
  return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
}

double focal_negative(double p, double gamma, double alpha) {
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
}

}  // namespace

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged cost matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

MatchResult hungarian_assign(const CostMatrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n > m)
    throw std::invalid_argument("more ground-truth events than predictions (" +
                                std::to_string(n) + " > " + std::to_string(m) + ")");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (!std::isfinite(cost(i, j))) throw std::invalid_argument("cost matrix has non-finite entries");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::vector<double> min_slack(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  MatchResult result;
  result.assignment.assign(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (row_of[j] != 0) result.assignment[row_of[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) result.total_cost += cost(i, result.assignment[i]);
  return result;
}

void validate_prediction(const Prediction& p) {
  if (p.class_probs.size() < 2)
    throw std::invalid_argument("prediction needs at least one class and a no-event entry");
  double sum = 0.0;
  for (double q : p.class_probs) {
    if (!(q >= 0.0)) throw std::invalid_argument("prediction probabilities must be non-negative");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw std::invalid_argument("prediction probabilities must sum to 1");
  checked_box(p.box);
}

double box_l1(NormalizedBox a, NormalizedBox b) {
  return std::abs(a.center - b.center) + std::abs(a.length - b.length);
}

double box_iou(NormalizedBox a, NormalizedBox b) {
  return segment_iou({a.center - a.length / 2.0, a.center + a.length / 2.0},
                     {b.center - b.length / 2.0, b.center + b.length / 2.0});
}

CostMatrix matching_cost(std::span<const BoxTarget> gt, std::span<const Prediction> preds,
                         const LossWeights& w) {
  CostMatrix cost(gt.size(), preds.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto c = static_cast<std::size_t>(gt[i].class_id);
    for (std::size_t j = 0; j < preds.size(); ++j) {
      if (c >= preds[j].num_classes()) throw std::invalid_argument("ground-truth class outside prediction classes");
      cost(i, j) = -w.cost_class_weight * preds[j].class_probs[c] +
                   w.lambda_l1 * box_l1(gt[i].box, preds[j].box) +
                   w.lambda_iou * (1.0 - box_iou(gt[i].box, preds[j].box));
    }
  }
  return cost;
}

double localization_loss(std::span<const BoxTarget> gt, std::span<const Prediction> preds,
                         const MatchResult& match, const LossWeights& w) {
  check_match(gt.size(), preds.size(), match);
  double total = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto& b = preds[match.assignment[i]].box;
    total += w.lambda_iou * (1.0 - box_iou(gt[i].box, b)) + w.lambda_l1 * box_l1(gt[i].box, b);
  }
  return total;
}

double classification_loss(std::span<const BoxTarget> gt, std::span<const Prediction> preds,
                           const MatchResult& match) {
  check_match(gt.size(), preds.size(), match);
  if (gt.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto& probs = preds[match.assignment[i]].class_probs;
    const auto c = static_cast<std::size_t>(gt[i].class_id);
    if (c + 1 >= probs.size()) throw std::invalid_argument("ground-truth class outside prediction classes");
    total += -std::log(std::max(probs[c], kLogEpsilon));
  }
  return total / static_cast<double>(gt.size());
}

double no_object_loss(std::span<const Prediction> preds, const MatchResult& match,
                      const LossWeights& w) {
  std::vector<bool> matched(preds.size(), false);
  for (auto j : match.assignment) {
    if (j >= preds.size()) throw std::invalid_argument("matching refers to a missing prediction");
    matched[j] = true;
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < preds.size(); ++j) {
    if (matched[j]) continue;
    total += -std::log(std::max(preds[j].class_probs.back(), kLogEpsilon));
    ++count;
  }
  return count ? w.no_object_weight * total / static_cast<double>(count) : 0.0;
}

double binary_cross_entropy(double p, double target) {
  p = clamp_prob(p);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

double tagging_loss(std::span<const double> labels, std::span<const double> predicted) {
  if (labels.size() != predicted.size())
    throw std::invalid_argument("tag label and prediction sizes differ");
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) total += binary_cross_entropy(predicted[c], labels[c]);
  return total / static_cast<double>(labels.size());
}

double focal_loss(double p, double target, double gamma, double alpha) {
  p = clamp_prob(p);
  double loss = 0.0;
  if (target != 0.0) loss += target * focal_positive(p, gamma, alpha);
  if (target != 1.0) loss += (1.0 - target) * focal_negative(p, gamma, alpha);
  return loss;
}

double focal_loss_grad(double p, double target, double gamma, double alpha) {
  p = clamp_prob(p);
  double grad = 0.0;
  if (target != 0.0) {
    double d = std::pow(1.0 - p, gamma) / p;
    if (gamma != 0.0) d -= gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p);
    grad += target * -alpha * d;
  }
  if (target != 1.0) {
    double d = -std::pow(p, gamma) / (1.0 - p);
    if (gamma != 0.0) d += gamma * std::pow(p, gamma - 1.0) * std::log(1.0 - p);
    grad += (1.0 - target) * -(1.0 - alpha) * d;
  }
  return grad;
}

}  // namespace sedkit
