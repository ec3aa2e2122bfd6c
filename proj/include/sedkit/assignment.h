// sedkit/assignment.h
//
// Bipartite matching of ground-truth events to event predictions and the
// set-prediction losses evaluated on a given matching.

#ifndef SEDKIT_ASSIGNMENT_H_
#define SEDKIT_ASSIGNMENT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "sedkit/events.h"

namespace sedkit {

/// Floor applied to every probability before it enters a logarithm.
inline constexpr double kLogEpsilon = 1e-7;

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct MatchResult {
  std::vector<std::size_t> assignment;  // ground truth i -> prediction assignment[i]
  double total_cost = 0.0;
};

/// Minimum-cost injective assignment of every row to a distinct column
/// (shortest augmenting path with potentials, O(n^2 m)). Requires rows <= cols
/// and finite costs; throws std::invalid_argument otherwise.
MatchResult hungarian_assign(const CostMatrix& cost);

/// An event prediction: boundary box and a distribution over C classes plus
/// a trailing "no event" entry.
struct Prediction {
  NormalizedBox box;
  std::vector<double> class_probs;

  std::size_t num_classes() const { return class_probs.empty() ? 0 : class_probs.size() - 1; }
};

/// Throws std::invalid_argument unless probabilities are non-negative and sum
/// to 1 within 1e-6.
void validate_prediction(const Prediction& p);

/// A ground-truth event in box form.
struct BoxTarget {
  int class_id = 0;
  NormalizedBox box;
};

struct LossWeights {
  double lambda_iou = 2.0;
  double lambda_l1 = 5.0;
  double cost_class_weight = 1.0;
  double no_object_weight = 0.1;

  bool operator==(const LossWeights&) const = default;
};

double box_l1(NormalizedBox a, NormalizedBox b);
double box_iou(NormalizedBox a, NormalizedBox b);

/// cost(i,j) = -w_cls * p_j(c_i) + lambda_l1 * |b_i - b_j|_1 + lambda_iou * (1 - IoU).
CostMatrix matching_cost(std::span<const BoxTarget> gt, std::span<const Prediction> preds,
                         const LossWeights& w);

/// Summed (not averaged) IoU + L1 loss over matched pairs.
double localization_loss(std::span<const BoxTarget> gt, std::span<const Prediction> preds,
                         const MatchResult& match, const LossWeights& w);

/// Mean negative log-probability of the matched ground-truth class.
double classification_loss(std::span<const BoxTarget> gt, std::span<const Prediction> preds,
                           const MatchResult& match);

/// Mean cross-entropy of unmatched predictions against the "no event" class,
/// scaled by w.no_object_weight. Diagnostic only.
double no_object_loss(std::span<const Prediction> preds, const MatchResult& match,
                      const LossWeights& w);

/// Mean binary cross-entropy over classes between clip labels and predicted
/// tag probabilities.
double tagging_loss(std::span<const double> labels, std::span<const double> predicted);

/// Binary focal loss -alpha_t * (1 - p_t)^gamma * log(p_t). `target` may be
/// soft, in which case the loss is target * FL(p, 1) + (1 - target) * FL(p, 0).
double focal_loss(double p, double target, double gamma, double alpha);

/// d focal_loss / d p, evaluated at the clamped probability.
double focal_loss_grad(double p, double target, double gamma, double alpha);

/// Binary cross-entropy with the same clamping as focal_loss.
double binary_cross_entropy(double p, double target);

}  // namespace sedkit

#endif  // SEDKIT_ASSIGNMENT_H_
