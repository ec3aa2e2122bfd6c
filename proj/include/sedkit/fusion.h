// sedkit/fusion.h
//
// Class-wise PSDS-weighted fusion of frame probabilities from several models.

#ifndef SEDKIT_FUSION_H_
#define SEDKIT_FUSION_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sedkit/dataset.h"

namespace sedkit {

struct FusionWeights {
  std::vector<std::string> model_ids;
  std::vector<std::string> class_names;
  std::vector<std::vector<double>> weights;  // [model][class]
  /// Classes whose PSDS column was all zero and fell back to uniform weights.
  std::vector<std::size_t> uniform_fallback;

  std::size_t num_models() const { return weights.size(); }
  std::size_t num_classes() const { return weights.empty() ? 0 : weights.front().size(); }
  /// Throws std::invalid_argument unless entries are >= 0 and every class
  /// column sums to 1 within 1e-9.
  void validate() const;
};

/// w[i][c] = psds[i][c] / sum_i psds[i][c]; an all-zero column gets 1/N.
FusionWeights compute_weights(const std::vector<std::vector<double>>& psds,
                              std::vector<std::string> model_ids = {},
                              std::vector<std::string> class_names = {});

/// Per clip, class and frame: sum_i w[i][c] * p_i[c][t]. Bundles must share
/// clips, hop and class order; frame counts may differ by one, in which case
/// the longer grids are truncated.
ScoreBundle fuse(std::span<const ScoreBundle> bundles, const FusionWeights& weights,
                 std::string model_id = "fused");

/// `model,class,weight` rows in model-major order.
std::string write_weights_csv(const FusionWeights& weights);

/// Reads a weights CSV and arranges it for the given models and classes.
/// Every (model, class) pair must appear exactly once.
FusionWeights parse_weights_csv(std::string_view text, const std::vector<std::string>& model_ids,
                                const std::vector<std::string>& class_names,
                                const std::string& source = "weights");

}  // namespace sedkit

#endif  // SEDKIT_FUSION_H_
