// sedkit/fusion.cpp

#include "sedkit/fusion.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sedkit/dataio.h"
#include "sedkit/errors.h"

namespace sedkit {

void FusionWeights::validate() const {
  if (weights.empty()) throw std::invalid_argument("fusion needs at least one model");
  const std::size_t n_classes = weights.front().size();
  for (const auto& row : weights)
    if (row.size() != n_classes) throw std::invalid_argument("ragged fusion weight matrix");
  for (std::size_t c = 0; c < n_classes; ++c) {
    double sum = 0.0;
    for (const auto& row : weights) {
      if (!(row[c] >= 0.0)) throw std::invalid_argument("fusion weights must be non-negative");
      sum += row[c];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("fusion weights of class " + std::to_string(c) + " sum to " +
                                  format_shortest(sum));
  }
}

FusionWeights compute_weights(const std::vector<std::vector<double>>& psds,
                              std::vector<std::string> model_ids,
                              std::vector<std::string> class_names) {
  if (psds.empty()) throw std::invalid_argument("fusion needs at least one model");
  const std::size_t n = psds.size();
  const std::size_t n_classes = psds.front().size();
  FusionWeights w;
  w.weights.assign(n, std::vector<double>(n_classes, 0.0));
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<double> column;
    for (const auto& row : psds) {
      if (row.size() != n_classes) throw std::invalid_argument("ragged PSDS matrix");
      if (!(row[c] >= 0.0)) throw std::invalid_argument("PSDS values must be non-negative");
      column.push_back(row[c]);
    }
    // Sorted so that the normalizer does not depend on model order.
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    if (sum > 0.0) {
      for (std::size_t i = 0; i < n; ++i) w.weights[i][c] = psds[i][c] / sum;
    } else {
      for (std::size_t i = 0; i < n; ++i) w.weights[i][c] = 1.0 / static_cast<double>(n);
      w.uniform_fallback.push_back(c);
    }
  }
  if (model_ids.empty())
    for (std::size_t i = 0; i < n; ++i) model_ids.push_back("model" + std::to_string(i));
  if (class_names.empty())
    for (std::size_t c = 0; c < n_classes; ++c) class_names.push_back("class" + std::to_string(c));
  if (model_ids.size() != n || class_names.size() != n_classes)
    throw std::invalid_argument("model or class names do not match the PSDS matrix");
  w.model_ids = std::move(model_ids);
  w.class_names = std::move(class_names);
  return w;
}

ScoreBundle fuse(std::span<const ScoreBundle> bundles, const FusionWeights& weights, std::string model_id) {
  weights.validate();
  if (bundles.size() != weights.num_models())
    throw std::invalid_argument("got " + std::to_string(bundles.size()) + " score sets for " +
                                std::to_string(weights.num_models()) + " weight rows");
  const ScoreBundle& first = bundles.front();
  if (first.num_classes() != weights.num_classes())
    throw std::invalid_argument("weight matrix class count differs from scores");
  for (const auto& b : bundles) {
    b.validate();
    if (b.hop_s != first.hop_s) throw std::invalid_argument("model '" + b.model_id + "' uses a different hop");
    if (b.class_names != first.class_names)
      throw std::invalid_argument("model '" + b.model_id + "' uses a different class order");
    if (b.grids.size() != first.grids.size())
      throw std::invalid_argument("model '" + b.model_id + "' covers a different clip set");
    for (const auto& [clip, grid] : first.grids)
      if (!b.grids.count(clip))
        throw std::invalid_argument("clip '" + clip + "' missing from model '" + b.model_id + "'");
  }

  ScoreBundle out;
  out.model_id = std::move(model_id);
  out.hop_s = first.hop_s;
  out.class_names = first.class_names;
  std::vector<double> terms(bundles.size());
  for (const auto& [clip, ref] : first.grids) {
    std::size_t frames = ref.num_frames();
    std::size_t longest = frames;
    for (const auto& b : bundles) {
      frames = std::min(frames, b.grids.at(clip).num_frames());
      longest = std::max(longest, b.grids.at(clip).num_frames());
    }
    if (longest - frames > 1)
      throw std::invalid_argument("clip '" + clip + "': frame dimension differs by " +
                                  std::to_string(longest - frames) + " across models");

    FrameGrid fused(clip, ref.hop_s(), ref.duration_s(), ref.num_classes(), frames);
    for (std::size_t c = 0; c < ref.num_classes(); ++c) {
      for (std::size_t t = 0; t < frames; ++t) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t i = 0; i < bundles.size(); ++i) {
          const double p = bundles[i].grids.at(clip).at(c, t);
          terms[i] = weights.weights[i][c] * p;
          lo = std::min(lo, p);
          hi = std::max(hi, p);
        }
        // Canonical summation order makes the result independent of model order.
        std::sort(terms.begin(), terms.end());
        double sum = 0.0;
        for (double term : terms) sum += term;
        fused.at(c, t) = std::clamp(sum, lo, hi);
      }
    }
    out.grids.emplace(clip, std::move(fused));
  }
  return out;
}

std::string write_weights_csv(const FusionWeights& weights) {
  weights.validate();
  std::string out = "model,class,weight\n";
  for (std::size_t i = 0; i < weights.num_models(); ++i)
    for (std::size_t c = 0; c < weights.num_classes(); ++c)
      out += weights.model_ids.at(i) + ',' + weights.class_names.at(c) + ',' +
             format_shortest(weights.weights[i][c]) + '\n';
  return out;
}

FusionWeights parse_weights_csv(std::string_view text, const std::vector<std::string>& model_ids,
                                const std::vector<std::string>& class_names, const std::string& source) {
  const auto rows = split_fields(text, '\n');
  std::size_t line = 0;
  bool header_seen = false;
  std::map<std::pair<std::size_t, std::size_t>, double> seen;
  for (const auto& raw : rows) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(raw, ',');
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "model" || fields[1] != "class" || fields[2] != "weight")
        throw ParseError(source, line, "expected header 'model,class,weight'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(source, line, "expected 3 fields");
    auto mit = std::find(model_ids.begin(), model_ids.end(), fields[0]);
    if (mit == model_ids.end()) throw ParseError(source, line, "unknown model '" + fields[0] + "'");
    auto cit = std::find(class_names.begin(), class_names.end(), fields[1]);
    if (cit == class_names.end()) throw ParseError(source, line, "unknown class name '" + fields[1] + "'");
    const double w = parse_number(fields[2], source, line, "weight");
    const auto key = std::make_pair(static_cast<std::size_t>(mit - model_ids.begin()),
                                    static_cast<std::size_t>(cit - class_names.begin()));
    if (!seen.emplace(key, w).second) throw ParseError(source, line, "duplicate weight entry");
  }
  if (!header_seen) throw ParseError(source, 1, "expected header 'model,class,weight'");
  if (seen.size() != model_ids.size() * class_names.size())
    throw ParseError(source, 0, "weights must cover every model and class");

  FusionWeights w;
  w.model_ids = model_ids;
  w.class_names = class_names;
  w.weights.assign(model_ids.size(), std::vector<double>(class_names.size(), 0.0));
  for (const auto& [key, value] : seen) w.weights[key.first][key.second] = value;
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
  return w;
}

}  // namespace sedkit
