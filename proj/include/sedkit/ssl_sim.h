// sedkit/ssl_sim.h
//
// Desk-scale teacher/student semi-supervised training loop. A per-frame
// linear + sigmoid classifier stands in for the event detector so that every
// gradient is written out by hand; the training control flow (burn-in, then
// EMA teacher, hard pseudo labels, weak/strong augmentation, mixup and focal
// loss) is the part being exercised.

#ifndef SEDKIT_SSL_SIM_H_
#define SEDKIT_SSL_SIM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sedkit/events.h"

namespace sedkit::ssl {

using Rng = std::mt19937_64;

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool empty() const { return data.empty(); }
  bool operator==(const Matrix&) const = default;
};

/// One synthetic clip. `features` is [T x F]; `frame_labels` is [T x C] for
/// strongly labeled clips and empty otherwise; `clip_tags` has C entries for
/// labeled and weakly labeled clips.
struct SynthClip {
  Matrix features;
  Matrix frame_labels;
  std::vector<double> clip_tags;
  std::vector<Event> events;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t n_labeled = 8;
  std::size_t n_weak = 16;
  std::size_t n_unlabeled = 192;
  std::size_t n_test = 64;
  std::size_t frames = 64;
  std::size_t bins = 32;
  std::size_t classes = 4;
  double event_probability = 0.5;  // chance that a class occurs in a clip
  double event_gain = 1.0;         // band energy of an active event
  double noise_std = 1.0;          // background noise
};

struct SynthSplits {
  std::vector<SynthClip> labeled;
  std::vector<SynthClip> weak;
  std::vector<SynthClip> unlabeled;
  std::vector<SynthClip> test;
};

/// Class c owns a contiguous band of bins; while an event of class c is
/// active the band carries extra energy. Each clip draws from its own seeded
/// stream, so the result depends only on the spec.
SynthSplits generate_dataset(const SynthSpec& spec);

struct AugmentSpec {
  int freq_mask_width = 3;
  int freq_shift_max = 1;
  int time_mask_width = 8;
  double gauss_noise_std = 0.5;
};

/// Circular shift of every frame's bins by k (positive k moves energy up).
Matrix freq_shift(const Matrix& x, int k);

/// Frequency mask (a random band of up to freq_mask_width bins zeroed) and a
/// circular frequency shift drawn uniformly from [-max, max].
Matrix augment_weak(const Matrix& x, const AugmentSpec& spec, Rng& rng);

/// Weak augmentation, then a zeroed random time span of up to
/// time_mask_width frames, then i.i.d. Gaussian noise.
Matrix augment_strong(const Matrix& x, const AugmentSpec& spec, Rng& rng);

/// Inputs paired with soft frame targets, both per clip.
struct Batch {
  std::vector<Matrix> inputs;
  std::vector<Matrix> targets;
  std::size_t size() const { return inputs.size(); }
};

/// Pairs the larger batch, in order, with random draws (with replacement)
/// from the smaller one and mixes each pair with lambda ~ Beta(beta, beta).
/// If either batch is empty the other is returned unchanged. `forced_lambda`
/// replaces the random draw.
Batch mixup(const Batch& a, const Batch& b, double beta, Rng& rng,
            std::optional<double> forced_lambda = std::nullopt);

/// Mixes one pair with the given lambda; throws on shape mismatch.
void mix_pair(const Matrix& xa, const Matrix& ya, const Matrix& xb, const Matrix& yb, double lambda,
              Matrix& x_out, Matrix& y_out);

double sample_beta(double a, double b, Rng& rng);

struct ToyModel {
  Matrix weight;             // [C x F]
  std::vector<double> bias;  // [C]

  static ToyModel zeros(std::size_t classes, std::size_t bins);
  std::size_t num_params() const { return weight.data.size() + bias.size(); }
  /// Flat parameter view order: weight row-major, then bias.
  double& param(std::size_t k);
  double param(std::size_t k) const;
  bool operator==(const ToyModel&) const = default;
};

/// sigmoid(x W^T + b), [T x C].
Matrix forward(const ToyModel& model, const Matrix& x);

/// Hard labels: 1 where the teacher's probability is >= threshold.
Matrix pseudo_label(const ToyModel& teacher, const Matrix& x_weak, double threshold);

/// theta' <- gamma * theta' + (1 - gamma) * theta, elementwise.
ToyModel ema_update(const ToyModel& teacher, const ToyModel& student, double gamma);

struct FocalParams {
  double gamma = 2.0;
  double alpha = 0.5;
};

/// Focal parameters equal to half the binary cross-entropy.
inline constexpr FocalParams kHalfBce{0.0, 0.5};

/// Gradient with the same layout as ToyModel.
using Gradient = ToyModel;

/// A clip as seen by the supervised objective: frame targets for strongly
/// labeled clips, otherwise clip tags trained through frame-max pooling.
struct SupervisedItem {
  const Matrix* input = nullptr;
  const Matrix* frame_targets = nullptr;
  const std::vector<double>* clip_tags = nullptr;
};

/// Mean focal loss over the [T x C] frame grid of one clip. Adds
/// scale * d loss / d params to *grad when grad is non-null.
double frame_loss(const ToyModel& model, const Matrix& x, const Matrix& targets, const FocalParams& focal,
                  Gradient* grad, double scale);

/// Tagging (binary cross-entropy) loss of frame-max pooled probabilities.
double tag_loss(const ToyModel& model, const Matrix& x, std::span<const double> tags, Gradient* grad,
                double scale);

/// (1/|B|) sum of per-clip losses over a labeled batch.
double supervised_objective(const ToyModel& model, std::span<const SupervisedItem> batch,
                            const FocalParams& focal, Gradient* grad);

/// (1/|B|) sum of frame focal losses over a mixed batch.
double mixed_objective(const ToyModel& model, const Batch& batch, const FocalParams& focal, Gradient* grad);

struct SslConfig {
  double lr = 0.5;
  double ema_gamma = 0.99;
  int burn_in_epochs = 200;
  int epochs = 50;
  double mixup_beta = 0.5;
  double focal_gamma = 2.0;
  double focal_alpha = 0.5;
  double pseudo_threshold = 0.5;
  std::uint64_t seed = 0;
  std::size_t batch_labeled = 32;
  std::size_t batch_unlabeled = 32;
  bool use_mixup = true;
  bool use_focal = true;
  bool use_asym_aug = true;
  bool use_ema = true;
  std::optional<double> forced_mixup_lambda;

  FocalParams focal() const { return use_focal ? FocalParams{focal_gamma, focal_alpha} : kHalfBce; }
  void validate() const;
};

struct EpochStats {
  std::string stage;
  int epoch = 0;
  double sup_loss = 0.0;
  double unsup_loss = 0.0;
  double student_f1 = 0.0;
  double teacher_f1 = 0.0;
};

/// Called after every parameter update with the current student and teacher.
using StepHook = std::function<void(const ToyModel& student, const ToyModel& teacher)>;

/// Supervised training on the labeled and weakly labeled splits with the
/// half-BCE frame loss. Starts from zero parameters.
ToyModel burn_in(const SynthSplits& data, const SslConfig& cfg, std::vector<EpochStats>* log = nullptr);

struct TeacherGuidedResult {
  ToyModel student;
  ToyModel teacher;
};

/// Teacher-guided stage. Each step: supervised loss on the weakly augmented
/// labeled batch; hard pseudo labels from the teacher on weakly augmented
/// unlabeled clips; mixup of strongly labeled and pseudo-labeled clips;
/// focal loss of the student on the strongly augmented mix; one gradient
/// step on the sum; EMA update of the teacher.
TeacherGuidedResult teacher_guided(const ToyModel& init, const SynthSplits& data, const SslConfig& cfg,
                                   const AugmentSpec& aug, std::vector<EpochStats>* log = nullptr,
                                   const StepHook& hook = {});

/// Micro-averaged frame F1 at probability threshold 0.5 over strongly
/// labeled clips.
double frame_f1(const ToyModel& model, std::span<const SynthClip> clips);

struct SimulationReport {
  double burn_in_f1 = 0.0;
  double student_f1 = 0.0;
  double teacher_f1 = 0.0;
  std::vector<EpochStats> epochs;
  TeacherGuidedResult models;
};

/// Generates the benchmark for cfg.seed, runs both stages and scores them on
/// the held-out split.
SimulationReport run_simulation(const SynthSpec& spec, const SslConfig& cfg, const AugmentSpec& aug);

/// CSV report: per-epoch rows plus a final summary row.
std::string write_report_csv(const SimulationReport& report);

}  // namespace sedkit::ssl

#endif  // SEDKIT_SSL_SIM_H_
