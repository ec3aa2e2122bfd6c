// sedkit/ssl_sim.cpp

#include "sedkit/ssl_sim.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sedkit/assignment.h"
#include "sedkit/dataio.h"

namespace sedkit::ssl {

namespace {

constexpr double kHopSeconds = 0.1;

Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  for (auto k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

SynthClip make_clip(const SynthSpec& spec, std::uint64_t split, std::uint64_t index, bool strong, bool tagged) {
  Rng rng = make_rng({spec.seed, split, index});
  const std::size_t T = spec.frames, F = spec.bins, C = spec.classes;
  const double duration = static_cast<double>(T) * kHopSeconds;

  EventSet events{"synthetic", duration, {}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < C; ++c) {
    if (unit(rng) >= spec.event_probability) continue;
    const double length = duration * (0.15 + 0.35 * unit(rng));
    const double onset = (duration - length) * unit(rng);
    events.events.push_back({static_cast<int>(c), onset, onset + length, 1.0});
  }
  const FrameGrid active = rasterize(events, kHopSeconds, C);

  SynthClip clip;
  clip.events = events.events;
  clip.features = Matrix(T, F);
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  const std::size_t band = F / C;
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t f = 0; f < F; ++f) {
      double v = noise(rng);
      const std::size_t c = f / band;
      if (c < C && active.at(c, t) > 0.0) v += spec.event_gain;
      clip.features(t, f) = v;
    }
  if (strong) {
    clip.frame_labels = Matrix(T, C);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t c = 0; c < C; ++c) clip.frame_labels(t, c) = active.at(c, t);
  }
  if (tagged) {
    clip.clip_tags.assign(C, 0.0);
    for (const auto& e : events.events) clip.clip_tags[static_cast<std::size_t>(e.class_id)] = 1.0;
  }
  return clip;
}

void add_scaled(ToyModel& into, const ToyModel& g, double scale) {
  for (std::size_t k = 0; k < into.weight.data.size(); ++k) into.weight.data[k] += scale * g.weight.data[k];
  for (std::size_t c = 0; c < into.bias.size(); ++c) into.bias[c] += scale * g.bias[c];
}

void check_input(const ToyModel& model, const Matrix& x) {
  if (x.cols != model.weight.cols) throw std::invalid_argument("feature width does not match the model");
}

// Accumulates dLoss/dlogit (one entry per frame and class) into a gradient.
void backprop_logits(const Matrix& x, const Matrix& dlogit, Gradient& grad, double scale) {
  for (std::size_t t = 0; t < x.rows; ++t)
    for (std::size_t c = 0; c < dlogit.cols; ++c) {
      const double d = scale * dlogit(t, c);
      if (d == 0.0) continue;
      grad.bias[c] += d;
      for (std::size_t f = 0; f < x.cols; ++f) grad.weight(c, f) += d * x(t, f);
    }
}

std::vector<SupervisedItem> supervised_items(const std::vector<SynthClip>& labeled,
                                             const std::vector<SynthClip>& weak) {
  std::vector<SupervisedItem> items;
  for (const auto& c : labeled) items.push_back({&c.features, &c.frame_labels, nullptr});
  for (const auto& c : weak) items.push_back({&c.features, nullptr, &c.clip_tags});
  return items;
}

}  // namespace

SynthSplits generate_dataset(const SynthSpec& spec) {
  if (spec.classes == 0 || spec.classes > spec.bins)
    throw std::invalid_argument("synthetic data needs 1 <= classes <= bins");
  if (spec.frames == 0) throw std::invalid_argument("synthetic clips need frames");
  SynthSplits s;
  for (std::size_t i = 0; i < spec.n_labeled; ++i) s.labeled.push_back(make_clip(spec, 0, i, true, true));
  for (std::size_t i = 0; i < spec.n_weak; ++i) s.weak.push_back(make_clip(spec, 1, i, false, true));
  for (std::size_t i = 0; i < spec.n_unlabeled; ++i) s.unlabeled.push_back(make_clip(spec, 2, i, false, false));
  for (std::size_t i = 0; i < spec.n_test; ++i) s.test.push_back(make_clip(spec, 3, i, true, true));
  return s;
}

Matrix freq_shift(const Matrix& x, int k) {
  Matrix out(x.rows, x.cols);
  const auto F = static_cast<long>(x.cols);
  if (F == 0) return out;
  for (std::size_t t = 0; t < x.rows; ++t)
    for (long f = 0; f < F; ++f) out(t, static_cast<std::size_t>(((f + k) % F + F) % F)) = x(t, static_cast<std::size_t>(f));
  return out;
}

Matrix augment_weak(const Matrix& x, const AugmentSpec& spec, Rng& rng) {
  if (spec.freq_mask_width < 0 || spec.freq_shift_max < 0) throw std::invalid_argument("negative augmentation width");
  if (static_cast<std::size_t>(spec.freq_mask_width) >= std::max<std::size_t>(x.cols, 1))
    throw std::invalid_argument("frequency mask must be narrower than the bin count");
  Matrix out = x;
  const int width = uniform_int(rng, 0, spec.freq_mask_width);
  const int start = uniform_int(rng, 0, static_cast<int>(x.cols) - width);
  for (std::size_t t = 0; t < x.rows; ++t)
    for (int f = start; f < start + width; ++f) out(t, static_cast<std::size_t>(f)) = 0.0;
  const int shift = uniform_int(rng, -spec.freq_shift_max, spec.freq_shift_max);
  return shift == 0 ? out : freq_shift(out, shift);
}

Matrix augment_strong(const Matrix& x, const AugmentSpec& spec, Rng& rng) {
  if (spec.time_mask_width < 0 || !(spec.gauss_noise_std >= 0.0))
    throw std::invalid_argument("negative augmentation width");
  if (static_cast<std::size_t>(spec.time_mask_width) >= std::max<std::size_t>(x.rows, 1))
    throw std::invalid_argument("time mask must be shorter than the clip");
  Matrix out = augment_weak(x, spec, rng);
  const int width = uniform_int(rng, 0, spec.time_mask_width);
  const int start = uniform_int(rng, 0, static_cast<int>(x.rows) - width);
  for (int t = start; t < start + width; ++t)
    for (std::size_t f = 0; f < x.cols; ++f) out(static_cast<std::size_t>(t), f) = 0.0;
  if (spec.gauss_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.gauss_noise_std);
    for (double& v : out.data) v += noise(rng);
  }
  return out;
}

double sample_beta(double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

void mix_pair(const Matrix& xa, const Matrix& ya, const Matrix& xb, const Matrix& yb, double lambda,
              Matrix& x_out, Matrix& y_out) {
  if (xa.rows != xb.rows || xa.cols != xb.cols || ya.rows != yb.rows || ya.cols != yb.cols)
    throw std::invalid_argument("mixup inputs differ in shape");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mixup lambda must lie in [0,1]");
  x_out = Matrix(xa.rows, xa.cols);
  y_out = Matrix(ya.rows, ya.cols);
  for (std::size_t k = 0; k < xa.data.size(); ++k) x_out.data[k] = lambda * xa.data[k] + (1.0 - lambda) * xb.data[k];
  for (std::size_t k = 0; k < ya.data.size(); ++k) y_out.data[k] = lambda * ya.data[k] + (1.0 - lambda) * yb.data[k];
}

Batch mixup(const Batch& a, const Batch& b, double beta, Rng& rng, std::optional<double> forced_lambda) {
  if (a.inputs.size() != a.targets.size() || b.inputs.size() != b.targets.size())
    throw std::invalid_argument("batch inputs and targets differ in count");
  if (b.size() == 0) return a;
  if (a.size() == 0) return b;
  const bool a_larger = a.size() >= b.size();
  const Batch& large = a_larger ? a : b;
  const Batch& small = a_larger ? b : a;
  Batch out;
  out.inputs.resize(large.size());
  out.targets.resize(large.size());
  for (std::size_t i = 0; i < large.size(); ++i) {
    const auto j = std::uniform_int_distribution<std::size_t>(0, small.size() - 1)(rng);
    const double lambda = forced_lambda ? *forced_lambda : sample_beta(beta, beta, rng);
    // lambda always weights the first argument's sample.
    if (a_larger)
      mix_pair(large.inputs[i], large.targets[i], small.inputs[j], small.targets[j], lambda, out.inputs[i], out.targets[i]);
    else
      mix_pair(small.inputs[j], small.targets[j], large.inputs[i], large.targets[i], lambda, out.inputs[i], out.targets[i]);
  }
  return out;
}

ToyModel ToyModel::zeros(std::size_t classes, std::size_t bins) {
  return {Matrix(classes, bins), std::vector<double>(classes, 0.0)};
}

double& ToyModel::param(std::size_t k) {
  return k < weight.data.size() ? weight.data[k] : bias.at(k - weight.data.size());
}

double ToyModel::param(std::size_t k) const {
  return k < weight.data.size() ? weight.data[k] : bias.at(k - weight.data.size());
}

Matrix forward(const ToyModel& model, const Matrix& x) {
  check_input(model, x);
  const std::size_t C = model.weight.rows;
  Matrix probs(x.rows, C);
  for (std::size_t t = 0; t < x.rows; ++t)
    for (std::size_t c = 0; c < C; ++c) {
      double z = model.bias[c];
      for (std::size_t f = 0; f < x.cols; ++f) z += model.weight(c, f) * x(t, f);
      probs(t, c) = sigmoid(z);
    }
  return probs;
}

Matrix pseudo_label(const ToyModel& teacher, const Matrix& x_weak, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("pseudo-label threshold must lie in (0,1)");
  Matrix labels = forward(teacher, x_weak);
  for (double& p : labels.data) p = p >= threshold ? 1.0 : 0.0;
  return labels;
}

ToyModel ema_update(const ToyModel& teacher, const ToyModel& student, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("EMA ratio must lie in [0,1)");
  if (teacher.num_params() != student.num_params()) throw std::invalid_argument("teacher and student differ in shape");
  ToyModel out = teacher;
  for (std::size_t k = 0; k < out.num_params(); ++k)
    out.param(k) = gamma * teacher.param(k) + (1.0 - gamma) * student.param(k);
  return out;
}

double frame_loss(const ToyModel& model, const Matrix& x, const Matrix& targets, const FocalParams& focal,
                  Gradient* grad, double scale) {
  const Matrix probs = forward(model, x);
  if (targets.rows != probs.rows || targets.cols != probs.cols)
    throw std::invalid_argument("frame targets do not match the model output");
  const double norm = 1.0 / static_cast<double>(probs.data.size());
  double loss = 0.0;
  Matrix dlogit(probs.rows, probs.cols);
  for (std::size_t k = 0; k < probs.data.size(); ++k) {
    const double p = probs.data[k];
    loss += focal_loss(p, targets.data[k], focal.gamma, focal.alpha);
    dlogit.data[k] = focal_loss_grad(p, targets.data[k], focal.gamma, focal.alpha) * p * (1.0 - p) * norm;
  }
  if (grad) backprop_logits(x, dlogit, *grad, scale);
  return loss * norm;
}

double tag_loss(const ToyModel& model, const Matrix& x, std::span<const double> tags, Gradient* grad,
                double scale) {
  const Matrix probs = forward(model, x);
  if (tags.size() != probs.cols) throw std::invalid_argument("clip tags do not match the class count");
  const std::size_t C = probs.cols;
  std::vector<double> pooled(C, 0.0);
  std::vector<std::size_t> argmax(C, 0);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < probs.rows; ++t)
      if (t == 0 || probs(t, c) > pooled[c]) {
        pooled[c] = probs(t, c);
        argmax[c] = t;
      }
  const double loss = tagging_loss(tags, pooled);
  if (grad) {
    Matrix dlogit(probs.rows, C);
    for (std::size_t c = 0; c < C; ++c) {
      const double y = std::clamp(pooled[c], kLogEpsilon, 1.0 - kLogEpsilon);
      const double dy = -(tags[c] / y - (1.0 - tags[c]) / (1.0 - y)) / static_cast<double>(C);
      const double p = pooled[c];
      dlogit(argmax[c], c) = dy * p * (1.0 - p);
    }
    backprop_logits(x, dlogit, *grad, scale);
  }
  return loss;
}

double supervised_objective(const ToyModel& model, std::span<const SupervisedItem> batch,
                            const FocalParams& focal, Gradient* grad) {
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& item : batch) {
    if (item.frame_targets && !item.frame_targets->empty())
      total += frame_loss(model, *item.input, *item.frame_targets, focal, grad, scale);
    else if (item.clip_tags)
      total += tag_loss(model, *item.input, *item.clip_tags, grad, scale);
    else
      throw std::invalid_argument("supervised item has neither frame targets nor tags");
  }
  return total * scale;
}

double mixed_objective(const ToyModel& model, const Batch& batch, const FocalParams& focal, Gradient* grad) {
  if (batch.size() == 0) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    total += frame_loss(model, batch.inputs[i], batch.targets[i], focal, grad, scale);
  return total * scale;
}

void SslConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(ema_gamma >= 0.0 && ema_gamma < 1.0)) throw std::invalid_argument("EMA ratio must lie in [0,1)");
  if (burn_in_epochs < 0 || epochs < 0) throw std::invalid_argument("epoch counts must be >= 0");
  if (!(mixup_beta > 0.0)) throw std::invalid_argument("mixup beta must be positive");
  if (!(focal_gamma >= 0.0)) throw std::invalid_argument("focal gamma must be >= 0");
  if (!(focal_alpha >= 0.0 && focal_alpha <= 1.0)) throw std::invalid_argument("focal alpha must lie in [0,1]");
  if (!(pseudo_threshold > 0.0 && pseudo_threshold < 1.0))
    throw std::invalid_argument("pseudo-label threshold must lie in (0,1)");
  if (batch_labeled == 0 || batch_unlabeled == 0) throw std::invalid_argument("batch sizes must be positive");
  if (forced_mixup_lambda && !(*forced_mixup_lambda >= 0.0 && *forced_mixup_lambda <= 1.0))
    throw std::invalid_argument("forced mixup lambda must lie in [0,1]");
}

double frame_f1(const ToyModel& model, std::span<const SynthClip> clips) {
  double tp = 0, fp = 0, fn = 0;
  for (const auto& clip : clips) {
    if (clip.frame_labels.empty()) continue;
    const Matrix probs = forward(model, clip.features);
    for (std::size_t k = 0; k < probs.data.size(); ++k) {
      const bool predicted = probs.data[k] >= 0.5;
      const bool actual = clip.frame_labels.data[k] >= 0.5;
      tp += predicted && actual;
      fp += predicted && !actual;
      fn += !predicted && actual;
    }
  }
  return tp > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
}

ToyModel burn_in(const SynthSplits& data, const SslConfig& cfg, std::vector<EpochStats>* log) {
  cfg.validate();
  const auto& ref = !data.labeled.empty() ? data.labeled.front() : data.weak.at(0);
  const std::size_t C = !ref.frame_labels.empty() ? ref.frame_labels.cols : ref.clip_tags.size();
  ToyModel model = ToyModel::zeros(C, ref.features.cols);

  const auto items = supervised_items(data.labeled, data.weak);
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = make_rng({cfg.seed, 0});

  for (int epoch = 1; epoch <= cfg.burn_in_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_labeled) {
      std::vector<SupervisedItem> batch;
      for (std::size_t k = start; k < std::min(order.size(), start + cfg.batch_labeled); ++k)
        batch.push_back(items[order[k]]);
      Gradient grad = ToyModel::zeros(C, model.weight.cols);
      loss_sum += supervised_objective(model, batch, kHalfBce, &grad);
      add_scaled(model, grad, -cfg.lr);
      ++steps;
    }
    if (log) {
      const double f1 = frame_f1(model, data.test);
      log->push_back({"burn_in", epoch, steps ? loss_sum / steps : 0.0, 0.0, f1, f1});
    }
  }
  return model;
}

TeacherGuidedResult teacher_guided(const ToyModel& init, const SynthSplits& data, const SslConfig& cfg,
                                   const AugmentSpec& aug, std::vector<EpochStats>* log, const StepHook& hook) {
  cfg.validate();
  TeacherGuidedResult state{init, init};
  const std::size_t C = init.weight.rows;
  const std::size_t F = init.weight.cols;
  const FocalParams focal = cfg.focal();

  const auto items = supervised_items(data.labeled, data.weak);
  std::vector<std::size_t> lab_order(items.size()), unl_order(data.unlabeled.size());
  for (std::size_t i = 0; i < lab_order.size(); ++i) lab_order[i] = i;
  for (std::size_t i = 0; i < unl_order.size(); ++i) unl_order[i] = i;

  Rng order_rng = make_rng({cfg.seed, 1});
  Rng aug_rng = make_rng({cfg.seed, 2});
  Rng mix_rng = make_rng({cfg.seed, 3});

  std::size_t lab_cursor = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(unl_order.begin(), unl_order.end(), order_rng);
    std::size_t steps = 0;
    if (!unl_order.empty())
      steps = (unl_order.size() + cfg.batch_unlabeled - 1) / cfg.batch_unlabeled;
    else if (!lab_order.empty())
      steps = (lab_order.size() + cfg.batch_labeled - 1) / cfg.batch_labeled;

    double sup_sum = 0.0, unsup_sum = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      // Labeled batch, cycling through a reshuffled order.
      std::vector<std::size_t> lab_idx;
      for (std::size_t k = 0; k < std::min(cfg.batch_labeled, lab_order.size()); ++k) {
        if (lab_cursor == 0) std::shuffle(lab_order.begin(), lab_order.end(), order_rng);
        lab_idx.push_back(lab_order[lab_cursor]);
        lab_cursor = (lab_cursor + 1) % lab_order.size();
      }
      std::vector<std::size_t> unl_idx;
      for (std::size_t k = step * cfg.batch_unlabeled;
           k < std::min(unl_order.size(), (step + 1) * cfg.batch_unlabeled); ++k)
        unl_idx.push_back(unl_order[k]);

      // (1) supervised loss on weakly augmented labeled clips.
      std::vector<Matrix> weak_inputs;
      weak_inputs.reserve(lab_idx.size());
      for (auto i : lab_idx) weak_inputs.push_back(augment_weak(*items[i].input, aug, aug_rng));
      std::vector<SupervisedItem> sup_batch;
      for (std::size_t k = 0; k < lab_idx.size(); ++k) {
        SupervisedItem it = items[lab_idx[k]];
        it.input = &weak_inputs[k];
        sup_batch.push_back(it);
      }
      Gradient grad = ToyModel::zeros(C, F);
      sup_sum += supervised_objective(state.student, sup_batch, focal, &grad);

      // (2) hard pseudo labels from the teacher on weakly augmented clips.
      Batch unlabeled;
      for (auto i : unl_idx) {
        const Matrix& x = data.unlabeled[i].features;
        unlabeled.inputs.push_back(x);
        unlabeled.targets.push_back(pseudo_label(state.teacher, augment_weak(x, aug, aug_rng), cfg.pseudo_threshold));
      }

      // (3) mix strongly labeled clips with pseudo-labeled ones.
      Batch labeled;
      for (auto i : lab_idx)
        if (items[i].frame_targets && !items[i].frame_targets->empty()) {
          labeled.inputs.push_back(*items[i].input);
          labeled.targets.push_back(*items[i].frame_targets);
        }
      Batch mixed;
      if (cfg.use_mixup) {
        mixed = mixup(labeled, unlabeled, cfg.mixup_beta, mix_rng, cfg.forced_mixup_lambda);
      } else {
        mixed = labeled;
        mixed.inputs.insert(mixed.inputs.end(), unlabeled.inputs.begin(), unlabeled.inputs.end());
        mixed.targets.insert(mixed.targets.end(), unlabeled.targets.begin(), unlabeled.targets.end());
      }

      // (4) student loss on the strongly augmented mix.
      for (auto& x : mixed.inputs) x = cfg.use_asym_aug ? augment_strong(x, aug, aug_rng) : augment_weak(x, aug, aug_rng);
      unsup_sum += mixed_objective(state.student, mixed, focal, &grad);

      // (5) gradient step on J_sup + J_unsup, (6) teacher update.
      add_scaled(state.student, grad, -cfg.lr);
      state.teacher = cfg.use_ema ? ema_update(state.teacher, state.student, cfg.ema_gamma) : state.student;
      if (hook) hook(state.student, state.teacher);
    }
    if (log)
      log->push_back({"teacher_guided", epoch, steps ? sup_sum / steps : 0.0, steps ? unsup_sum / steps : 0.0,
                      frame_f1(state.student, data.test), frame_f1(state.teacher, data.test)});
  }
  return state;
}

SimulationReport run_simulation(const SynthSpec& spec, const SslConfig& cfg, const AugmentSpec& aug) {
  SynthSpec seeded = spec;
  seeded.seed = cfg.seed;
  const SynthSplits data = generate_dataset(seeded);
  SimulationReport report;
  const ToyModel init = burn_in(data, cfg, &report.epochs);
  report.burn_in_f1 = frame_f1(init, data.test);
  report.models = teacher_guided(init, data, cfg, aug, &report.epochs);
  report.student_f1 = frame_f1(report.models.student, data.test);
  report.teacher_f1 = frame_f1(report.models.teacher, data.test);
  return report;
}

std::string write_report_csv(const SimulationReport& report) {
  std::string out = "stage,epoch,sup_loss,unsup_loss,student_f1,teacher_f1\n";
  for (const auto& e : report.epochs)
    out += e.stage + ',' + std::to_string(e.epoch) + ',' + format_fixed(e.sup_loss, 6) + ',' +
           format_fixed(e.unsup_loss, 6) + ',' + format_fixed(e.student_f1, 6) + ',' +
           format_fixed(e.teacher_f1, 6) + '\n';
  out += "summary,0," + format_fixed(report.burn_in_f1, 6) + ",," + format_fixed(report.student_f1, 6) + ',' +
         format_fixed(report.teacher_f1, 6) + '\n';
  return out;
}

}  // namespace sedkit::ssl
