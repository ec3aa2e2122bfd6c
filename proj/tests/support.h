// Shared fixtures for the test binaries.

#ifndef SEDKIT_TESTS_SUPPORT_H_
#define SEDKIT_TESTS_SUPPORT_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles/psds_oracle.h"
#include "sedkit/dataset.h"
#include "sedkit/events.h"
#include "sedkit/psds.h"

namespace support {

namespace fs = std::filesystem;

/// Fresh empty directory under the test working directory.
inline fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::current_path() / "scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string clip_name(std::size_t i) { return "clip" + std::to_string(i) + ".wav"; }

inline std::vector<std::string> class_names(int n) {
  std::vector<std::string> out;
  for (int c = 0; c < n; ++c) out.push_back("class" + std::to_string(c));
  return out;
}

/// Library containers for an oracle micro-dataset.
inline sedkit::Dataset to_dataset(const std::vector<oracle::MicroClip>& clips, int num_classes) {
  sedkit::Dataset ds;
  ds.class_names = class_names(num_classes);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto name = clip_name(i);
    ds.durations[name] = clips[i].duration;
    sedkit::EventSet set{name, clips[i].duration, {}};
    for (const auto& g : clips[i].gt) set.events.push_back({g.cls, g.on, g.off, 1.0});
    ds.ground_truth[name] = set;
  }
  return ds;
}

inline sedkit::ScoreBundle to_scores(const std::vector<oracle::MicroClip>& clips, int num_classes, double hop) {
  sedkit::ScoreBundle b;
  b.model_id = "micro";
  b.hop_s = hop;
  b.class_names = class_names(num_classes);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const std::size_t frames = clips[i].probs.front().size();
    sedkit::FrameGrid grid(clip_name(i), hop, clips[i].duration, static_cast<std::size_t>(num_classes), frames);
    for (int c = 0; c < num_classes; ++c)
      for (std::size_t t = 0; t < frames; ++t) grid.at(static_cast<std::size_t>(c), t) = clips[i].probs[c][t];
    b.grids.emplace(clip_name(i), std::move(grid));
  }
  return b;
}

struct MicroCase {
  std::vector<oracle::MicroClip> clips;
  int num_classes = 1;
  double hop = 0.5;
  std::vector<double> thresholds;
  sedkit::PsdsParams params;
};

/// Random micro-dataset: <= 3 clips, <= 2 classes, <= 4 ground-truth events,
/// <= 5 thresholds. Scores are noisy with extra mass inside events so that a
/// mix of hits, misses and false alarms occurs.
inline MicroCase random_micro_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  MicroCase m;
  m.num_classes = pick(1, 2);
  m.hop = std::vector<double>{0.25, 0.5, 1.0}[pick(0, 2)];
  const int n_clips = pick(1, 3);
  int events_left = pick(0, 4);
  for (int i = 0; i < n_clips; ++i) {
    oracle::MicroClip clip;
    clip.duration = 2.0 + 6.0 * unit(rng);
    const int n_events = i + 1 == n_clips ? events_left : pick(0, events_left);
    events_left -= n_events;
    for (int k = 0; k < n_events; ++k) {
      const double on = (clip.duration - 0.3) * unit(rng);
      const double off = on + 0.3 + (clip.duration - on - 0.3) * unit(rng);
      clip.gt.push_back({pick(0, m.num_classes - 1), on, off});
    }
    const auto frames = sedkit::frame_count(clip.duration, m.hop);
    clip.probs.assign(m.num_classes, std::vector<double>(frames, 0.0));
    for (int c = 0; c < m.num_classes; ++c)
      for (std::size_t t = 0; t < frames; ++t) {
        const double center = (static_cast<double>(t) + 0.5) * m.hop;
        double v = 0.6 * unit(rng);
        for (const auto& g : clip.gt)
          if (g.cls == c && center >= g.on && center < g.off) v = std::min(1.0, v + 0.5 * unit(rng) + 0.2);
        clip.probs[c][t] = v;
      }
    m.clips.push_back(std::move(clip));
  }
  const int n_thr = pick(1, 5);
  for (int k = 0; k < n_thr; ++k) m.thresholds.push_back(0.02 + 0.96 * unit(rng));
  std::sort(m.thresholds.begin(), m.thresholds.end());
  m.thresholds.erase(std::unique(m.thresholds.begin(), m.thresholds.end()), m.thresholds.end());
  const double rhos[] = {0.1, 0.3, 0.5, 0.7, 1.0};
  m.params.rho_dtc = rhos[pick(0, 4)];
  m.params.rho_gtc = rhos[pick(0, 4)];
  m.params.rho_cttc = rhos[pick(0, 4)];
  m.params.alpha_ct = unit(rng);
  m.params.alpha_st = std::vector<double>{0.0, 0.5, 1.0, 2.0}[pick(0, 3)];
  m.params.e_max = 100.0 + 9900.0 * unit(rng);
  return m;
}

/// Two-class instance where class 0 carries a 10-frame event plus isolated
/// 1-frame impulses and class 1 is detected cleanly. Impulses stay away from
/// clip edges, where replicate padding would keep them alive.
struct ImpulseInstance {
  sedkit::Dataset dataset;
  sedkit::ScoreBundle scores;
};

inline ImpulseInstance impulse_instance() {
  const double hop = 1.0, duration = 40.0;
  const std::size_t frames = 40;
  ImpulseInstance inst;
  inst.dataset.class_names = {"noisy", "clean"};
  inst.scores.model_id = "impulse";
  inst.scores.hop_s = hop;
  inst.scores.class_names = inst.dataset.class_names;
  const int event_start[] = {10, 22, 5};
  const std::vector<std::vector<int>> impulses{{3, 28, 35}, {6, 14, 37}, {20, 30}};
  for (int k = 0; k < 3; ++k) {
    const std::string clip = clip_name(static_cast<std::size_t>(k));
    inst.dataset.durations[clip] = duration;
    const double s0 = event_start[k];
    const double s1 = (event_start[k] + 13) % 26 + 2;
    sedkit::EventSet gt{clip, duration, {{0, s0, s0 + 10.0, 1.0}, {1, s1, s1 + 6.0, 1.0}}};
    inst.dataset.ground_truth[clip] = gt;
    sedkit::FrameGrid grid(clip, hop, duration, 2, frames);
    for (std::size_t t = 0; t < frames; ++t) {
      const double center = static_cast<double>(t) + 0.5;
      grid.at(0, t) = center > s0 && center < s0 + 10.0 ? 0.9 : 0.1;
      grid.at(1, t) = center > s1 && center < s1 + 6.0 ? 0.8 : 0.05;
    }
    for (int t : impulses[static_cast<std::size_t>(k)]) grid.at(0, static_cast<std::size_t>(t)) = 0.95;
    inst.scores.grids.emplace(clip, std::move(grid));
  }
  inst.dataset.validate();
  return inst;
}

inline oracle::MicroParams to_micro(const sedkit::PsdsParams& p) {
  return {p.rho_dtc, p.rho_gtc, p.rho_cttc, p.alpha_ct, p.alpha_st, p.e_max};
}

}  // namespace support

#endif  // SEDKIT_TESTS_SUPPORT_H_
