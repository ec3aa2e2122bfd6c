// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli_fixture.h"
#include "oracles/hungarian_oracle.h"
#include "oracles/psds_oracle.h"
#include "sedkit/assignment.h"
#include "sedkit/cli.h"
#include "sedkit/dataio.h"
#include "sedkit/fusion.h"
#include "sedkit/postproc.h"
#include "sedkit/psds.h"
#include "sedkit/ssl_sim.h"
#include "support.h"

using namespace sedkit;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED " + what;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(double v, int digits = 3) { return format_fixed(v, digits); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

// ------------------------------------------------------------------ 1
Verdict hungarian_oracle() {
  Verdict v;
  std::mt19937_64 rng(1);
  int mismatches = 0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 7)(rng);
    const int m = std::uniform_int_distribution<int>(n, 7)(rng);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    CostMatrix cost(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) cost(i, j) = rows[i][j] = std::uniform_int_distribution<int>(-50, 50)(rng);
    const auto fast = hungarian_assign(cost);
    const auto slow = oracle::brute_force_assign(rows);
    double selected = 0.0;
    for (int i = 0; i < n; ++i) selected += rows[i][fast.assignment[i]];
    if (fast.total_cost != slow.cost || selected != slow.cost) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  v.require(mismatches == 0, std::to_string(mismatches) + " cost mismatches");
  v.require(elapsed < 5.0, "runtime " + fmt(elapsed) + " s >= 5 s");
  v.note("1000 matrices, " + std::to_string(mismatches) + " mismatches, " + fmt(elapsed) + " s");
  return v;
}

// ------------------------------------------------------------------ 2
Verdict psds_oracle() {
  Verdict v;
  std::mt19937_64 rng(2);
  double worst = 0.0;
  int nontrivial = 0;
  const int cases = 250;
  for (int trial = 0; trial < cases; ++trial) {
    const auto m = support::random_micro_case(rng);
    const auto ds = support::to_dataset(m.clips, m.num_classes);
    PsdsEvaluator ev(ds, m.thresholds, m.params);
    const auto got = ev.evaluate(support::to_scores(m.clips, m.num_classes, m.hop));
    const auto want = oracle::brute_force_psds(m.clips, m.num_classes, m.hop, m.thresholds, support::to_micro(m.params));
    worst = std::max(worst, std::abs(got.overall - want.overall));
    for (std::size_t c = 0; c < want.per_class.size(); ++c)
      worst = std::max(worst, std::abs(got.per_class[c] - want.per_class[c]));
    nontrivial += want.overall > 0.0 && want.overall < 1.0;
  }
  v.require(worst <= 1e-9, "max deviation " + sci(worst));
  v.note(std::to_string(cases) + " micro-datasets (" + std::to_string(nontrivial) + " with 0<PSDS<1), max |diff| " + sci(worst));
  return v;
}

// ------------------------------------------------------------------ 3
Verdict class_identity() {
  Verdict v;
  std::mt19937_64 rng(3);
  int not_identical = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 250; ++trial) {
    const auto m = support::random_micro_case(rng);
    const auto ds = support::to_dataset(m.clips, m.num_classes);
    PsdsEvaluator ev(ds, m.thresholds, m.params);
    const auto res = ev.evaluate(support::to_scores(m.clips, m.num_classes, m.hop));
    PsdsParams p = m.params;
    double mean = 0.0;
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
      p.alpha_st = 0.0;
      const double a0 = psds_class(res.roc, c, p);
      p.alpha_st = 1.0;
      const double a1 = psds_class(res.roc, c, p);
      p.alpha_st = 7.0;
      const double a7 = psds_class(res.roc, c, p);
      if (!(a0 == a1 && a1 == a7)) ++not_identical;
      mean += a0;
    }
    // The class mean runs over classes with ground truth, as the overall score does.
    std::size_t active = 0;
    for (bool a : res.roc.active) active += a;
    if (active == 0) continue;
    mean /= static_cast<double>(active);
    p.alpha_st = 0.0;
    worst = std::max(worst, std::abs(psds_overall(res.roc, p) - mean));
  }
  v.require(not_identical == 0, std::to_string(not_identical) + " class scores vary with alpha_st");
  v.require(worst <= 1e-12, "alpha_st=0 overall vs class mean differs by " + sci(worst));
  v.note("250 cases, class score bit-identical over alpha_st {0,1,7}; max |overall - class mean| " + sci(worst));
  return v;
}

// ------------------------------------------------------------------ 4
Verdict perfect_and_empty() {
  Verdict v;
  std::mt19937_64 rng(4);
  int bad_perfect = 0, bad_empty = 0, cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto m = support::random_micro_case(rng);
    const auto ds = support::to_dataset(m.clips, m.num_classes);
    ScoreBundle perfect;
    perfect.hop_s = m.hop;
    perfect.class_names = ds.class_names;
    ScoreBundle empty = perfect;
    for (const auto& [clip, set] : ds.ground_truth) {
      perfect.grids.emplace(clip, rasterize(set, m.hop, ds.num_classes()));
      empty.grids.emplace(clip, FrameGrid(clip, m.hop, set.clip_duration_s, ds.num_classes(),
                                          frame_count(set.clip_duration_s, m.hop)));
    }
    // Rasterized truth is exact only when events sit on whole frames.
    Dataset aligned = ds;
    for (auto& [clip, set] : aligned.ground_truth) {
      set.events.clear();
      for (const auto& e : ds.ground_truth.at(clip).events) {
        const double on = std::floor(e.onset_s / m.hop) * m.hop;
        // A trailing partial frame has its center past the clip end, so it cannot carry an event.
        const double off = std::min(std::ceil(e.offset_s / m.hop), std::floor(set.clip_duration_s / m.hop)) * m.hop;
        if (off > on) set.events.push_back({e.class_id, on, off, 1.0});
      }
    }
    for (auto& [clip, set] : aligned.ground_truth) {
      set = de_overlap(set);
      perfect.grids[clip] = rasterize(set, m.hop, ds.num_classes());
    }
    for (const auto& profile : {PsdsParams::psds1(), PsdsParams::psds2()}) {
      PsdsEvaluator ev_p(aligned, default_thresholds(), profile);
      const auto rp = ev_p.evaluate(perfect);
      PsdsEvaluator ev_e(aligned, default_thresholds(), profile);
      const auto re = ev_e.evaluate(empty);
      std::size_t active = 0;
      for (bool a : rp.roc.active) active += a;
      if (active == 0) continue;
      ++cases;
      bool ok = rp.overall == 1.0;
      for (std::size_t c = 0; c < ds.num_classes(); ++c) ok = ok && rp.per_class[c] == (rp.roc.active[c] ? 1.0 : 0.0);
      bad_perfect += !ok;
      bool zero = re.overall == 0.0;
      for (double x : re.per_class) zero = zero && x == 0.0;
      bad_empty += !zero;
    }
  }
  v.require(bad_perfect == 0, std::to_string(bad_perfect) + " perfect detectors below 1");
  v.require(bad_empty == 0, std::to_string(bad_empty) + " empty detectors above 0");
  v.note(std::to_string(cases) + " dataset/profile pairs: perfect = 1.0, empty = 0.0 exactly");
  return v;
}

// ------------------------------------------------------------------ 5
Verdict fusion_contract() {
  Verdict v;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Dev set: 6 clips, 2 classes.
  Dataset ds;
  ds.class_names = {"c0", "c1"};
  const double hop = 0.5, dur = 20.0;
  const std::size_t frames = frame_count(dur, hop);
  for (int k = 0; k < 6; ++k) {
    const auto clip = support::clip_name(static_cast<std::size_t>(k));
    ds.durations[clip] = dur;
    EventSet set{clip, dur, {}};
    for (int c = 0; c < 2; ++c) {
      const double on = std::floor(unit(rng) * 12.0);
      set.events.push_back({c, on, on + 3.0 + std::floor(unit(rng) * 4.0), 1.0});
    }
    ds.ground_truth[clip] = set;
  }
  // Model A is sharp on class 0 and blurry on class 1, model B the reverse.
  auto make_model = [&](const std::string& id, std::size_t sharp) {
    ScoreBundle b;
    b.model_id = id;
    b.hop_s = hop;
    b.class_names = ds.class_names;
    for (const auto& [clip, set] : ds.ground_truth) {
      const auto truth = rasterize(set, hop, 2);
      FrameGrid g(clip, hop, dur, 2, frames);
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t t = 0; t < frames; ++t) {
          const bool on = truth.at(c, t) > 0.0;
          g.at(c, t) = c == sharp ? (on ? 0.75 + 0.25 * unit(rng) : 0.3 * unit(rng))
                                  : (on ? 0.45 + 0.4 * unit(rng) : 0.5 * unit(rng));
        }
      b.grids.emplace(clip, std::move(g));
    }
    return b;
  };
  const std::vector<ScoreBundle> models{make_model("A", 0), make_model("B", 1)};

  const auto params = PsdsParams::psds1();
  std::vector<std::vector<double>> psds;
  std::vector<double> single;
  for (const auto& m : models) {
    PsdsEvaluator ev(ds, default_thresholds(), params);
    const auto r = ev.evaluate(m);
    psds.push_back(r.per_class);
    single.push_back(r.overall);
  }
  const auto weights = compute_weights(psds, {"A", "B"}, ds.class_names);
  double worst_sum = 0.0;
  for (std::size_t c = 0; c < 2; ++c) worst_sum = std::max(worst_sum, std::abs(weights.weights[0][c] + weights.weights[1][c] - 1.0));
  v.require(worst_sum <= 1e-9, "weights do not sum to 1");

  const auto fused = fuse(models, weights);
  bool convex = true;
  for (const auto& [clip, g] : fused.grids)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t t = 0; t < frames; ++t) {
        const double a = models[0].grids.at(clip).at(c, t), b = models[1].grids.at(clip).at(c, t);
        convex = convex && g.at(c, t) >= std::min(a, b) && g.at(c, t) <= std::max(a, b);
      }
  v.require(convex, "fused value outside the model range");

  const std::vector<ScoreBundle> one{models[0]};
  v.require(fuse(one, compute_weights({psds[0]})).grids == models[0].grids, "single-model fusion is not the identity");

  // Random weight matrices also stay normalized.
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> p(1 + trial % 5, std::vector<double>(3));
    for (auto& row : p)
      for (auto& x : row) x = unit(rng) < 0.2 ? 0.0 : unit(rng);
    const auto w = compute_weights(p);
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      for (const auto& row : w.weights) s += row[c];
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
  }
  v.require(worst_sum <= 1e-9, "random weights do not sum to 1");

  PsdsEvaluator ev(ds, default_thresholds(), params);
  const double fused_psds = ev.evaluate(fused).overall;
  v.require(fused_psds >= std::max(single[0], single[1]), "fused PSDS below the best single model");
  v.note("PSDS1 A " + fmt(single[0]) + ", B " + fmt(single[1]) + ", fused " + fmt(fused_psds) + "; weights c0 (" +
         fmt(weights.weights[0][0]) + "," + fmt(weights.weights[1][0]) + ") c1 (" + fmt(weights.weights[0][1]) + "," +
         fmt(weights.weights[1][1]) + ")");
  return v;
}

// ------------------------------------------------------------------ 6
Verdict window_tuning() {
  Verdict v;
  std::mt19937_64 rng(6);
  int below = 0, runs = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = support::random_micro_case(rng);
    const auto ds = support::to_dataset(m.clips, m.num_classes);
    TuneOptions opt;
    opt.search_max = 11;
    opt.thresholds = m.thresholds;
    opt.tie_mean = trial % 2 == 0;
    const auto r = tune_windows(ds, support::to_scores(m.clips, m.num_classes, m.hop), m.params, opt);
    for (std::size_t c = 0; c < ds.num_classes(); ++c) below += r.chosen_objective[c] < r.baseline_objective[c];
    ++runs;
  }
  v.require(below == 0, std::to_string(below) + " classes below baseline");

  const auto inst = support::impulse_instance();
  const auto params = PsdsParams::psds1();
  TuneOptions opt;
  opt.search_max = 21;
  const auto tuned = tune_windows(inst.dataset, inst.scores, params, opt);
  PsdsEvaluator ev(inst.dataset, default_thresholds(), params);
  const double before = ev.evaluate(inst.scores).per_class[0];
  const double after = ev.evaluate(apply_pipeline(inst.scores, tuned.config)).per_class[0];
  v.require(tuned.config.median_len[0] >= 3, "impulse class kept median window 1");
  v.require(after > before, "tuned window did not raise the noisy class score");
  v.note(std::to_string(runs) + " random tunings at or above baseline; impulse class median " +
         std::to_string(tuned.config.median_len[0]) + ", PSDS_c " + fmt(before) + " -> " + fmt(after));
  return v;
}

// ------------------------------------------------------------------ 7
Verdict filter_truths() {
  Verdict v;
  using Row = std::vector<double>;
  v.require(median_filter(Row{0, 1, 0, 1, 1}, 3) == Row{0, 0, 1, 1, 1}, "median [0,1,0,1,1]");
  const auto mean = mean_filter(Row{0, 1, 0}, 3);
  bool thirds = mean.size() == 3;
  for (double x : mean) thirds = thirds && std::abs(x - 1.0 / 3.0) <= 1e-15;
  v.require(thirds, "mean [0,1,0]");
  const Row r{0.3, 0.9, 0.1, 0.5, 0.7};
  v.require(median_filter(r, 1) == r && mean_filter(r, 1) == r, "window-1 identity");
  v.note("median [0,0,1,1,1], mean [1/3,1/3,1/3], window 1 identity");
  return v;
}

// ------------------------------------------------------------------ 8
double l2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Verdict gradient_checks() {
  using namespace sedkit::ssl;
  Verdict v;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-6;

  double worst_focal = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double p = 0.02 + 0.96 * unit(rng);
    const double target = i % 4 == 0 ? unit(rng) : std::round(unit(rng));
    const double gamma = 4.0 * unit(rng), alpha = unit(rng);
    const double num = (focal_loss(p + h, target, gamma, alpha) - focal_loss(p - h, target, gamma, alpha)) / (2 * h);
    const double ana = focal_loss_grad(p, target, gamma, alpha);
    worst_focal = std::max(worst_focal, std::abs(num - ana) / std::max({std::abs(num), std::abs(ana), 1e-300}));
  }

  SynthSpec spec;
  spec.seed = 8;
  spec.n_labeled = 3;
  spec.n_weak = 3;
  spec.n_unlabeled = 4;
  spec.n_test = 0;
  spec.frames = 12;
  spec.bins = 8;
  spec.classes = 3;
  const auto data = generate_dataset(spec);
  std::vector<SupervisedItem> items;
  for (const auto& c : data.labeled) items.push_back({&c.features, &c.frame_labels, nullptr});
  for (const auto& c : data.weak) items.push_back({&c.features, nullptr, &c.clip_tags});

  auto rel_error = [&](const ToyModel& model, const std::function<double(const ToyModel&, Gradient*)>& loss) {
    Gradient g = ToyModel::zeros(model.weight.rows, model.weight.cols);
    loss(model, &g);
    std::vector<double> a, n, d;
    for (std::size_t k = 0; k < model.num_params(); ++k) {
      ToyModel plus = model, minus = model;
      plus.param(k) += h;
      minus.param(k) -= h;
      const double num = (loss(plus, nullptr) - loss(minus, nullptr)) / (2 * h);
      a.push_back(g.param(k));
      n.push_back(num);
      d.push_back(g.param(k) - num);
    }
    return l2(d) / std::max({l2(a), l2(n), 1e-300});
  };

  double worst_model = 0.0;
  for (int i = 0; i < 100; ++i) {
    ToyModel model = ToyModel::zeros(3, 8);
    for (std::size_t k = 0; k < model.num_params(); ++k) model.param(k) = 0.6 * (unit(rng) - 0.5);
    const FocalParams focal{3.0 * unit(rng), unit(rng)};
    Batch mixed = mixup(Batch{{data.labeled[0].features}, {data.labeled[0].frame_labels}},
                        Batch{{data.unlabeled[i % 4].features}, {data.labeled[1].frame_labels}}, 0.5, rng);
    worst_model = std::max(worst_model, rel_error(model, [&](const ToyModel& m, Gradient* g) {
                             return supervised_objective(m, items, focal, g);
                           }));
    worst_model = std::max(worst_model, rel_error(model, [&](const ToyModel& m, Gradient* g) {
                             return mixed_objective(m, mixed, focal, g);
                           }));
  }
  v.require(worst_focal <= 1e-5, "focal gradient error " + std::to_string(worst_focal));
  v.require(worst_model <= 1e-5, "toy-model gradient error " + std::to_string(worst_model));
  char buf[160];
  std::snprintf(buf, sizeof buf, "max relative error focal %.2e, toy model (sup + unsup) %.2e over 100 instances each",
                worst_focal, worst_model);
  v.note(buf);
  return v;
}

// ------------------------------------------------------------------ 9
Verdict ssl_end_to_end() {
  using namespace sedkit::ssl;
  Verdict v;
  const SynthSpec spec;
  const AugmentSpec aug;
  int wins = 0;
  double sum_burn = 0.0, sum_student = 0.0;
  std::string per_seed;
  const auto start = Clock::now();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SslConfig cfg;
    cfg.seed = seed;
    const auto r = run_simulation(spec, cfg, aug);
    wins += r.student_f1 >= r.burn_in_f1;
    sum_burn += r.burn_in_f1;
    sum_student += r.student_f1;
    per_seed += (seed ? " " : "") + fmt(r.burn_in_f1) + ">" + fmt(r.student_f1);
  }
  const double elapsed = seconds_since(start);
  v.require(wins >= 8, std::to_string(wins) + "/10 seeds improved");
  v.require(elapsed < 180.0, "runtime " + fmt(elapsed, 1) + " s");

  // Ablations on seed 0: each runs and yields a report with the same layout.
  SslConfig base;
  const auto full = run_simulation(spec, base, aug);
  const auto full_csv = write_report_csv(full);
  const auto rows = std::count(full_csv.begin(), full_csv.end(), '\n');
  std::string ablations;
  for (const char* name : {"no-mixup", "no-focal", "no-asym-aug", "no-ema"}) {
    SslConfig cfg = base;
    const std::string n = name;
    cfg.use_mixup = n != "no-mixup";
    cfg.use_focal = n != "no-focal";
    cfg.use_asym_aug = n != "no-asym-aug";
    cfg.use_ema = n != "no-ema";
    const auto r = run_simulation(spec, cfg, aug);
    const auto csv = write_report_csv(r);
    v.require(std::count(csv.begin(), csv.end(), '\n') == rows && csv.substr(0, csv.find('\n')) ==
                                                                    full_csv.substr(0, full_csv.find('\n')),
              std::string(name) + " report layout differs");
    ablations += std::string(" ") + name + " " + fmt(r.student_f1) + (r.student_f1 <= full.student_f1 ? " (<= full)" : " (> full)");
  }
  v.note(std::to_string(wins) + "/10 seeds student >= burn-in; mean burn-in " + fmt(sum_burn / 10) + ", student " +
         fmt(sum_student / 10) + "; 10 seeds in " + fmt(elapsed, 1) + " s; per seed [" + per_seed +
         "]; seed-0 student F1 full " + fmt(full.student_f1) + "," + ablations);
  return v;
}

// ----------------------------------------------------------------- 10
Verdict cli_determinism() {
  Verdict v;
  const auto f = support::write_cli_fixture(support::scratch_dir("acceptance_cli"));
  const auto p = [&](const char* name) { return (f.root / name).string(); };
  const std::string windows = p("w.csv");
  const std::vector<std::vector<std::string>> runs{
      {"evaluate", "--gt", f.gt, "--durations", f.durations, "--scores", f.model_a, "--config", f.config, "--out",
       p("e.csv"), "--roc", p("e.json"), "--jobs", "3"},
      {"fuse", "--scores", f.model_a, "--scores", f.model_b, "--gt", f.gt, "--durations", f.durations, "--config",
       f.config, "--profile", "psds2", "--out-dir", p("fused")},
      {"tune-windows", "--gt", f.gt, "--durations", f.durations, "--scores", f.model_b, "--config", f.config, "--out",
       windows},
      {"match-loss", "--gt", f.gt, "--durations", f.durations, "--predictions", f.predictions, "--tag-scores", f.tags,
       "--out", p("m.csv")},
      {"simulate-ssl", "--seed", "4", "--burn-in-epochs", "20", "--epochs", "3", "--report", p("s.csv")}};
  const std::vector<std::string> manifests{p("e.csv.manifest.json"), p("fused.manifest.json"),
                                           p("w.csv.manifest.json"), p("m.csv.manifest.json"),
                                           p("s.csv.manifest.json")};
  std::size_t outputs = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::ostringstream out, err;
    if (cli::run(runs[k], out, err) != 0) {
      v.require(false, runs[k][0] + " failed: " + err.str());
      continue;
    }
    const auto manifest = nlohmann::json::parse(read_text_file(manifests[k]));
    std::map<std::string, std::string> before;
    for (const auto& o : manifest["outputs"]) before[o["path"]] = read_text_file(o["path"].get<std::string>());
    for (const auto& [path, text] : before) std::filesystem::remove(path);
    std::ostringstream out2, err2;
    const int code = cli::run({"replay", manifests[k]}, out2, err2);
    v.require(code == 0, runs[k][0] + " replay exit " + std::to_string(code) + ": " + err2.str());
    for (const auto& [path, text] : before) {
      const bool same = std::filesystem::exists(path) && read_text_file(path) == text;
      v.require(same, runs[k][0] + " output " + path + " differs");
      outputs += same;
    }
  }
  v.note("5 subcommands replayed from manifests, " + std::to_string(outputs) + " outputs byte-identical");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 hungarian matches exhaustive search", hungarian_oracle},
      {"2 PSDS matches straight-line oracle", psds_oracle},
      {"3 class-specific PSDS identities", class_identity},
      {"4 perfect and empty detectors", perfect_and_empty},
      {"5 fusion contract", fusion_contract},
      {"6 window tuning", window_tuning},
      {"7 filter unit truths", filter_truths},
      {"8 gradient checks", gradient_checks},
      {"9 teacher-guided training end to end", ssl_end_to_end},
      {"10 CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << v.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criterion(s) failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
