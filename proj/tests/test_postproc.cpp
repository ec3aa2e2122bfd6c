#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <random>

#include "sedkit/errors.h"
#include "sedkit/postproc.h"
#include "support.h"

using namespace sedkit;

namespace {

using Row = std::vector<double>;

// Direct sliding-window reference with replicate padding.
Row naive_filter(const Row& row, int window, bool median) {
  const long n = static_cast<long>(row.size()), half = window / 2;
  Row out(row.size());
  for (long t = 0; t < n; ++t) {
    Row w;
    for (long k = t - half; k <= t + half; ++k) w.push_back(row[static_cast<std::size_t>(std::clamp(k, 0L, n - 1))]);
    if (median) {
      std::sort(w.begin(), w.end());
      out[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(half)];
    } else {
      double s = 0.0;
      for (double v : w) s += v;
      out[static_cast<std::size_t>(t)] = s / window;
    }
  }
  return out;
}

Row random_row(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Row r(n);
  for (auto& v : r) v = unit(rng) < 0.3 ? std::round(unit(rng)) : unit(rng);
  return r;
}

}  // namespace

TEST_CASE("filter unit truths") {
  CHECK(median_filter(Row{0, 1, 0, 1, 1}, 3) == Row{0, 0, 1, 1, 1});
  const auto m = mean_filter(Row{0, 1, 0}, 3);
  for (double v : m) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Row any{0.3, 0.9, 0.1, 0.5};
  CHECK(median_filter(any, 1) == any);
  CHECK(mean_filter(any, 1) == any);
  CHECK(median_filter(Row{}, 3).empty());
  CHECK_THROWS_AS(median_filter(any, 2), std::invalid_argument);
  CHECK_THROWS_AS(mean_filter(any, 0), std::invalid_argument);
}

TEST_CASE("filters match a direct sliding-window computation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto row = random_row(rng, 1 + trial % 40);
    const int w = 1 + 2 * (trial % 12);
    CHECK(median_filter(row, w) == naive_filter(row, w, true));
    const auto got = mean_filter(row, w);
    const auto want = naive_filter(row, w, false);
    for (std::size_t t = 0; t < row.size(); ++t) CHECK(got[t] == doctest::Approx(want[t]).epsilon(1e-12));
  }
}

TEST_CASE("filter order matters") {
  const Row row{0, 1, 0, 0, 1, 0};
  const auto median_first = mean_filter(median_filter(row, 3), 3);
  const auto mean_first = median_filter(mean_filter(row, 3), 3);
  CHECK(median_first == Row{0, 0, 0, 0, 0, 0});
  CHECK(median_first != mean_first);
  FrameGrid g("a", 1.0, 6.0, 1, 6);
  std::copy(row.begin(), row.end(), g.row(0).begin());
  const auto piped = apply_pipeline(g, {{3}, {3}});
  CHECK(std::vector<double>(piped.row(0).begin(), piped.row(0).end()) == median_first);
}

TEST_CASE("filter properties") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 30;
    const int w = 1 + 2 * (trial % 9);
    const Row constant(n, unit(rng));
    CHECK(median_filter(constant, w) == constant);
    CHECK(mean_filter(constant, w) == constant);

    const auto a = random_row(rng, n);
    Row b = a;
    for (auto& v : b) v = std::min(1.0, v + 0.3 * unit(rng));
    const auto ma = median_filter(a, w), mb = median_filter(b, w);
    for (std::size_t t = 0; t < n; ++t) CHECK(ma[t] <= mb[t]);
    for (double v : mean_filter(ma, w + 2)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("window configuration") {
  CHECK(tied_mean_length(1) == 1);
  CHECK(tied_mean_length(3) == 5);
  CHECK(tied_mean_length(5) == 9);
  CHECK(tied_mean_length(7) == 11);
  for (int m = 3; m < 500; m += 2) {
    const int l = tied_mean_length(m);
    CHECK(l % 2 == 1);
    CHECK(l >= 1.5 * m);
    CHECK(l - 2 < 1.5 * m);
  }
  CHECK_NOTHROW(WindowConfig::identity(3).validate());
  CHECK_THROWS_AS((WindowConfig{{3}, {1}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((WindowConfig{{2}, {3}}).validate(), std::invalid_argument);
}

TEST_CASE("all-ones pipeline is the identity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    FrameGrid g("a", 0.1, 5.0, 3, 50);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto r = random_row(rng, 50);
      std::copy(r.begin(), r.end(), g.row(c).begin());
    }
    CHECK(apply_pipeline(g, WindowConfig::identity(3)) == g);
  }
}

TEST_CASE("window CSV round trip") {
  const WindowConfig cfg{{1, 7}, {1, 11}};
  const auto text = write_window_csv(cfg, {"Dog", "Speech"});
  CHECK(text == "class,median_len,mean_len\nDog,1,1\nSpeech,7,11\n");
  CHECK(parse_window_csv(text, {"Dog", "Speech"}) == cfg);
  CHECK_THROWS_AS(parse_window_csv("class,median_len,mean_len\nDog,1,1\n", {"Dog", "Speech"}), ParseError);
  CHECK_THROWS_AS(parse_window_csv("class,median_len,mean_len\nDog,2,3\n", {"Dog"}), ParseError);
  CHECK_THROWS_AS(parse_window_csv("class,median_len,mean_len\nDog,3,1\n", {"Dog"}), ParseError);
  CHECK_THROWS_AS(parse_window_csv("class,median_len,mean_len\nCat,1,1\n", {"Dog"}), ParseError);
}

TEST_CASE("constant rows tune to the all-ones config") {
  Dataset ds;
  ds.class_names = {"A", "B"};
  ds.durations = {{"a.wav", 20.0}};
  ds.ground_truth["a.wav"] = {"a.wav", 20.0, {{0, 2, 8}, {1, 10, 15}}};
  ScoreBundle s;
  s.hop_s = 1.0;
  s.class_names = ds.class_names;
  FrameGrid g("a.wav", 1.0, 20.0, 2, 20);
  for (auto& v : g.row(0)) v = 0.6;
  for (auto& v : g.row(1)) v = 0.3;
  s.grids.emplace("a.wav", g);
  TuneOptions opt;
  opt.search_max = 15;
  const auto r = tune_windows(ds, s, PsdsParams::psds2(), opt);
  CHECK(r.config == WindowConfig::identity(2));
}

TEST_CASE("impulse noise is removed by the tuned median window") {
  const auto inst = support::impulse_instance();
  const auto params = PsdsParams::psds1();
  TuneOptions opt;
  opt.search_max = 21;
  const auto tuned = tune_windows(inst.dataset, inst.scores, params, opt);
  CHECK(tuned.config.median_len[0] >= 3);
  for (std::size_t c = 0; c < 2; ++c) CHECK(tuned.chosen_objective[c] >= tuned.baseline_objective[c]);

  PsdsEvaluator ev(inst.dataset, default_thresholds(), params);
  const double before = ev.evaluate(inst.scores).per_class[0];
  const double after = ev.evaluate(apply_pipeline(inst.scores, tuned.config)).per_class[0];
  CHECK(after > before);

  // Exhaustive sweep of the noisy class: every median window of 3 or more
  // beats the raw scores, and window 1 is the raw scores.
  for (int w = 1; w <= 9; w += 2) {
    WindowConfig cfg = WindowConfig::identity(2);
    cfg.median_len[0] = w;
    cfg.mean_len[0] = tied_mean_length(w);
    const double psds_c = ev.evaluate(apply_pipeline(inst.scores, cfg)).per_class[0];
    if (w == 1)
      CHECK(psds_c == before);
    else
      CHECK(psds_c > before);
  }
}

TEST_CASE("tuned objective never falls below the baseline") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = support::random_micro_case(rng);
    const auto ds = support::to_dataset(m.clips, m.num_classes);
    const auto scores = support::to_scores(m.clips, m.num_classes, m.hop);
    TuneOptions opt;
    opt.search_max = 9;
    opt.thresholds = m.thresholds;
    opt.tie_mean = trial % 2 == 0;
    const auto r = tune_windows(ds, scores, m.params, opt);
    CHECK_NOTHROW(r.config.validate());
    for (std::size_t c = 0; c < ds.num_classes(); ++c) CHECK(r.chosen_objective[c] >= r.baseline_objective[c]);
    if (opt.tie_mean)
      for (std::size_t c = 0; c < ds.num_classes(); ++c)
        CHECK(r.config.mean_len[c] == tied_mean_length(r.config.median_len[c]));
  }
}

TEST_CASE("objective ratio edge cases") {
  PsdsResult r;
  r.overall = 0.5;
  r.per_class = {0.25, 0.0};
  CHECK(window_objective(r, 0) == 0.5);
  r.overall = 0.0;
  CHECK(window_objective(r, 1) == 0.0);
  CHECK(std::isinf(window_objective(r, 0)));
}
