// sedkit/cli.cpp

#include "sedkit/cli.h"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>

#include "sedkit/assignment.h"
#include "sedkit/config.h"
#include "sedkit/dataio.h"
#include "sedkit/errors.h"
#include "sedkit/fusion.h"
#include "sedkit/postproc.h"
#include "sedkit/psds.h"
#include "sedkit/ssl_sim.h"

namespace sedkit::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Inputs read and outputs written by one run, for the manifest.
class RunRecord {
 public:
  RunRecord(std::string command, std::vector<std::string> argv)
      : command_(std::move(command)), argv_(std::move(argv)) {}

  void add_input(const fs::path& path) {
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) inputs_[f.generic_string()] = sha256_file(f);
    } else {
      inputs_[path.generic_string()] = sha256_file(path);
    }
  }

  void write_output(const fs::path& path, std::string_view text) {
    write_text_file(path, text);
    outputs_[path.generic_string()] = sha256_hex(text);
  }

  void record_output(const fs::path& path) { outputs_[path.generic_string()] = sha256_file(path); }

  json& settings() { return settings_; }

  void write_manifest(const fs::path& path) const {
    json m;
    m["tool"] = "sedkit";
    m["version"] = std::string(kToolVersion);
    m["command"] = command_;
    m["argv"] = argv_;
    m["settings"] = settings_;
    m["inputs"] = json::array();
    for (const auto& [p, digest] : inputs_) m["inputs"].push_back({{"path", p}, {"sha256", digest}});
    m["outputs"] = json::array();
    for (const auto& [p, digest] : outputs_) m["outputs"].push_back({{"path", p}, {"sha256", digest}});
    write_text_file(path, m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  json settings_ = json::object();
};

std::string strip_slashes(std::string path) {
  while (path.size() > 1 && path.back() == '/') path.pop_back();
  return path;
}

fs::path manifest_path_for(const std::string& explicit_path, const fs::path& primary) {
  if (!explicit_path.empty()) return explicit_path;
  return strip_slashes(primary.generic_string()) + ".manifest.json";
}

std::string model_name_for(const fs::path& p) {
  fs::path clean = p;
  if (!clean.has_filename()) clean = clean.parent_path();
  return fs::is_directory(p) ? clean.filename().string() : clean.stem().string();
}

json params_json(const PsdsParams& p) {
  return {{"rho_dtc", p.rho_dtc}, {"rho_gtc", p.rho_gtc}, {"rho_cttc", p.rho_cttc},
          {"alpha_ct", p.alpha_ct}, {"alpha_st", p.alpha_st}, {"e_max", p.e_max}};
}

// Options shared by the dataset-facing subcommands.
struct CommonOptions {
  std::string config;
  std::string manifest;
  int jobs = 1;
  std::string profile = "psds1";
};

void add_common(CLI::App* sub, CommonOptions& o, bool with_profile) {
  sub->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--manifest", o.manifest, "run manifest path (default: <output>.manifest.json)");
  sub->add_option("--jobs", o.jobs, "maximum worker threads")->check(CLI::PositiveNumber);
  if (with_profile)
    sub->add_option("--profile", o.profile, "PSDS profile")->check(CLI::IsMember({"psds1", "psds2"}));
}

ToolkitConfig load_config(const CommonOptions& o, RunRecord& rec) {
  ToolkitConfig cfg;
  if (!o.config.empty()) {
    rec.add_input(o.config);
    cfg = parse_config(read_text_file(o.config), o.config);
  }
  rec.settings()["config"] = to_config_text(cfg);
  rec.settings()["jobs"] = o.jobs;
  rec.settings()["profile"] = o.profile;
  return cfg;
}

// Ground truth and durations; dataset errors are reported against the
// ground-truth file.
Dataset load_dataset(const std::string& gt_path, const std::string& dur_path, const ToolkitConfig& cfg,
                     RunRecord& rec) {
  rec.add_input(gt_path);
  rec.add_input(dur_path);
  const auto table = parse_ground_truth(read_text_file(gt_path), gt_path);
  const auto durations = parse_durations(read_text_file(dur_path), dur_path);
  try {
    return make_dataset(table, durations, cfg.classes);
  } catch (const std::invalid_argument& e) {
    throw ParseError(gt_path, 0, e.what());
  }
}

// Frame-score directory or, for event-wise models, a detection TSV that is
// rasterized onto the configured hop.
ScoreBundle load_scores(const fs::path& path, const std::vector<std::string>& classes, double hop_s,
                        const std::map<std::string, double>& durations, const std::string& model_id,
                        RunRecord& rec) {
  if (!fs::exists(path)) throw ParseError(path.string(), 0, "no such file or directory");
  rec.add_input(path);
  if (fs::is_directory(path)) return load_frame_scores(path, classes, hop_s, durations, model_id);
  if (durations.empty()) throw ParseError(path.string(), 0, "detection files need --durations");
  const auto table = parse_ground_truth(read_text_file(path), path.string());
  try {
    return rasterize_table(table, durations, classes, hop_s, model_id);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

// Class order when no ground truth is available: the configured order, else
// the header of the first score file found.
std::vector<std::string> infer_classes(const ToolkitConfig& cfg, const fs::path& scores) {
  if (!cfg.classes.empty()) return cfg.classes;
  fs::path first;
  if (fs::is_directory(scores)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(scores))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError(scores.string(), 0, "no score files");
    first = files.front();
  } else {
    throw ParseError(scores.string(), 0, "class order unknown: pass --gt or set 'classes' in the config");
  }
  const std::string text = read_text_file(first);
  std::vector<std::string> names = split_fields(text.substr(0, text.find('\n')), ',');
  for (auto& n : names) {
    while (!n.empty() && (n.front() == ' ' || n.front() == '\t')) n.erase(n.begin());
    while (!n.empty() && (n.back() == ' ' || n.back() == '\t')) n.pop_back();
  }
  return names;
}

std::optional<WindowConfig> load_windows(const std::string& path, const std::vector<std::string>& classes,
                                         RunRecord& rec) {
  if (path.empty()) return std::nullopt;
  rec.add_input(path);
  return parse_window_csv(read_text_file(path), classes, path);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  CommonOptions common;
  std::string gt, durations, scores, out, roc, windows;
};

int cmd_evaluate(const EvaluateOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  RunRecord rec("evaluate", argv);
  const ToolkitConfig cfg = load_config(o.common, rec);
  const Dataset ds = load_dataset(o.gt, o.durations, cfg, rec);
  for (const auto& name : ds.class_names)
    if (name == "overall") throw ParseError(o.gt, 0, "class name 'overall' is reserved");
  ScoreBundle scores = load_scores(o.scores, ds.class_names, cfg.hop_s, ds.durations, model_name_for(o.scores), rec);
  if (auto windows = load_windows(o.windows, ds.class_names, rec)) scores = apply_pipeline(scores, *windows);

  std::map<std::string, PsdsResult> results;
  for (const std::string profile : {"psds1", "psds2"}) {
    PsdsEvaluator evaluator(ds, cfg.thresholds, cfg.profile(profile), o.common.jobs);
    results[profile] = evaluator.evaluate(scores);
  }
  const auto& r1 = results.at("psds1");
  const auto& r2 = results.at("psds2");

  std::string csv = "class,psds1,psds2\n";
  for (std::size_t c = 0; c < ds.num_classes(); ++c)
    csv += ds.class_names[c] + ',' + format_fixed(r1.per_class[c], 6) + ',' + format_fixed(r2.per_class[c], 6) + '\n';
  csv += "overall," + format_fixed(r1.overall, 6) + ',' + format_fixed(r2.overall, 6) + '\n';
  rec.write_output(o.out, csv);

  if (!o.roc.empty()) {
    const auto& r = results.at(o.common.profile);
    json roc;
    roc["profile"] = o.common.profile;
    roc["params"] = params_json(cfg.profile(o.common.profile));
    roc["overall"] = r.overall;
    roc["classes"] = json::array();
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
      json steps = json::array();
      for (const auto& s : r.roc.steps[c]) steps.push_back({s.efpr, s.tp_ratio});
      roc["classes"].push_back(
          {{"name", ds.class_names[c]}, {"active", static_cast<bool>(r.roc.active[c])}, {"psds", r.per_class[c]},
           {"steps", steps}});
    }
    rec.write_output(o.roc, roc.dump(2) + "\n");
  }
  rec.write_manifest(manifest_path_for(o.common.manifest, o.out));
  out << "PSDS1 " << format_fixed(r1.overall, 6) << "  PSDS2 " << format_fixed(r2.overall, 6) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------------- fuse

struct FuseOptions {
  CommonOptions common;
  std::string gt, durations, weights, weights_out, windows, out_dir, model_id = "fused";
  std::vector<std::string> scores, model_ids;
};

int cmd_fuse(const FuseOptions& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  RunRecord rec("fuse", argv);
  const ToolkitConfig cfg = load_config(o.common, rec);
  if (o.weights.empty() && o.gt.empty() && o.scores.size() > 1)
    throw std::invalid_argument("fuse needs either --weights or --gt/--durations to derive weights");
  if (!o.gt.empty() && o.durations.empty()) throw std::invalid_argument("--gt requires --durations");

  std::optional<Dataset> ds;
  std::map<std::string, double> durations;
  if (!o.gt.empty()) {
    ds = load_dataset(o.gt, o.durations, cfg, rec);
    durations = ds->durations;
  } else if (!o.durations.empty()) {
    rec.add_input(o.durations);
    durations = parse_durations(read_text_file(o.durations), o.durations);
  }
  const std::vector<std::string> classes = ds ? ds->class_names : infer_classes(cfg, o.scores.front());

  std::vector<std::string> ids = o.model_ids;
  if (!ids.empty() && ids.size() != o.scores.size())
    throw std::invalid_argument("--model-id must be given once per --scores");
  if (ids.empty())
    for (const auto& s : o.scores) ids.push_back(model_name_for(s));
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
    throw std::invalid_argument("model ids are not unique; name them with --model-id");

  std::vector<ScoreBundle> bundles;
  for (std::size_t i = 0; i < o.scores.size(); ++i)
    bundles.push_back(load_scores(o.scores[i], classes, cfg.hop_s, durations, ids[i], rec));

  FusionWeights weights;
  if (!o.weights.empty()) {
    rec.add_input(o.weights);
    weights = parse_weights_csv(read_text_file(o.weights), ids, classes, o.weights);
  } else if (!ds) {
    weights = compute_weights({std::vector<double>(classes.size(), 1.0)}, ids, classes);
  } else {
    std::vector<std::vector<double>> psds;
    for (const auto& b : bundles) {
      PsdsEvaluator evaluator(*ds, cfg.thresholds, cfg.profile(o.common.profile), o.common.jobs);
      psds.push_back(evaluator.evaluate(b).per_class);
    }
    weights = compute_weights(psds, ids, classes);
    for (auto c : weights.uniform_fallback)
      err << "warning: no model scores above zero on class '" << classes[c] << "'; using uniform weights\n";
  }

  ScoreBundle fused = fuse(bundles, weights, o.model_id);
  if (auto windows = load_windows(o.windows, classes, rec)) fused = apply_pipeline(fused, *windows);
  for (const auto& [clip, grid] : fused.grids) {
    try {
      grid.validate();
    } catch (const std::invalid_argument& e) {
      throw InternalError("fused grid of clip '" + clip + "': " + e.what());
    }
  }

  save_frame_scores(fused, o.out_dir);
  for (const auto& [clip, grid] : fused.grids) rec.record_output(fs::path(o.out_dir) / (clip + ".csv"));
  const fs::path weights_out =
      o.weights_out.empty() ? fs::path(strip_slashes(o.out_dir) + ".weights.csv") : fs::path(o.weights_out);
  rec.write_output(weights_out, write_weights_csv(weights));
  rec.write_manifest(manifest_path_for(o.common.manifest, o.out_dir));
  out << "fused " << bundles.size() << " model(s) over " << fused.grids.size() << " clip(s)\n";
  return kExitOk;
}

// ------------------------------------------------------------ tune-windows

struct TuneOptionsCli {
  CommonOptions common;
  std::string gt, durations, scores, out;
  int search_max = 0;
  bool separate_mean = false;
};

int cmd_tune(const TuneOptionsCli& o, const std::vector<std::string>& argv, std::ostream& out) {
  RunRecord rec("tune-windows", argv);
  const ToolkitConfig cfg = load_config(o.common, rec);
  const Dataset ds = load_dataset(o.gt, o.durations, cfg, rec);
  const ScoreBundle scores =
      load_scores(o.scores, ds.class_names, cfg.hop_s, ds.durations, model_name_for(o.scores), rec);

  TuneOptions options;
  options.search_max = o.search_max > 0 ? o.search_max : cfg.window_search_max;
  options.tie_mean = cfg.window_tie_mean && !o.separate_mean;
  options.thresholds = cfg.thresholds;
  options.jobs = o.common.jobs;
  rec.settings()["search_max"] = options.search_max;
  rec.settings()["tie_mean"] = options.tie_mean;

  const TuneResult result = tune_windows(ds, scores, cfg.profile(o.common.profile), options);
  for (std::size_t c = 0; c < ds.num_classes(); ++c)
    if (result.chosen_objective[c] < result.baseline_objective[c])
      throw InternalError("tuned objective below baseline for class '" + ds.class_names[c] + "'");
  rec.write_output(o.out, write_window_csv(result.config, ds.class_names));
  rec.write_manifest(manifest_path_for(o.common.manifest, o.out));
  for (std::size_t c = 0; c < ds.num_classes(); ++c)
    out << ds.class_names[c] << ": median " << result.config.median_len[c] << ", mean "
        << result.config.mean_len[c] << ", objective " << format_shortest(result.baseline_objective[c]) << " -> "
        << format_shortest(result.chosen_objective[c]) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- match-loss

struct MatchLossOptions {
  CommonOptions common;
  std::string gt, durations, predictions, tag_scores, out;
};

int cmd_match_loss(const MatchLossOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  RunRecord rec("match-loss", argv);
  const ToolkitConfig cfg = load_config(o.common, rec);
  const Dataset ds = load_dataset(o.gt, o.durations, cfg, rec);
  rec.add_input(o.predictions);
  const auto preds = parse_predictions(read_text_file(o.predictions), ds.class_names, o.predictions);
  std::map<std::string, ClipLabel> tag_scores;
  if (!o.tag_scores.empty()) {
    rec.add_input(o.tag_scores);
    tag_scores = parse_tags(read_text_file(o.tag_scores), ds.class_names, o.tag_scores);
  }

  std::set<std::string> clips;
  for (const auto& [clip, set] : ds.ground_truth) clips.insert(clip);
  for (const auto& [clip, p] : preds) {
    if (!ds.durations.count(clip)) throw ParseError(o.predictions, 0, "clip '" + clip + "' has no duration");
    clips.insert(clip);
  }

  std::string csv = "clip,n_gt,n_pred,match_cost,localization,classification,no_object,tagging\n";
  double sums[5] = {0, 0, 0, 0, 0};
  for (const auto& clip : clips) {
    const EventSet& gt = ds.ground_truth.at(clip);
    std::vector<BoxTarget> targets;
    for (const auto& e : gt.events)
      targets.push_back({e.class_id, interval_to_box(e.onset_s, e.offset_s, gt.clip_duration_s)});
    static const std::vector<Prediction> kNone;
    const auto it = preds.find(clip);
    const auto& p = it == preds.end() ? kNone : it->second;
    if (targets.size() > p.size())
      throw ParseError(o.predictions, 0,
                       "clip '" + clip + "' has " + std::to_string(targets.size()) + " ground-truth events but only " +
                           std::to_string(p.size()) + " predictions");
    MatchResult match;
    if (!targets.empty()) match = hungarian_assign(matching_cost(targets, p, cfg.loss));
    const double vals[4] = {match.total_cost, localization_loss(targets, p, match, cfg.loss),
                            classification_loss(targets, p, match), no_object_loss(p, match, cfg.loss)};
    csv += clip + ',' + std::to_string(targets.size()) + ',' + std::to_string(p.size());
    for (int k = 0; k < 4; ++k) {
      csv += ',' + format_fixed(vals[k], 6);
      sums[k] += vals[k];
    }
    csv += ',';
    if (!o.tag_scores.empty()) {
      const auto tag_it = tag_scores.find(clip);
      if (tag_it == tag_scores.end()) throw ParseError(o.tag_scores, 0, "no tag scores for clip '" + clip + "'");
      std::vector<double> labels(ds.num_classes(), 0.0);
      for (const auto& e : gt.events) labels[static_cast<std::size_t>(e.class_id)] = 1.0;
      const double tl = tagging_loss(labels, tag_it->second.tags);
      csv += format_fixed(tl, 6);
      sums[4] += tl;
    }
    csv += '\n';
  }
  csv += "total,,";
  for (int k = 0; k < 4; ++k) csv += ',' + format_fixed(sums[k], 6);
  csv += ',' + (o.tag_scores.empty() ? std::string() : format_fixed(sums[4], 6)) + '\n';
  rec.write_output(o.out, csv);
  rec.write_manifest(manifest_path_for(o.common.manifest, o.out));
  out << "matched " << clips.size() << " clip(s)\n";
  return kExitOk;
}

// ------------------------------------------------------------ simulate-ssl

struct SimulateOptions {
  std::string report, manifest;
  ssl::SslConfig cfg;
  bool no_mixup = false, no_focal = false, no_asym_aug = false, no_ema = false;
};

int cmd_simulate(const SimulateOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  RunRecord rec("simulate-ssl", argv);
  ssl::SslConfig cfg = o.cfg;
  cfg.use_mixup = !o.no_mixup;
  cfg.use_focal = !o.no_focal;
  cfg.use_asym_aug = !o.no_asym_aug;
  cfg.use_ema = !o.no_ema;
  cfg.validate();
  const ssl::SynthSpec spec;
  const ssl::AugmentSpec aug;
  json& s = rec.settings();
  s["seed"] = cfg.seed;
  s["epochs"] = cfg.epochs;
  s["burn_in_epochs"] = cfg.burn_in_epochs;
  s["lr"] = cfg.lr;
  s["ema_gamma"] = cfg.ema_gamma;
  s["mixup_beta"] = cfg.mixup_beta;
  s["focal_gamma"] = cfg.focal_gamma;
  s["focal_alpha"] = cfg.focal_alpha;
  s["pseudo_threshold"] = cfg.pseudo_threshold;
  s["use_mixup"] = cfg.use_mixup;
  s["use_focal"] = cfg.use_focal;
  s["use_asym_aug"] = cfg.use_asym_aug;
  s["use_ema"] = cfg.use_ema;

  const auto report = ssl::run_simulation(spec, cfg, aug);
  rec.write_output(o.report, ssl::write_report_csv(report));
  rec.write_manifest(manifest_path_for(o.manifest, o.report));
  out << "frame F1: burn-in " << format_fixed(report.burn_in_f1, 4) << ", student "
      << format_fixed(report.student_f1, 4) << ", teacher " << format_fixed(report.teacher_f1, 4) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ replay

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  json m;
  try {
    m = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw ParseError(manifest_path, 0, std::string("not a valid manifest: ") + e.what());
  }
  if (!m.contains("argv") || !m.contains("inputs") || !m.contains("outputs") || m.value("tool", "") != "sedkit")
    throw ParseError(manifest_path, 0, "not a sedkit run manifest");
  const auto argv = m.at("argv").get<std::vector<std::string>>();
  if (argv.empty() || argv.front() == "replay") throw ParseError(manifest_path, 0, "manifest has no replayable command");
  for (const auto& in : m.at("inputs")) {
    const auto path = in.at("path").get<std::string>();
    if (!fs::exists(path)) throw ParseError(manifest_path, 0, "input '" + path + "' is missing");
    if (sha256_file(path) != in.at("sha256").get<std::string>())
      throw ParseError(manifest_path, 0, "input '" + path + "' changed since the recorded run");
  }
  const int code = dispatch(argv, out, err);
  if (code != kExitOk) return code;
  std::size_t differing = 0;
  for (const auto& o : m.at("outputs")) {
    const auto path = o.at("path").get<std::string>();
    if (!fs::exists(path) || sha256_file(path) != o.at("sha256").get<std::string>()) {
      err << "output '" << path << "' differs from the recorded run\n";
      ++differing;
    }
  }
  if (differing) return kExitInternal;
  out << "replay: " << m.at("outputs").size() << " output(s) byte-identical\n";
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sound event detection evaluation, fusion and post-processing toolkit", "sedkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "PSDS1/PSDS2 per class and overall");
  add_common(evaluate, ev.common, true);
  evaluate->add_option("--gt", ev.gt, "ground-truth TSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--durations", ev.durations, "durations TSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--scores", ev.scores, "frame-score directory or detection TSV")->required();
  evaluate->add_option("--windows", ev.windows, "window CSV applied before scoring")->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "output CSV (class,psds1,psds2)")->required();
  evaluate->add_option("--roc", ev.roc, "ROC JSON for the selected profile");

  FuseOptions fu;
  auto* fuse_cmd = app.add_subcommand("fuse", "class-wise weighted fusion of several models");
  add_common(fuse_cmd, fu.common, true);
  fuse_cmd->add_option("--scores", fu.scores, "score directory or detection TSV, once per model")->required();
  fuse_cmd->add_option("--model-id", fu.model_ids, "model name, once per --scores");
  fuse_cmd->add_option("--gt", fu.gt, "dev ground truth used to derive weights")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--durations", fu.durations, "durations TSV")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--weights", fu.weights, "weights CSV (model,class,weight)")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--windows", fu.windows, "window CSV applied after fusion")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--out-dir", fu.out_dir, "fused score directory")->required();
  fuse_cmd->add_option("--weights-out", fu.weights_out, "weights CSV output (default: <out-dir>.weights.csv)");
  fuse_cmd->add_option("--fused-id", fu.model_id, "name of the fused model");

  TuneOptionsCli tu;
  auto* tune = app.add_subcommand("tune-windows", "per-class median/mean window search");
  add_common(tune, tu.common, true);
  tune->add_option("--gt", tu.gt, "ground-truth TSV")->required()->check(CLI::ExistingFile);
  tune->add_option("--durations", tu.durations, "durations TSV")->required()->check(CLI::ExistingFile);
  tune->add_option("--scores", tu.scores, "frame-score directory or detection TSV")->required();
  tune->add_option("--out", tu.out, "output window CSV")->required();
  tune->add_option("--search-max", tu.search_max, "largest window length")->check(CLI::PositiveNumber);
  tune->add_flag("--separate-mean", tu.separate_mean, "search the mean window separately");

  MatchLossOptions ml;
  auto* match = app.add_subcommand("match-loss", "Hungarian matching and set-prediction losses");
  add_common(match, ml.common, false);
  match->add_option("--gt", ml.gt, "ground-truth TSV")->required()->check(CLI::ExistingFile);
  match->add_option("--durations", ml.durations, "durations TSV")->required()->check(CLI::ExistingFile);
  match->add_option("--predictions", ml.predictions, "predictions TSV")->required()->check(CLI::ExistingFile);
  match->add_option("--tag-scores", ml.tag_scores, "predicted clip tag probabilities TSV")->check(CLI::ExistingFile);
  match->add_option("--out", ml.out, "loss report CSV")->required();

  SimulateOptions si;
  auto* sim = app.add_subcommand("simulate-ssl", "teacher-guided semi-supervised training on synthetic data");
  sim->add_option("--seed", si.cfg.seed, "random seed");
  sim->add_option("--epochs", si.cfg.epochs, "teacher-guided epochs")->check(CLI::NonNegativeNumber);
  sim->add_option("--burn-in-epochs", si.cfg.burn_in_epochs, "supervised burn-in epochs")->check(CLI::NonNegativeNumber);
  sim->add_option("--lr", si.cfg.lr, "learning rate");
  sim->add_option("--ema-gamma", si.cfg.ema_gamma, "teacher EMA ratio");
  sim->add_option("--mixup-beta", si.cfg.mixup_beta, "mixup Beta parameter");
  sim->add_option("--focal-gamma", si.cfg.focal_gamma, "focal loss gamma");
  sim->add_option("--focal-alpha", si.cfg.focal_alpha, "focal loss alpha");
  sim->add_option("--pseudo-threshold", si.cfg.pseudo_threshold, "pseudo-label threshold");
  sim->add_flag("--no-mixup", si.no_mixup, "concatenate instead of mixing");
  sim->add_flag("--no-focal", si.no_focal, "half binary cross-entropy instead of focal loss");
  sim->add_flag("--no-asym-aug", si.no_asym_aug, "weak augmentation for the student too");
  sim->add_flag("--no-ema", si.no_ema, "teacher follows the student directly");
  sim->add_option("--report", si.report, "per-epoch report CSV")->required();
  sim->add_option("--manifest", si.manifest, "run manifest path (default: <report>.manifest.json)");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "re-run a manifest and verify identical outputs");
  replay->add_option("manifest", replay_path, "run manifest")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  if (*evaluate) return cmd_evaluate(ev, args, out);
  if (*fuse_cmd) return cmd_fuse(fu, args, out, err);
  if (*tune) return cmd_tune(tu, args, out);
  if (*match) return cmd_match_loss(ml, args, out);
  if (*sim) return cmd_simulate(si, args, out);
  if (*replay) return cmd_replay(replay_path, out, err);
  throw InternalError("no subcommand dispatched");
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace sedkit::cli
