// localmot: evaluate trackers with local (windowed) tracking metrics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "localmot/analysis.hpp"
#include "localmot/error.hpp"
#include "localmot/evaluate.hpp"
#include "localmot/synth.hpp"

namespace {

using namespace localmot;

struct InputArgs {
  std::string gt;
  std::vector<std::string> preds;
  std::string horizons;
  std::optional<double> fps;
  double iou = 0.5;
  std::string classes = "1";
  bool split_classes = false;
  double min_visibility = 0.0;
  std::string score = "";
  bool decompose = false;
  bool per_sequence = false;
  std::string format = "json";
  std::string out;
  int jobs = 1;
};

void add_input_options(CLI::App* app, InputArgs& a, bool require_inputs) {
  auto* gt = app->add_option("--gt", a.gt, "Ground truth: gt.txt, a sequence dir, or a dir of sequences");
  auto* pred = app->add_option("--pred", a.preds, "Tracker results as name=path (repeatable)");
  if (require_inputs) {
    gt->required();
    pred->required();
  }
  app->add_option("--horizons", a.horizons, "Comma-separated horizons: <int>f, <real>s, 0, strict");
  app->add_option("--fps", a.fps, "Frame rate, overriding seqinfo.ini")->check(CLI::PositiveNumber);
  app->add_option("--iou-thresh", a.iou, "IOU threshold for a match")->check(CLI::Range(0.0, 1.0));
  app->add_option("--classes", a.classes, "Comma-separated gt classes to keep");
  app->add_flag("--split-classes", a.split_classes, "Evaluate each class as its own sequence");
  app->add_option("--min-visibility", a.min_visibility, "Drop gt boxes below this visibility");
  app->add_option("--score-thresh", a.score, "Prediction score threshold: <v>, class=v,..., or auto");
  app->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", a.out, "Output file (default stdout)");
}

std::set<int> parse_classes(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int c = std::stoi(item, &used);
    if (used != item.size()) throw ContractError("invalid class '" + item + "'");
    out.insert(c);
  }
  if (out.empty()) throw ContractError("no classes given");
  return out;
}

EvalOptions make_options(const InputArgs& a, const std::string& default_horizons) {
  EvalOptions o;
  o.horizons = a.horizons.empty()
                   ? (default_horizons.empty() ? localmot::default_horizons()
                                               : parse_horizons(default_horizons))
                   : parse_horizons(a.horizons);
  o.ingest.iou_threshold = a.iou;
  o.ingest.gt_classes = parse_classes(a.classes);
  o.ingest.min_visibility = a.min_visibility;
  if (!a.score.empty()) o.ingest.score_threshold = ScoreThreshold::parse(a.score);
  o.ingest.fps_override = a.fps;
  o.split_classes = a.split_classes;
  o.decompose = a.decompose;
  o.per_sequence = a.per_sequence;
  o.jobs = a.jobs;
  return o;
}

RunResult run_inputs(const InputArgs& a, const EvalOptions& o) {
  const auto gt = load_ground_truth(a.gt);
  std::vector<TrackerSource> trackers;
  for (const std::string& arg : a.preds) {
    const auto eq = arg.find('=');
    TrackerSource t;
    const std::filesystem::path path = eq == std::string::npos ? arg : arg.substr(eq + 1);
    t.tracker = eq == std::string::npos ? path.filename().string() : arg.substr(0, eq);
    if (t.tracker.empty()) throw ContractError("empty tracker name in '" + arg + "'");
    t.sequences = load_predictions(path);
    trackers.push_back(std::move(t));
  }
  return run(gt, trackers, o);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void report_failures(const RunResult& r) {
  for (const auto& t : r.trackers) {
    for (const auto& s : t.sequences) {
      if (s.error) std::cerr << "localmot: " << t.tracker << "/" << s.sequence << ": " << *s.error << "\n";
    }
  }
}

nlohmann::json expected_json(const std::vector<Fixture>& fixtures) {
  nlohmann::json out = nlohmann::json::object();
  for (const Fixture& f : fixtures) out[f.name] = f.expected;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local tracking metrics (LIDF1, ALTA) with error decomposition"};
  app.set_version_flag("--version", LOCALMOT_VERSION);
  app.require_subcommand(1);

  InputArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate trackers and write a report");
  add_input_options(eval, eval_args, true);
  eval->add_flag("--decompose", eval_args.decompose, "Add the error decomposition per horizon");
  eval->add_flag("--per-sequence", eval_args.per_sequence, "Include per-sequence results");
  eval->add_option("--format", eval_args.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  InputArgs cmp_args;
  std::string report_path, sort_key = "mean_alta";
  auto* compare = app.add_subcommand("compare", "Rank trackers and correlate metrics");
  add_input_options(compare, cmp_args, false);
  compare->add_option("--report", report_path, "Existing eval JSON report instead of --gt/--pred");
  compare->add_option("--sort-key", sort_key, "Metric that orders the table");
  compare->add_option("--format", cmp_args.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string synth_out;
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "Write the synthetic fixture catalogue in MOT layout");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", seed, "Seed for randomised fixtures");

  InputArgs curve_args;
  auto* curve = app.add_subcommand("curve", "Horizon curves as CSV");
  add_input_options(curve, curve_args, true);
  curve->add_flag("--per-sequence", curve_args.per_sequence, "Include per-sequence curves");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      const RunResult r = run_inputs(eval_args, make_options(eval_args, ""));
      write_output(eval_args.out, eval_args.format == "csv" ? report_csv(r) : report_json(r));
      report_failures(r);
      return r.ok() ? 0 : 1;
    }
    if (curve->parsed()) {
      const RunResult r = run_inputs(curve_args, make_options(curve_args, ""));
      write_output(curve_args.out, curves_csv(r, curve_args.per_sequence));
      report_failures(r);
      return r.ok() ? 0 : 1;
    }
    if (compare->parsed()) {
      TrackerScores scores;
      bool ok = true;
      if (!report_path.empty()) {
        std::ifstream in(report_path);
        if (!in) throw Error("cannot open " + report_path);
        std::stringstream text;
        text << in.rdbuf();
        scores = tracker_scores_from_report(text.str());
      } else {
        if (cmp_args.gt.empty() || cmp_args.preds.empty()) {
          throw ContractError("compare needs --report or both --gt and --pred");
        }
        const RunResult r = run_inputs(cmp_args, make_options(cmp_args, "1s,5s,strict"));
        report_failures(r);
        ok = r.ok();
        scores = tracker_scores(r);
      }
      const RankTable table = rank_table(scores, sort_key, lower_is_better_metrics());
      write_output(cmp_args.out, cmp_args.format == "csv"
                                     ? compare_csv(table)
                                     : compare_json(table, kendall_matrix(scores)));
      return ok ? 0 : 1;
    }
    if (synth->parsed()) {
      const auto fixtures = fixture_catalog(seed);
      for (const Fixture& f : fixtures) write_fixture(synth_out, f);
      write_output((std::filesystem::path(synth_out) / "expected.json").string(),
                   expected_json(fixtures).dump(2) + "\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "localmot: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
