#include "localmot/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "localmot/error.hpp"

namespace localmot {

using nlohmann::json;

std::vector<Horizon> default_horizons() {
  return {Horizon::frames(0),    Horizon::seconds(0.2), Horizon::seconds(0.5),
          Horizon::seconds(1.0), Horizon::seconds(2.0), Horizon::seconds(5.0),
          Horizon::strict()};
}

std::vector<Horizon> parse_horizons(std::string_view text) {
  std::vector<Horizon> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    std::string_view item = text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(Horizon::parse(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ContractError("at least one horizon is required");
  return out;
}

bool RunResult::ok() const noexcept {
  for (const auto& t : trackers) {
    if (t.combined.num_failed > 0) return false;
  }
  return true;
}

namespace {

// Runs fn(0..n-1) on up to `jobs` threads. Each index writes only its own
// slot, so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Prepared {
  std::unique_ptr<OverlapSeries> series;
  std::unique_ptr<FrameCorrespondence> correspondence;
};

void evaluate_strict_part(const Sequence& seq, const EvalOptions& options,
                          SequenceResult& out, Prepared& prep) {
  prep.series = std::make_unique<OverlapSeries>(
      OverlapSeries::build(seq, options.ingest.iou_threshold));
  out.num_frames = seq.num_frames;
  out.fps = seq.fps;
  out.num_gt_tracks = seq.gt.size();
  out.num_pred_tracks = seq.pred.size();
  out.strict = evaluate_strict(*prep.series);
  out.radii.clear();
  for (const Horizon& h : options.horizons) out.radii.push_back(h.resolve(seq.fps));
  out.local.assign(options.horizons.size(), {});
  if (options.decompose) {
    prep.correspondence =
        std::make_unique<FrameCorrespondence>(FrameCorrespondence::build(*prep.series));
    out.decomposition.assign(options.horizons.size(), {});
  }
}

void evaluate_horizon_part(const EvalOptions& options, SequenceResult& out,
                           const Prepared& prep, std::size_t h) {
  out.local[h] = evaluate_local(*prep.series, out.radii[h]);
  if (options.decompose) {
    DecompositionReport report = decompose_at_horizon(*prep.correspondence, out.radii[h]);
    out.decomposition[h] = std::move(report);
  }
}

}  // namespace

SequenceResult evaluate_sequence(const Sequence& seq, const EvalOptions& options,
                                 std::string tracker) {
  SequenceResult out;
  out.tracker = std::move(tracker);
  out.sequence = seq.name;
  Prepared prep;
  evaluate_strict_part(seq, options, out, prep);
  for (std::size_t h = 0; h < options.horizons.size(); ++h) {
    evaluate_horizon_part(options, out, prep, h);
  }
  return out;
}

CombinedResult combine_results(const std::vector<SequenceResult>& results,
                               std::size_t num_horizons) {
  CombinedResult c;
  c.local.assign(num_horizons, {});
  bool any_decomposition = false;
  for (const auto& r : results) any_decomposition |= !r.decomposition.empty();
  if (any_decomposition) c.decomposition.assign(num_horizons, {});

  std::int64_t fn = 0, fp = 0, sw = 0, tp = 0, n = 0;
  for (const SequenceResult& r : results) {
    if (r.error) {
      ++c.num_failed;
      continue;
    }
    ++c.num_sequences;
    const StrictMetrics& s = r.strict;
    c.det_f1 += s.detection.accumulator;
    c.idf1 += s.identity.accumulator;
    c.idr += s.identity.recall;
    c.idp += s.identity.precision;
    c.ata += s.track.accumulator;
    c.atr += s.track.recall;
    c.atp += s.track.precision;
    fn += s.mota.det_fn;
    fp += s.mota.det_fp;
    sw += s.mota.id_switches;
    tp += s.mota.det_tp;
    n += s.mota.num_gt_boxes;
    for (std::size_t h = 0; h < num_horizons; ++h) {
      c.local[h].lidf1 += r.local[h].lidf1;
      c.local[h].alta += r.local[h].alta;
      if (any_decomposition && h < r.decomposition.size()) {
        c.decomposition[h] += r.decomposition[h];
      }
    }
  }
  c.mota.det_fn = fn;
  c.mota.det_fp = fp;
  c.mota.id_switches = sw;
  c.mota.det_tp = tp;
  c.mota.num_gt_boxes = n;
  c.mota.mota = MotaResult::from_counts(fn, fp, sw, n);
  return c;
}

RunResult evaluate(std::vector<TrackerSequences> inputs, const EvalOptions& options) {
  if (options.horizons.empty()) throw ContractError("at least one horizon is required");
  options.ingest.validate();

  std::sort(inputs.begin(), inputs.end(),
            [](const auto& a, const auto& b) { return a.tracker < b.tracker; });
  for (std::size_t k = 1; k < inputs.size(); ++k) {
    if (inputs[k].tracker == inputs[k - 1].tracker) {
      throw ContractError("duplicate tracker name '" + inputs[k].tracker + "'");
    }
  }

  struct Job {
    const Sequence* seq;
    SequenceResult* out;
  };
  RunResult result;
  result.options = options;
  result.trackers.resize(inputs.size());
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    TrackerSequences& in = inputs[k];
    TrackerResult& tr = result.trackers[k];
    tr.tracker = in.tracker;
    std::sort(in.sequences.begin(), in.sequences.end(),
              [](const Sequence& a, const Sequence& b) { return a.name < b.name; });
    tr.sequences.resize(in.sequences.size());
    for (std::size_t s = 0; s < in.sequences.size(); ++s) {
      tr.sequences[s].tracker = in.tracker;
      tr.sequences[s].sequence = in.sequences[s].name;
    }
    for (auto& [name, message] : in.errors) {
      SequenceResult failed;
      failed.tracker = in.tracker;
      failed.sequence = name;
      failed.error = message;
      tr.sequences.push_back(std::move(failed));
    }
    std::stable_sort(tr.sequences.begin(), tr.sequences.end(),
                     [](const auto& a, const auto& b) { return a.sequence < b.sequence; });
    for (const Sequence& seq : in.sequences) {
      auto it = std::find_if(tr.sequences.begin(), tr.sequences.end(), [&](const auto& r) {
        return r.sequence == seq.name && !r.error;
      });
      jobs.push_back({&seq, &*it});
    }
  }

  std::vector<Prepared> prepared(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t k) {
    try {
      evaluate_strict_part(*jobs[k].seq, options, *jobs[k].out, prepared[k]);
    } catch (const std::exception& e) {
      jobs[k].out->error = e.what();
    }
  });

  const std::size_t H = options.horizons.size();
  std::vector<std::optional<std::string>> horizon_errors(jobs.size() * H);
  parallel_for(jobs.size() * H, options.jobs, [&](std::size_t k) {
    const std::size_t job = k / H, h = k % H;
    if (jobs[job].out->error) return;
    try {
      evaluate_horizon_part(options, *jobs[job].out, prepared[job], h);
    } catch (const std::exception& e) {
      horizon_errors[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < horizon_errors.size(); ++k) {
    SequenceResult& out = *jobs[k / H].out;
    if (horizon_errors[k] && !out.error) out.error = *horizon_errors[k];
  }

  for (TrackerResult& tr : result.trackers) {
    tr.combined = combine_results(tr.sequences, H);
  }
  return result;
}

std::map<std::string, SequenceSource> load_ground_truth(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::map<std::string, SequenceSource> out;
  const auto load_dir = [&](const fs::path& dir) {
    SequenceSource src;
    src.name = dir.filename().string();
    src.entries = read_mot_file(dir / "gt" / "gt.txt");
    if (fs::exists(dir / "seqinfo.ini")) src.info = read_seqinfo(dir / "seqinfo.ini");
    out.emplace(src.name, std::move(src));
  };
  if (!fs::exists(path)) throw Error("no such file or directory: " + path.string());
  if (fs::is_regular_file(path)) {
    SequenceSource src;
    // <seq>/gt/gt.txt names the sequence after <seq>; other files after their stem.
    const fs::path parent = path.parent_path();
    const bool mot_layout = path.filename() == "gt.txt" && parent.filename() == "gt";
    src.name = mot_layout ? parent.parent_path().filename().string() : path.stem().string();
    src.entries = read_mot_file(path);
    if (mot_layout && fs::exists(parent.parent_path() / "seqinfo.ini")) {
      src.info = read_seqinfo(parent.parent_path() / "seqinfo.ini");
    } else if (fs::exists(parent / "seqinfo.ini")) {
      src.info = read_seqinfo(parent / "seqinfo.ini");
    }
    out.emplace(src.name, std::move(src));
    return out;
  }
  if (fs::exists(path / "gt" / "gt.txt")) {
    load_dir(path);
    return out;
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory() && fs::exists(entry.path() / "gt" / "gt.txt")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) load_dir(dir);
  if (out.empty()) throw Error("no ground-truth sequences under " + path.string());
  return out;
}

std::map<std::string, std::vector<RawEntry>> load_predictions(
    const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::map<std::string, std::vector<RawEntry>> out;
  if (!fs::exists(path)) throw Error("no such file or directory: " + path.string());
  if (fs::is_regular_file(path)) {
    out.emplace(path.stem().string(), read_mot_file(path));
    return out;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) out.emplace(file.stem().string(), read_mot_file(file));
  return out;
}

namespace {

Frame extent(std::span<const RawEntry> a, std::span<const RawEntry> b) {
  Frame t = 0;
  for (const auto& e : a) t = std::max(t, e.frame);
  for (const auto& e : b) t = std::max(t, e.frame);
  return t;
}

}  // namespace

RunResult run(const std::map<std::string, SequenceSource>& gt,
              const std::vector<TrackerSource>& trackers, const EvalOptions& options) {
  options.ingest.validate();
  std::vector<std::optional<int>> classes;
  if (options.split_classes) {
    for (int c : options.ingest.gt_classes) classes.emplace_back(c);
  } else {
    classes.emplace_back(std::nullopt);
  }

  std::vector<TrackerSequences> inputs;
  std::map<std::string, std::map<std::string, double>> thresholds;
  for (const TrackerSource& tracker : trackers) {
    TrackerSequences in;
    in.tracker = tracker.tracker;
    std::vector<std::string> names;
    for (const auto& [name, src] : gt) {
      if (tracker.sequences.count(name)) {
        names.push_back(name);
      } else {
        in.errors.emplace_back(name, "no predictions for sequence '" + name + "'");
      }
    }
    for (const auto& [name, entries] : tracker.sequences) {
      if (!gt.count(name)) {
        in.errors.emplace_back(name, "no ground truth for sequence '" + name + "'");
      }
    }

    for (const std::optional<int>& cls : classes) {
      IngestConfig cfg = options.ingest;
      const std::string class_key = cls ? std::to_string(*cls) : std::string("all");
      if (cfg.score_threshold.automatic) {
        std::vector<ThresholdProblem> problems;
        for (const auto& name : names) {
          problems.push_back({gt.at(name).entries, tracker.sequences.at(name)});
        }
        const auto candidates = candidate_thresholds(problems, cls);
        const double tau = candidates.empty()
                               ? -std::numeric_limits<double>::infinity()
                               : select_score_threshold(problems, cfg, candidates, cls);
        cfg.score_threshold = ScoreThreshold::fixed(tau);
        thresholds[tracker.tracker][class_key] = tau;
      }
      for (const auto& name : names) {
        const SequenceSource& src = gt.at(name);
        const auto& pred = tracker.sequences.at(name);
        const std::string seq_name = cls ? name + "/" + class_key : name;
        try {
          const double fps = options.ingest.fps_override.value_or(src.info.frame_rate.value_or(0.0));
          if (!cfg.num_frames_override) {
            cfg.num_frames_override = src.info.length.value_or(extent(src.entries, pred));
          }
          in.sequences.push_back(build_sequence(seq_name, src.entries, pred, cfg, fps, cls));
          cfg.num_frames_override = options.ingest.num_frames_override;
        } catch (const std::exception& e) {
          cfg.num_frames_override = options.ingest.num_frames_override;
          in.errors.emplace_back(seq_name, e.what());
        }
      }
    }
    inputs.push_back(std::move(in));
  }

  RunResult result = evaluate(std::move(inputs), options);
  result.score_thresholds = std::move(thresholds);
  return result;
}

namespace {

double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

json accumulator_json(const MetricAccumulator& a) {
  return json{{"value", round6(a.value())},
              {"numerator", a.numerator},
              {"denominator", a.denominator}};
}

json optional_value(const std::optional<double>& v) {
  return v ? json(round6(*v)) : json(nullptr);
}

json radius_json(const std::optional<Frame>& r) {
  return r ? json(*r) : json("strict");
}

json mota_json(const MotaResult& m) {
  const double nsw = m.det_tp > 0 ? static_cast<double>(m.id_switches) / m.det_tp : 0.0;
  return json{{"value", round6(m.mota)},
              {"id_switches", m.id_switches},
              {"det_tp", m.det_tp},
              {"det_fn", m.det_fn},
              {"det_fp", m.det_fp},
              {"num_gt_boxes", m.num_gt_boxes},
              {"normalized_id_switches", round6(nsw)}};
}

json error_masses_json(const ErrorMasses& e) {
  return json{{"det_fn", round6(e.det_fn)},
              {"det_fp", round6(e.det_fp)},
              {"split", round6(e.split)},
              {"merge", round6(e.merge)}};
}

json decomposition_json(const DecompositionReport& d) {
  const OverallDecomposition overall = d.overall();
  return json{
      {"approx_ata", accumulator_json(d.approx_ata)},
      {"approx_atr", accumulator_json(d.approx_atr)},
      {"approx_atp", accumulator_json(d.approx_atp)},
      {"recall", json{{"fn", d.recall.fn},
                      {"split", d.recall.split},
                      {"merge", d.recall.merge},
                      {"union_fp", d.recall.union_fp},
                      {"union_merge", d.recall.union_merge}}},
      {"precision", json{{"fp", d.precision.fp},
                         {"merge", d.precision.merge},
                         {"split", d.precision.split},
                         {"union_fn", d.precision.union_fn},
                         {"union_split", d.precision.union_split}}},
      {"gt_track_weight", d.gt_track_weight},
      {"pred_track_weight", d.pred_track_weight},
      {"masses", error_masses_json(d.overall_masses())},
      {"raw", error_masses_json(overall.raw)},
      {"fractions", error_masses_json(overall.normalised)},
      {"no_error", overall.no_error}};
}

struct MetricsView {
  MetricAccumulator det_f1, idf1, idr, idp, ata, atr, atp;
  MotaResult mota;
  const std::vector<LocalAccumulators>* local;
};

double mean_of(const std::vector<LocalAccumulators>& local, bool alta) {
  if (local.empty()) return 0.0;
  std::vector<double> values;
  for (const auto& l : local) values.push_back(alta ? l.alta.value() : l.lidf1.value());
  return mean_over_horizons(values);
}

json metrics_json(const MetricsView& m, const std::vector<Horizon>& horizons) {
  json out{{"det_f1", accumulator_json(m.det_f1)}, {"idf1", accumulator_json(m.idf1)},
           {"idr", accumulator_json(m.idr)},       {"idp", accumulator_json(m.idp)},
           {"ata", accumulator_json(m.ata)},       {"atr", accumulator_json(m.atr)},
           {"atp", accumulator_json(m.atp)},       {"mota", mota_json(m.mota)}};
  out["association_fraction"] =
      optional_value(association_fraction(m.ata.value(), m.det_f1.value()));
  json alta = json::object(), lidf1 = json::object();
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    alta[horizons[h].label()] = accumulator_json((*m.local)[h].alta);
    lidf1[horizons[h].label()] = accumulator_json((*m.local)[h].lidf1);
  }
  out["alta"] = std::move(alta);
  out["lidf1"] = std::move(lidf1);
  out["mean_alta"] = round6(mean_of(*m.local, true));
  out["mean_lidf1"] = round6(mean_of(*m.local, false));
  return out;
}

MetricsView view(const SequenceResult& r) {
  const StrictMetrics& s = r.strict;
  return {s.detection.accumulator, s.identity.accumulator, s.identity.recall,
          s.identity.precision,    s.track.accumulator,    s.track.recall,
          s.track.precision,       s.mota,                 &r.local};
}

MetricsView view(const CombinedResult& c) {
  return {c.det_f1, c.idf1, c.idr, c.idp, c.ata, c.atr, c.atp, c.mota, &c.local};
}

json config_json(const EvalOptions& o) {
  json horizons = json::array();
  for (const Horizon& h : o.horizons) horizons.push_back(h.label());
  json score;
  if (o.ingest.score_threshold.automatic) {
    score = "auto";
  } else {
    const double v = o.ingest.score_threshold.value;
    json per_class = json::object();
    for (const auto& [c, t] : o.ingest.score_threshold.per_class) per_class[std::to_string(c)] = t;
    score = json{{"default", std::isfinite(v) ? json(v) : json(nullptr)},
                 {"per_class", per_class}};
  }
  json cfg{{"horizons", horizons},
           {"iou_threshold", o.ingest.iou_threshold},
           {"gt_classes", o.ingest.gt_classes},
           {"min_visibility", o.ingest.min_visibility},
           {"score_threshold", score},
           {"split_classes", o.split_classes},
           {"decompose", o.decompose},
           {"per_sequence", o.per_sequence}};
  cfg["fps"] = o.ingest.fps_override ? json(*o.ingest.fps_override) : json(nullptr);
  return cfg;
}

json curve_points(const std::vector<LocalAccumulators>& local,
                  const std::vector<Horizon>& horizons,
                  const std::vector<std::optional<Frame>>* radii, bool alta) {
  json points = json::array();
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    json p = accumulator_json(alta ? local[h].alta : local[h].lidf1);
    p["horizon"] = horizons[h].label();
    if (radii) p["frames"] = radius_json((*radii)[h]);
    points.push_back(std::move(p));
  }
  return points;
}

json build_report(const RunResult& result) {
  const EvalOptions& o = result.options;
  json per_sequence = json::array();
  json combined = json::object();
  json curves = json::array();
  json decomposition = json::object();
  json resolution = json::object();

  for (const TrackerResult& tr : result.trackers) {
    for (const SequenceResult& r : tr.sequences) {
      json entry{{"tracker", r.tracker}, {"sequence", r.sequence}};
      if (r.error) {
        entry["error"] = *r.error;
        per_sequence.push_back(std::move(entry));
        continue;
      }
      json radii = json::object();
      for (std::size_t h = 0; h < o.horizons.size(); ++h) {
        radii[o.horizons[h].label()] = radius_json(r.radii[h]);
      }
      resolution[r.sequence] = json{{"fps", r.fps}, {"radii", radii}};
      if (!o.per_sequence) continue;
      entry["num_frames"] = r.num_frames;
      entry["fps"] = r.fps;
      entry["counts"] = json{{"num_gt_boxes", r.strict.identity.num_gt_boxes},
                             {"num_pred_boxes", r.strict.identity.num_pred_boxes},
                             {"num_gt_tracks", r.num_gt_tracks},
                             {"num_pred_tracks", r.num_pred_tracks}};
      entry["metrics"] = metrics_json(view(r), o.horizons);
      if (o.decompose) {
        json d = json::object();
        for (std::size_t h = 0; h < o.horizons.size(); ++h) {
          d[o.horizons[h].label()] = decomposition_json(r.decomposition[h]);
        }
        entry["decomposition"] = std::move(d);
      }
      per_sequence.push_back(std::move(entry));
    }

    const CombinedResult& c = tr.combined;
    json comb = metrics_json(view(c), o.horizons);
    comb["num_sequences"] = c.num_sequences;
    comb["num_failed"] = c.num_failed;
    combined[tr.tracker] = std::move(comb);
    curves.push_back(json{{"tracker", tr.tracker},
                          {"metric", "alta"},
                          {"points", curve_points(c.local, o.horizons, nullptr, true)}});
    curves.push_back(json{{"tracker", tr.tracker},
                          {"metric", "lidf1"},
                          {"points", curve_points(c.local, o.horizons, nullptr, false)}});
    if (o.decompose) {
      json d = json::object();
      for (std::size_t h = 0; h < o.horizons.size(); ++h) {
        d[o.horizons[h].label()] = decomposition_json(c.decomposition[h]);
      }
      decomposition[tr.tracker] = std::move(d);
    }
  }

  json thresholds = json::object();
  for (const auto& [tracker, by_class] : result.score_thresholds) {
    json t = json::object();
    for (const auto& [cls, v] : by_class) t[cls] = std::isfinite(v) ? json(v) : json(nullptr);
    thresholds[tracker] = std::move(t);
  }

  json report{{"config", config_json(o)},
              {"per_sequence", std::move(per_sequence)},
              {"combined", std::move(combined)},
              {"curves", std::move(curves)},
              {"decomposition", std::move(decomposition)}};
  report["metadata"] = json{
      {"version", LOCALMOT_VERSION},
      {"horizon_resolution",
       json{{"rule", "frames = round(seconds * fps), halves rounded away from zero"},
            {"sequences", std::move(resolution)}}},
      {"selected_score_thresholds", std::move(thresholds)},
      {"aggregation",
       "windowed accumulators are per-frame normalised (1/T) and summed over "
       "sequences; strict accumulators are summed unnormalised"},
      {"ranking", "dense"}};
  return report;
}

std::string num(double v) { return json(v).dump(); }

void csv_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char ch : s) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

// Walks a report's metric object and emits one row per value.
void csv_rows(std::ostream& out, const std::string& tracker, const std::string& sequence,
              const json& metrics) {
  const auto row = [&](const std::string& metric, const std::string& horizon,
                       const json& value, const json* acc) {
    csv_field(out, tracker);
    out << ',';
    csv_field(out, sequence);
    out << ',' << metric << ',' << horizon << ',' << value.dump() << ',';
    if (acc) out << acc->at("numerator").dump() << ',' << acc->at("denominator").dump();
    else out << ',';
    out << '\n';
  };
  for (const auto& [metric, value] : metrics.items()) {
    if (metric == "alta" || metric == "lidf1") {
      for (const auto& [h, acc] : value.items()) row(metric, h, acc.at("value"), &acc);
    } else if (metric == "mota") {
      for (const auto& [k, v] : value.items()) {
        row(k == "value" ? std::string("mota") : k, "strict", v, nullptr);
      }
    } else if (value.is_object()) {
      row(metric, "strict", value.at("value"), &value);
    } else {
      row(metric, metric.rfind("mean_", 0) == 0 ? "" : "strict", value, nullptr);
    }
  }
}

}  // namespace

std::string report_json(const RunResult& result) { return build_report(result).dump(2) + "\n"; }

std::string report_csv(const RunResult& result) {
  const json report = build_report(result);
  std::ostringstream out;
  out << "tracker,sequence,metric,horizon,value,numerator,denominator\n";
  for (const auto& entry : report.at("per_sequence")) {
    if (!entry.contains("metrics")) continue;
    csv_rows(out, entry.at("tracker").get<std::string>(),
             entry.at("sequence").get<std::string>(), entry.at("metrics"));
  }
  for (const auto& [tracker, metrics] : report.at("combined").items()) {
    json m = metrics;
    m.erase("num_sequences");
    m.erase("num_failed");
    csv_rows(out, tracker, "combined", m);
  }
  return out.str();
}

std::string curves_csv(const RunResult& result, bool per_sequence) {
  const EvalOptions& o = result.options;
  std::ostringstream out;
  out << "tracker,sequence,metric,horizon,frames,value,numerator,denominator\n";
  const auto emit = [&](const std::string& tracker, const std::string& sequence,
                        const std::vector<LocalAccumulators>& local,
                        const std::vector<std::optional<Frame>>* radii) {
    for (bool alta : {true, false}) {
      for (std::size_t h = 0; h < o.horizons.size(); ++h) {
        const MetricAccumulator& a = alta ? local[h].alta : local[h].lidf1;
        csv_field(out, tracker);
        out << ',';
        csv_field(out, sequence);
        out << ',' << (alta ? "alta" : "lidf1") << ',' << o.horizons[h].label() << ',';
        if (radii) out << radius_json((*radii)[h]).dump();
        out << ',' << num(round6(a.value())) << ',' << num(a.numerator) << ','
            << num(a.denominator) << '\n';
      }
    }
  };
  for (const TrackerResult& tr : result.trackers) {
    if (per_sequence) {
      for (const SequenceResult& r : tr.sequences) {
        if (!r.error) emit(tr.tracker, r.sequence, r.local, &r.radii);
      }
    }
    emit(tr.tracker, "combined", tr.combined.local, nullptr);
  }
  return out.str();
}

namespace {

TrackerScores scores_from(const json& report) {
  TrackerScores out;
  for (const auto& [tracker, m] : report.at("combined").items()) {
    auto& row = out[tracker];
    for (const char* key : {"det_f1", "idf1", "idr", "idp", "ata", "atr", "atp"}) {
      row[key] = m.at(key).at("value").get<double>();
    }
    row["mota"] = m.at("mota").at("value").get<double>();
    row["normalized_id_switches"] = m.at("mota").at("normalized_id_switches").get<double>();
    if (!m.at("association_fraction").is_null()) {
      row["association_fraction"] = m.at("association_fraction").get<double>();
    }
    for (const auto& [h, acc] : m.at("alta").items()) {
      row["alta@" + h] = acc.at("value").get<double>();
    }
    for (const auto& [h, acc] : m.at("lidf1").items()) {
      row["lidf1@" + h] = acc.at("value").get<double>();
    }
    row["mean_alta"] = m.at("mean_alta").get<double>();
    row["mean_lidf1"] = m.at("mean_lidf1").get<double>();
  }
  return out;
}

}  // namespace

TrackerScores tracker_scores(const RunResult& result) { return scores_from(build_report(result)); }

TrackerScores tracker_scores_from_report(std::string_view text) {
  json report;
  try {
    report = json::parse(text);
    return scores_from(report);
  } catch (const json::exception& e) {
    throw FormatError(std::string("not an evaluation report: ") + e.what());
  }
}

std::set<std::string> lower_is_better_metrics() { return {"normalized_id_switches"}; }

std::string compare_json(const RankTable& table, const KendallMatrix& kendall) {
  json rows = json::array();
  for (const RankRow& r : table.rows) {
    json cells = json::object();
    for (const auto& [metric, cell] : r.cells) {
      cells[metric] = cell ? json{{"value", round6(cell->value)}, {"rank", cell->rank}}
                           : json(nullptr);
    }
    rows.push_back(json{{"tracker", r.tracker}, {"scores", std::move(cells)}});
  }
  json tau = json::object();
  for (std::size_t x = 0; x < kendall.metrics.size(); ++x) {
    json row = json::object();
    for (std::size_t y = 0; y < kendall.metrics.size(); ++y) {
      row[kendall.metrics[y]] = optional_value(kendall.tau[x][y]);
    }
    tau[kendall.metrics[x]] = std::move(row);
  }
  json out{{"sort_key", table.sort_key},
           {"ranking", "dense"},
           {"rank_table", std::move(rows)},
           {"kendall_tau_b", std::move(tau)}};
  return out.dump(2) + "\n";
}

std::string compare_csv(const RankTable& table) {
  std::ostringstream out;
  out << "tracker";
  for (const auto& m : table.metrics) out << ',' << m << ',' << m << "_rank";
  out << '\n';
  for (const RankRow& r : table.rows) {
    csv_field(out, r.tracker);
    for (const auto& m : table.metrics) {
      const auto& cell = r.cells.at(m);
      if (cell) {
        out << ',' << num(round6(cell->value)) << ',' << cell->rank;
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace localmot
