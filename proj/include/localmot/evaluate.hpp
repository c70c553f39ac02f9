#pragma once

// Batch evaluation of trackers over sequences, and report serialisation.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "localmot/analysis.hpp"
#include "localmot/decompose.hpp"
#include "localmot/ingest.hpp"
#include "localmot/local.hpp"
#include "localmot/metrics.hpp"

namespace localmot {

std::vector<Horizon> default_horizons();
// Comma-separated horizon list; throws ContractError on an empty list.
std::vector<Horizon> parse_horizons(std::string_view text);

struct EvalOptions {
  std::vector<Horizon> horizons = default_horizons();
  IngestConfig ingest;
  bool split_classes = false;  // each gt class becomes its own "<seq>/<class>"
  bool decompose = false;
  bool per_sequence = true;
  int jobs = 1;
};

struct SequenceResult {
  std::string tracker;
  std::string sequence;
  std::optional<std::string> error;

  Frame num_frames = 0;
  double fps = 0.0;
  std::size_t num_gt_tracks = 0;
  std::size_t num_pred_tracks = 0;
  StrictMetrics strict;
  // Aligned with EvalOptions::horizons.
  std::vector<std::optional<Frame>> radii;
  std::vector<LocalAccumulators> local;
  std::vector<DecompositionReport> decomposition;  // empty unless requested
};

struct CombinedResult {
  std::size_t num_sequences = 0;
  std::size_t num_failed = 0;
  MetricAccumulator det_f1, idf1, idr, idp, ata, atr, atp;
  MotaResult mota;
  std::vector<LocalAccumulators> local;
  std::vector<DecompositionReport> decomposition;
};

struct TrackerResult {
  std::string tracker;
  std::vector<SequenceResult> sequences;  // sorted by sequence name
  CombinedResult combined;
};

struct RunResult {
  EvalOptions options;
  std::vector<TrackerResult> trackers;  // sorted by tracker name
  // Score threshold applied per tracker (and class, when split).
  std::map<std::string, std::map<std::string, double>> score_thresholds;

  bool ok() const noexcept;
};

// Single sequence on the calling thread.
SequenceResult evaluate_sequence(const Sequence& seq, const EvalOptions& options,
                                 std::string tracker = {});

// Sums accumulators in the given order; failed entries are counted and skipped.
CombinedResult combine_results(const std::vector<SequenceResult>& results,
                               std::size_t num_horizons);

struct TrackerSequences {
  std::string tracker;
  std::vector<Sequence> sequences;
  // (sequence, message) for inputs that could not be built.
  std::vector<std::pair<std::string, std::string>> errors;
};

// Evaluates already-built sequences on options.jobs worker threads.
RunResult evaluate(std::vector<TrackerSequences> inputs, const EvalOptions& options);

// Raw annotations of one sequence.
struct SequenceSource {
  std::string name;
  std::vector<RawEntry> entries;
  SequenceInfo info;
};

// A file, a MOT sequence directory (<dir>/gt/gt.txt), or a directory of
// sequence directories.
std::map<std::string, SequenceSource> load_ground_truth(const std::filesystem::path& path);
// A file or a directory of <sequence>.txt files.
std::map<std::string, std::vector<RawEntry>> load_predictions(const std::filesystem::path& path);

struct TrackerSource {
  std::string tracker;
  std::map<std::string, std::vector<RawEntry>> sequences;
};

// Filtering, threshold selection and class splitting, then evaluate().
// fps falls back to options.ingest.fps_override, then to seqinfo.ini.
RunResult run(const std::map<std::string, SequenceSource>& gt,
              const std::vector<TrackerSource>& trackers, const EvalOptions& options);

// Metric values rounded to 6 decimals alongside exact numerators and
// denominators. Key order is sorted, so equal results give equal bytes.
std::string report_json(const RunResult& result);
// Long format: tracker,sequence,metric,horizon,value,numerator,denominator.
std::string report_csv(const RunResult& result);
// tracker,sequence,metric,horizon,frames,value,numerator,denominator
std::string curves_csv(const RunResult& result, bool per_sequence);

// Combined scores per tracker, keyed "det_f1", "idf1", "ata", "mota",
// "alta@<horizon>", "mean_alta", ...
TrackerScores tracker_scores(const RunResult& result);
TrackerScores tracker_scores_from_report(std::string_view report_json_text);
// Metrics for which a smaller value ranks higher.
std::set<std::string> lower_is_better_metrics();

std::string compare_json(const RankTable& table, const KendallMatrix& kendall);
std::string compare_csv(const RankTable& table);

}  // namespace localmot
