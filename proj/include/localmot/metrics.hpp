#pragma once

// Whole-sequence metrics: detection F1, IDF1, ATA and a reference MOTA.

#include <cstdint>
#include <optional>

#include "localmot/model.hpp"
#include "localmot/overlap.hpp"

namespace localmot {

// Independent per-frame correspondence C(t): maximum cardinality over B(t),
// ties broken by the larger summed IOU.
Matching frame_matching(const OverlapSeries& s, Frame t);

struct DetectionResult {
  // numerator DetTP / T, denominator (N + N-hat) / 2T.
  MetricAccumulator accumulator;
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;

  double value() const noexcept { return accumulator.value(); }
};

struct IdentityResult {
  double idtp = 0.0;
  std::int64_t num_gt_boxes = 0;
  std::int64_t num_pred_boxes = 0;
  double idr = 0.0;
  double idp = 0.0;
  double idf1 = 0.0;
  // numerator IDTP, denominator (N + N-hat) / 2.
  MetricAccumulator accumulator;
  MetricAccumulator recall;     // IDTP / N
  MetricAccumulator precision;  // IDTP / N-hat
};

struct TrackAccuracyResult {
  double track_tp = 0.0;
  std::int64_t num_gt_tracks = 0;
  std::int64_t num_pred_tracks = 0;
  double ata = 0.0;
  double atr = 0.0;
  double atp = 0.0;
  // numerator TrackTP, denominator (K + K-hat) / 2.
  MetricAccumulator accumulator;
  MetricAccumulator recall;     // TrackTP / K
  MetricAccumulator precision;  // TrackTP / K-hat
};

// Reference CLEAR-MOT style accuracy. Error counts are kept so results from
// several sequences can be pooled exactly.
struct MotaResult {
  double mota = 0.0;
  std::int64_t id_switches = 0;
  std::int64_t det_tp = 0;
  std::int64_t det_fn = 0;
  std::int64_t det_fp = 0;
  std::int64_t num_gt_boxes = 0;

  // 1 - (FN + FP + IDSw) / N; 0 when N = 0.
  static double from_counts(std::int64_t fn, std::int64_t fp,
                            std::int64_t switches, std::int64_t n) noexcept;
};

struct StrictMetrics {
  DetectionResult detection;
  IdentityResult identity;
  TrackAccuracyResult track;
  MotaResult mota;
};

DetectionResult det_f1(const OverlapSeries& s);
IdentityResult idf1(const OverlapSeries& s);
TrackAccuracyResult ata(const OverlapSeries& s);
MotaResult mota(const OverlapSeries& s);
StrictMetrics evaluate_strict(const OverlapSeries& s);

// ATA / DetF1; absent when det_f1 is zero.
std::optional<double> association_fraction(double ata, double det_f1) noexcept;

}  // namespace localmot
