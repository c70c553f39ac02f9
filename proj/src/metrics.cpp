#include "localmot/metrics.hpp"

#include <vector>

#include "localmot/assign.hpp"

namespace localmot {

namespace {

template <typename Pred>
Matching match_frame_edges(const OverlapSeries& s, Frame t, Pred keep) {
  std::vector<WeightedEdge> edges;
  for (const FramePair& p : s.pairs_at(t)) {
    // iou lies in (0, 1]; halving keeps the order and the [0, 1) contract.
    if (keep(p)) edges.push_back({p.gt, p.pred, 0.5 * p.iou});
  }
  return max_cardinality_matching(s.num_gt(), s.num_pred(), edges);
}

double ratio(double num, double den) noexcept { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Matching frame_matching(const OverlapSeries& s, Frame t) {
  return match_frame_edges(s, t, [](const FramePair&) { return true; });
}

DetectionResult det_f1(const OverlapSeries& s) {
  DetectionResult r;
  for (Frame t = 1; t <= s.num_frames(); ++t) {
    r.tp += static_cast<std::int64_t>(frame_matching(s, t).size());
  }
  const Frame T = s.num_frames();
  const std::int64_t n_gt = s.gt_boxes(1, T);
  const std::int64_t n_pred = s.pred_boxes(1, T);
  r.fn = n_gt - r.tp;
  r.fp = n_pred - r.tp;
  if (T > 0) {
    r.accumulator.numerator = static_cast<double>(r.tp) / T;
    r.accumulator.denominator = static_cast<double>(n_gt + n_pred) / (2.0 * T);
  }
  return r;
}

IdentityResult idf1(const OverlapSeries& s) {
  IdentityResult r;
  std::vector<WeightedEdge> edges;
  for (std::size_t k : s.overlapping_pairs()) {
    const PairSeries& p = s.pairs()[k];
    edges.push_back({p.gt, p.pred, static_cast<double>(p.overlap.total())});
  }
  r.idtp = max_weight_matching(s.num_gt(), s.num_pred(), edges).objective;
  r.num_gt_boxes = s.gt_boxes(1, s.num_frames());
  r.num_pred_boxes = s.pred_boxes(1, s.num_frames());
  const auto n = static_cast<double>(r.num_gt_boxes);
  const auto n_hat = static_cast<double>(r.num_pred_boxes);
  r.accumulator = {r.idtp, (n + n_hat) / 2.0};
  r.recall = {r.idtp, n};
  r.precision = {r.idtp, n_hat};
  r.idf1 = r.accumulator.value();
  r.idr = r.recall.value();
  r.idp = r.precision.value();
  return r;
}

TrackAccuracyResult ata(const OverlapSeries& s) {
  TrackAccuracyResult r;
  const Frame T = s.num_frames();
  std::vector<WeightedEdge> edges;
  for (std::size_t k : s.overlapping_pairs()) {
    const PairSeries& p = s.pairs()[k];
    const int overlap = p.overlap.total();
    const int uni = s.gt_presence(p.gt, 1, T) + s.pred_presence(p.pred, 1, T) -
                    p.copresence.total();
    edges.push_back({p.gt, p.pred, static_cast<double>(overlap) / uni});
  }
  r.track_tp = max_weight_matching(s.num_gt(), s.num_pred(), edges).objective;
  r.num_gt_tracks = static_cast<std::int64_t>(s.num_gt());
  r.num_pred_tracks = static_cast<std::int64_t>(s.num_pred());
  const auto k = static_cast<double>(r.num_gt_tracks);
  const auto k_hat = static_cast<double>(r.num_pred_tracks);
  r.accumulator = {r.track_tp, (k + k_hat) / 2.0};
  r.recall = {r.track_tp, k};
  r.precision = {r.track_tp, k_hat};
  r.ata = r.accumulator.value();
  r.atr = r.recall.value();
  r.atp = r.precision.value();
  return r;
}

double MotaResult::from_counts(std::int64_t fn, std::int64_t fp,
                               std::int64_t switches, std::int64_t n) noexcept {
  if (n <= 0) return 0.0;
  return 1.0 - static_cast<double>(fn + fp + switches) / static_cast<double>(n);
}

MotaResult mota(const OverlapSeries& s) {
  MotaResult r;
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> previous(s.num_gt(), none);  // match at t - 1
  std::vector<std::size_t> latest(s.num_gt(), none);    // most recent match
  std::vector<char> gt_kept(s.num_gt()), pred_kept(s.num_pred());
  std::vector<std::pair<std::size_t, std::size_t>> current;

  for (Frame t = 1; t <= s.num_frames(); ++t) {
    current.clear();
    // Continue correspondences from the previous frame that still overlap.
    for (const FramePair& p : s.pairs_at(t)) {
      if (previous[p.gt] == p.pred) {
        current.emplace_back(p.gt, p.pred);
        gt_kept[p.gt] = 1;
        pred_kept[p.pred] = 1;
      }
    }
    const Matching fresh = match_frame_edges(s, t, [&](const FramePair& p) {
      return !gt_kept[p.gt] && !pred_kept[p.pred];
    });
    current.insert(current.end(), fresh.pairs.begin(), fresh.pairs.end());

    std::fill(previous.begin(), previous.end(), none);
    for (const auto& [i, j] : current) {
      if (latest[i] != none && latest[i] != j) ++r.id_switches;
      latest[i] = j;
      previous[i] = j;
      gt_kept[i] = 0;
      pred_kept[j] = 0;
    }
    r.det_tp += static_cast<std::int64_t>(current.size());
  }

  r.num_gt_boxes = s.gt_boxes(1, s.num_frames());
  r.det_fn = r.num_gt_boxes - r.det_tp;
  r.det_fp = s.pred_boxes(1, s.num_frames()) - r.det_tp;
  r.mota = MotaResult::from_counts(r.det_fn, r.det_fp, r.id_switches,
                                   r.num_gt_boxes);
  return r;
}

StrictMetrics evaluate_strict(const OverlapSeries& s) {
  return StrictMetrics{det_f1(s), idf1(s), ata(s), mota(s)};
}

std::optional<double> association_fraction(double ata, double det_f1) noexcept {
  if (!(det_f1 > 0.0)) return std::nullopt;
  return ratio(ata, det_f1);
}

}  // namespace localmot
