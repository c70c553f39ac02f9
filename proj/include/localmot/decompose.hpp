#pragma once

// Decomposition of (windowed) track-accuracy error into false negatives,
// false positives, splits and merges.
//
// The exact overlap counts B are replaced by C = sum_t C(t), the counts of an
// independent per-frame one-to-one correspondence. For ground-truth track i
// with partner pi(i) in the optimal matching of Q-tilde = C / |V_i u V-hat_j|,
//
//   1 - Q-tilde = (1 - rho_det) + (rho_det - rho_best) + (rho_best - rho_pi)
//                 + (rho_pi - Q-tilde)
//                 fn              split                  merge
//                 union gap -> false positive or merge, by frame counts.
//
// Predicted tracks use the mirror chain with the labels exchanged.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "localmot/local.hpp"
#include "localmot/model.hpp"
#include "localmot/overlap.hpp"

namespace localmot {

// Per-frame correspondence C(t) plus prefix counts for window queries. Holds
// a pointer to the series, which must outlive it.
class FrameCorrespondence {
 public:
  static FrameCorrespondence build(const OverlapSeries& s);

  const OverlapSeries& series() const noexcept { return *series_; }
  const Matching& at(Frame t) const { return per_frame_.at(static_cast<std::size_t>(t - 1)); }
  std::int64_t det_tp() const noexcept { return det_tp_; }

  struct MatchedPair {
    std::size_t gt = 0;
    std::size_t pred = 0;
    SpanPrefix frames;  // frames where C_ij(t) = 1
  };
  // Pairs matched in at least one frame, sorted by (gt, pred).
  std::span<const MatchedPair> matched_pairs() const noexcept { return matched_; }
  // C_ij over [a, b].
  int matched(std::size_t i, std::size_t j, Frame a, Frame b) const;
  // Matched pairs in row i / column j (indices into matched_pairs()).
  std::span<const std::size_t> row(std::size_t i) const;
  std::span<const std::size_t> col(std::size_t j) const;

  // Frames in [a, b] where the track is matched to anything.
  int gt_matched(std::size_t i, Frame a, Frame b) const noexcept {
    return gt_matched_[i].count(a, b);
  }
  int pred_matched(std::size_t j, Frame a, Frame b) const noexcept {
    return pred_matched_[j].count(a, b);
  }
  // Frames in V_i and V-hat_j within [a, b] where j (resp. i) is matched.
  int copresent_pred_matched(std::size_t i, std::size_t j, Frame a, Frame b) const;
  int copresent_gt_matched(std::size_t i, std::size_t j, Frame a, Frame b) const;

 private:
  const OverlapSeries* series_ = nullptr;
  std::vector<Matching> per_frame_;
  std::int64_t det_tp_ = 0;
  std::vector<MatchedPair> matched_;
  std::vector<std::size_t> row_offsets_, row_index_;
  std::vector<std::size_t> col_offsets_, col_index_;
  std::vector<SpanPrefix> gt_matched_, pred_matched_;
  // Aligned with series().pairs().
  std::vector<SpanPrefix> copresent_pred_matched_, copresent_gt_matched_;
};

FrameCorrespondence frame_correspondence(const OverlapSeries& s);

struct ApproxTrackAccuracy {
  double approx_track_tp = 0.0;
  double approx_ata = 0.0;
  double approx_atr = 0.0;
  double approx_atp = 0.0;
  std::size_t num_gt_tracks = 0;    // tracks present in the window
  std::size_t num_pred_tracks = 0;
  Matching pi;                      // optimal matching of Q-tilde
};

// Optimal matching of Q-tilde restricted to window w.
ApproxTrackAccuracy approx_ata(const FrameCorrespondence& c, Window w);
// Whole sequence.
ApproxTrackAccuracy approx_ata(const FrameCorrespondence& c);

struct RecallMasses {
  double fn = 0.0;
  double split = 0.0;
  double merge = 0.0;
  double union_fp = 0.0;
  double union_merge = 0.0;

  double total() const noexcept { return fn + split + merge + union_fp + union_merge; }
  RecallMasses& operator+=(const RecallMasses& o) noexcept;
  RecallMasses scaled(double f) const noexcept;
};

struct PrecisionMasses {
  double fp = 0.0;
  double merge = 0.0;
  double split = 0.0;
  double union_fn = 0.0;
  double union_split = 0.0;

  double total() const noexcept { return fp + merge + split + union_fn + union_split; }
  PrecisionMasses& operator+=(const PrecisionMasses& o) noexcept;
  PrecisionMasses scaled(double f) const noexcept;
};

// Masses of one track, summed over the windows it is present in. For every
// window the masses add up to 1 - Q-tilde, so masses.total() equals
// windows - q_tilde.
struct GtTrackMasses {
  std::size_t track = 0;
  int windows = 0;
  double q_tilde = 0.0;
  RecallMasses masses;
};

struct PredTrackMasses {
  std::size_t track = 0;
  int windows = 0;
  double q_tilde = 0.0;
  PrecisionMasses masses;
};

// Recall-side masses for every ground-truth track present in w, given the
// window's optimal matching pi. Unmatched tracks have rho_pi = 0.
std::vector<GtTrackMasses> decompose_recall(const FrameCorrespondence& c,
                                            const Matching& pi, Window w);
std::vector<PredTrackMasses> decompose_precision(const FrameCorrespondence& c,
                                                 const Matching& pi, Window w);

struct ErrorMasses {
  double det_fn = 0.0;
  double det_fp = 0.0;
  double split = 0.0;
  double merge = 0.0;

  double total() const noexcept { return det_fn + det_fp + split + merge; }
};

// Folds union gaps into their error type: union_fp -> det_fp,
// union_fn -> det_fn, union_merge -> merge, union_split -> split.
ErrorMasses fold(const RecallMasses& recall, const PrecisionMasses& precision) noexcept;

struct OverallDecomposition {
  ErrorMasses raw;         // per type / (K + K-hat); sums to 1 - ATA-tilde
  ErrorMasses normalised;  // per type / total error; sums to 1
  bool no_error = false;   // total error is zero; normalised is all-zero
};

OverallDecomposition decompose_overall(std::span<const GtTrackMasses> recall,
                                       std::span<const PredTrackMasses> precision,
                                       std::size_t num_gt_tracks,
                                       std::size_t num_pred_tracks);

// Full decomposition at one horizon. Window sums are normalised by 1/T for
// finite radii (as in ALTA), and left unnormalised for the strict horizon, so
// reports from several sequences pool by plain addition.
struct DecompositionReport {
  std::optional<Frame> radius;
  std::vector<GtTrackMasses> recall_tracks;
  std::vector<PredTrackMasses> precision_tracks;

  RecallMasses recall;        // mean over windows of summed track masses
  PrecisionMasses precision;
  double gt_track_weight = 0.0;    // mean over windows of K_w
  double pred_track_weight = 0.0;  // mean over windows of K-hat_w
  MetricAccumulator approx_ata;    // (mean TrackTP-tilde, mean (K_w + K-hat_w) / 2)
  MetricAccumulator approx_atr;
  MetricAccumulator approx_atp;

  ErrorMasses overall_masses() const noexcept { return fold(recall, precision); }
  // raw = masses / (gt_track_weight + pred_track_weight).
  OverallDecomposition overall() const noexcept;

  // Pools scalar totals; per-track lists are not merged.
  DecompositionReport& operator+=(const DecompositionReport& other) noexcept;
};

DecompositionReport decompose_at_horizon(const FrameCorrespondence& c,
                                         std::optional<Frame> radius);
DecompositionReport decompose_at_horizon(const FrameCorrespondence& c,
                                         const Horizon& h, double fps);

}  // namespace localmot
