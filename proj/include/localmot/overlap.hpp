#pragma once

// Per-frame binary overlap relation between ground-truth and predicted boxes,
// with prefix sums that answer interval counts in constant time.

#include <cstddef>
#include <span>
#include <vector>

#include "localmot/model.hpp"

namespace localmot {

// Intersection over union; 0 for disjoint boxes.
double iou(const Box& a, const Box& b) noexcept;

// Prefix counts over the contiguous frame range [first, last]. Queries
// outside the range are clipped.
class SpanPrefix {
 public:
  SpanPrefix() = default;
  // `frames` must be sorted ascending; each frame counts once. The span is
  // [span_first, span_last], which must contain every frame.
  SpanPrefix(Frame span_first, Frame span_last, std::span<const Frame> frames);

  int count(Frame a, Frame b) const noexcept;
  int total() const noexcept { return prefix_.back(); }
  Frame first() const noexcept { return first_; }
  Frame last() const noexcept {
    return first_ + static_cast<Frame>(prefix_.size()) - 2;
  }

 private:
  Frame first_ = 1;
  std::vector<int> prefix_{0};
};

struct FramePair {
  std::size_t gt = 0;
  std::size_t pred = 0;
  double iou = 0.0;
};

struct IntervalCounts {
  int overlap = 0;
  int presence_gt = 0;
  int presence_pred = 0;
  int union_count = 0;
  int copresence = 0;

  friend bool operator==(const IntervalCounts&, const IntervalCounts&) = default;
};

// Counts for one (gt, pred) pair that is simultaneously visible in at least
// one frame.
struct PairSeries {
  std::size_t gt = 0;
  std::size_t pred = 0;
  SpanPrefix overlap;     // frames with B_ij(t) = 1
  SpanPrefix copresence;  // frames in V_i and V-hat_j
};

class OverlapSeries {
 public:
  // threshold must lie in (0, 1]; pairs with iou >= threshold overlap.
  static OverlapSeries build(const Sequence& seq, double threshold);

  Frame num_frames() const noexcept { return num_frames_; }
  std::size_t num_gt() const noexcept { return gt_presence_.size(); }
  std::size_t num_pred() const noexcept { return pred_presence_.size(); }
  double threshold() const noexcept { return threshold_; }

  // B(t) as a sparse list sorted by (gt, pred).
  std::span<const FramePair> pairs_at(Frame t) const;
  // Tracks visible at frame t, ascending.
  std::span<const std::size_t> gt_at(Frame t) const;
  std::span<const std::size_t> pred_at(Frame t) const;

  // N_[a,b] and N-hat_[a,b].
  int gt_boxes(Frame a, Frame b) const noexcept;
  int pred_boxes(Frame a, Frame b) const noexcept;
  int gt_presence(std::size_t i, Frame a, Frame b) const noexcept {
    return gt_presence_[i].count(a, b);
  }
  int pred_presence(std::size_t j, Frame a, Frame b) const noexcept {
    return pred_presence_[j].count(a, b);
  }
  const SpanPrefix& gt_span(std::size_t i) const { return gt_presence_[i]; }
  const SpanPrefix& pred_span(std::size_t j) const { return pred_presence_[j]; }

  // union_count = presence_gt + presence_pred - copresence.
  IntervalCounts interval_counts(std::size_t i, std::size_t j, Frame a,
                                 Frame b) const;

  // Every co-present pair, sorted by (gt, pred).
  std::span<const PairSeries> pairs() const noexcept { return pairs_; }
  // Indices into pairs() of those with at least one overlapping frame.
  std::span<const std::size_t> overlapping_pairs() const noexcept {
    return overlapping_;
  }
  const PairSeries* find_pair(std::size_t i, std::size_t j) const;

  // Whole-sequence B_ij.
  int overlap_total(std::size_t i, std::size_t j) const;

 private:
  Frame num_frames_ = 0;
  double threshold_ = 0.5;
  std::vector<std::size_t> frame_pair_offsets_;
  std::vector<FramePair> frame_pairs_;
  std::vector<std::size_t> gt_offsets_, pred_offsets_;
  std::vector<std::size_t> gt_frames_, pred_frames_;
  std::vector<int> gt_box_prefix_, pred_box_prefix_;
  std::vector<SpanPrefix> gt_presence_, pred_presence_;
  std::vector<PairSeries> pairs_;
  std::vector<std::size_t> overlapping_;
};

// Clips [t - r, t + r] to [1, T].
struct Window {
  Frame first = 1;
  Frame last = 0;
};

Window centered_window(Frame t, Frame radius, Frame num_frames) noexcept;

}  // namespace localmot
