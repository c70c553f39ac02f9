#include "localmot/overlap.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "localmot/error.hpp"

namespace localmot {

double iou(const Box& a, const Box& b) noexcept {
  const double w = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.area() + b.area() - inter);
}

SpanPrefix::SpanPrefix(Frame span_first, Frame span_last,
                       std::span<const Frame> frames)
    : first_(span_first) {
  const auto length = static_cast<std::size_t>(
      std::max<Frame>(0, span_last - span_first + 1));
  prefix_.assign(length + 1, 0);
  std::size_t k = 0;
  for (std::size_t pos = 0; pos < length; ++pos) {
    const Frame t = span_first + static_cast<Frame>(pos);
    int hit = 0;
    if (k < frames.size() && frames[k] == t) {
      hit = 1;
      ++k;
    }
    prefix_[pos + 1] = prefix_[pos] + hit;
  }
}

int SpanPrefix::count(Frame a, Frame b) const noexcept {
  const Frame lo = std::max(a, first_);
  const Frame hi = std::min(b, last());
  if (lo > hi) return 0;
  return prefix_[static_cast<std::size_t>(hi - first_ + 1)] -
         prefix_[static_cast<std::size_t>(lo - first_)];
}

namespace {

// Bucket track visibility by frame (CSR layout).
void bucket_by_frame(const TrackSet& set, Frame num_frames,
                     std::vector<std::size_t>& offsets,
                     std::vector<std::size_t>& members,
                     std::vector<int>& box_prefix) {
  offsets.assign(static_cast<std::size_t>(num_frames) + 2, 0);
  for (const auto& track : set) {
    for (const auto& [t, box] : track.boxes) {
      (void)box;
      ++offsets[static_cast<std::size_t>(t) + 1];
    }
  }
  box_prefix.assign(static_cast<std::size_t>(num_frames) + 1, 0);
  for (Frame t = 1; t <= num_frames; ++t) {
    box_prefix[t] =
        box_prefix[t - 1] + static_cast<int>(offsets[static_cast<std::size_t>(t) + 1]);
  }
  for (std::size_t k = 1; k < offsets.size(); ++k) offsets[k] += offsets[k - 1];
  members.assign(offsets.back(), 0);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t idx = 0; idx < set.size(); ++idx) {
    for (const auto& [t, box] : set[idx].boxes) {
      (void)box;
      members[cursor[static_cast<std::size_t>(t)]++] = idx;
    }
  }
}

std::vector<SpanPrefix> presence_prefixes(const TrackSet& set) {
  std::vector<SpanPrefix> out;
  out.reserve(set.size());
  std::vector<Frame> frames;
  for (const auto& track : set) {
    frames.clear();
    for (const auto& [t, box] : track.boxes) {
      (void)box;
      frames.push_back(t);
    }
    out.emplace_back(frames.front(), frames.back(), frames);
  }
  return out;
}

}  // namespace

OverlapSeries OverlapSeries::build(const Sequence& seq, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ContractError("iou threshold must lie in (0, 1]");
  }
  if (seq.gt.max_frame() > seq.num_frames ||
      seq.pred.max_frame() > seq.num_frames) {
    throw FormatError("sequence '" + seq.name +
                      "' has boxes beyond its frame count");
  }

  OverlapSeries s;
  s.num_frames_ = seq.num_frames;
  s.threshold_ = threshold;
  bucket_by_frame(seq.gt, seq.num_frames, s.gt_offsets_, s.gt_frames_,
                  s.gt_box_prefix_);
  bucket_by_frame(seq.pred, seq.num_frames, s.pred_offsets_, s.pred_frames_,
                  s.pred_box_prefix_);
  s.gt_presence_ = presence_prefixes(seq.gt);
  s.pred_presence_ = presence_prefixes(seq.pred);

  struct PairFrames {
    std::vector<Frame> copresent;
    std::vector<Frame> overlap;
  };
  const std::uint64_t stride = seq.pred.size();
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<std::uint64_t> keys;
  std::vector<PairFrames> events;

  s.frame_pair_offsets_.assign(static_cast<std::size_t>(seq.num_frames) + 2, 0);
  for (Frame t = 1; t <= seq.num_frames; ++t) {
    for (std::size_t i : s.gt_at(t)) {
      const Box& g = *seq.gt[i].box_at(t);
      for (std::size_t j : s.pred_at(t)) {
        const Box& p = *seq.pred[j].box_at(t);
        const std::uint64_t key = i * stride + j;
        auto [it, inserted] = index.try_emplace(key, events.size());
        if (inserted) {
          keys.push_back(key);
          events.emplace_back();
        }
        PairFrames& ev = events[it->second];
        ev.copresent.push_back(t);
        const double v = iou(g, p);
        if (v >= threshold) {
          ev.overlap.push_back(t);
          s.frame_pairs_.push_back({i, j, v});
        }
      }
    }
    s.frame_pair_offsets_[static_cast<std::size_t>(t) + 1] = s.frame_pairs_.size();
  }

  std::vector<std::size_t> order(keys.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  s.pairs_.reserve(order.size());
  for (std::size_t k : order) {
    const PairFrames& ev = events[k];
    PairSeries ps;
    ps.gt = static_cast<std::size_t>(keys[k] / stride);
    ps.pred = static_cast<std::size_t>(keys[k] % stride);
    const Frame lo = ev.copresent.front();
    const Frame hi = ev.copresent.back();
    ps.copresence = SpanPrefix(lo, hi, ev.copresent);
    ps.overlap = SpanPrefix(lo, hi, ev.overlap);
    if (!ev.overlap.empty()) s.overlapping_.push_back(s.pairs_.size());
    s.pairs_.push_back(std::move(ps));
  }
  return s;
}

std::span<const FramePair> OverlapSeries::pairs_at(Frame t) const {
  if (t < 1 || t > num_frames_) return {};
  const auto k = static_cast<std::size_t>(t);
  return {frame_pairs_.data() + frame_pair_offsets_[k],
          frame_pair_offsets_[k + 1] - frame_pair_offsets_[k]};
}

std::span<const std::size_t> OverlapSeries::gt_at(Frame t) const {
  if (t < 1 || t > num_frames_) return {};
  const auto k = static_cast<std::size_t>(t);
  return {gt_frames_.data() + gt_offsets_[k], gt_offsets_[k + 1] - gt_offsets_[k]};
}

std::span<const std::size_t> OverlapSeries::pred_at(Frame t) const {
  if (t < 1 || t > num_frames_) return {};
  const auto k = static_cast<std::size_t>(t);
  return {pred_frames_.data() + pred_offsets_[k],
          pred_offsets_[k + 1] - pred_offsets_[k]};
}

int OverlapSeries::gt_boxes(Frame a, Frame b) const noexcept {
  a = std::max<Frame>(a, 1);
  b = std::min(b, num_frames_);
  if (a > b) return 0;
  return gt_box_prefix_[b] - gt_box_prefix_[a - 1];
}

int OverlapSeries::pred_boxes(Frame a, Frame b) const noexcept {
  a = std::max<Frame>(a, 1);
  b = std::min(b, num_frames_);
  if (a > b) return 0;
  return pred_box_prefix_[b] - pred_box_prefix_[a - 1];
}

const PairSeries* OverlapSeries::find_pair(std::size_t i, std::size_t j) const {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{i, j},
                             [](const PairSeries& p, const auto& key) {
                               return p.gt != key.first ? p.gt < key.first
                                                        : p.pred < key.second;
                             });
  if (it == pairs_.end() || it->gt != i || it->pred != j) return nullptr;
  return &*it;
}

IntervalCounts OverlapSeries::interval_counts(std::size_t i, std::size_t j,
                                              Frame a, Frame b) const {
  IntervalCounts c;
  c.presence_gt = gt_presence(i, a, b);
  c.presence_pred = pred_presence(j, a, b);
  if (const PairSeries* p = find_pair(i, j)) {
    c.overlap = p->overlap.count(a, b);
    c.copresence = p->copresence.count(a, b);
  }
  c.union_count = c.presence_gt + c.presence_pred - c.copresence;
  return c;
}

int OverlapSeries::overlap_total(std::size_t i, std::size_t j) const {
  const PairSeries* p = find_pair(i, j);
  return p ? p->overlap.total() : 0;
}

Window centered_window(Frame t, Frame radius, Frame num_frames) noexcept {
  const auto lo = static_cast<std::int64_t>(t) - radius;
  const auto hi = static_cast<std::int64_t>(t) + radius;
  return Window{static_cast<Frame>(std::max<std::int64_t>(1, lo)),
                static_cast<Frame>(std::min<std::int64_t>(num_frames, hi))};
}

}  // namespace localmot
