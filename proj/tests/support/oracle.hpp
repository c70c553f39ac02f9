#pragma once

// Brute-force reference implementations. They rebuild everything from the
// raw boxes and enumerate every matching, sharing no code with the library
// beyond the domain types.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "localmot/model.hpp"

namespace oracle {

using localmot::Box;
using localmot::Frame;
using localmot::Sequence;

inline double iou(const Box& a, const Box& b) {
  const double w = std::min(a.left + a.width, b.left + b.width) - std::max(a.left, b.left);
  const double h = std::min(a.top + a.height, b.top + b.height) - std::max(a.top, b.top);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.width * a.height + b.width * b.height - inter);
}

using Matrix = std::vector<std::vector<double>>;

// Every partial injection rows -> cols; calls visit(assignment) with -1 for
// unmatched rows.
inline void for_each_matching(std::size_t rows, std::size_t cols,
                              const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> assign(rows, -1);
  std::vector<char> used(cols, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == rows) {
      visit(assign);
      return;
    }
    assign[i] = -1;
    rec(i + 1);
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      assign[i] = static_cast<int>(j);
      rec(i + 1);
      used[j] = 0;
    }
    assign[i] = -1;
  };
  rec(0);
}

inline double max_matching(const Matrix& w, std::size_t cols) {
  double best = 0.0;
  for_each_matching(w.size(), cols, [&](const std::vector<int>& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] >= 0) sum += w[i][static_cast<std::size_t>(a[i])];
    }
    best = std::max(best, sum);
  });
  return best;
}

struct Boxes {
  // box[track][t] for t in 1..T, nullopt when absent.
  std::vector<std::vector<std::optional<Box>>> gt, pred;
  Frame T = 0;
};

inline Boxes boxes_of(const Sequence& seq) {
  Boxes b;
  b.T = seq.num_frames;
  for (const auto& track : seq.gt) {
    std::vector<std::optional<Box>> row(static_cast<std::size_t>(b.T) + 1);
    for (const auto& [t, box] : track.boxes) row[static_cast<std::size_t>(t)] = box;
    b.gt.push_back(std::move(row));
  }
  for (const auto& track : seq.pred) {
    std::vector<std::optional<Box>> row(static_cast<std::size_t>(b.T) + 1);
    for (const auto& [t, box] : track.boxes) row[static_cast<std::size_t>(t)] = box;
    b.pred.push_back(std::move(row));
  }
  return b;
}

inline bool overlaps(const Boxes& b, std::size_t i, std::size_t j, Frame t, double thr) {
  const auto& g = b.gt[i][static_cast<std::size_t>(t)];
  const auto& p = b.pred[j][static_cast<std::size_t>(t)];
  return g && p && oracle::iou(*g, *p) >= thr;
}

// Per-frame correspondence: maximum cardinality, then maximum summed IOU.
inline std::vector<std::pair<std::size_t, std::size_t>> frame_correspondence(const Boxes& b, Frame t,
                                                                             double thr) {
  const std::size_t K = b.gt.size(), Kh = b.pred.size();
  std::vector<std::pair<std::size_t, std::size_t>> best;
  int best_card = -1;
  double best_iou = -1.0;
  for_each_matching(K, Kh, [&](const std::vector<int>& a) {
    int card = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      if (a[i] < 0) continue;
      const std::size_t j = static_cast<std::size_t>(a[i]);
      if (!overlaps(b, i, j, t, thr)) return;
      ++card;
      sum += oracle::iou(*b.gt[i][static_cast<std::size_t>(t)], *b.pred[j][static_cast<std::size_t>(t)]);
    }
    if (card > best_card || (card == best_card && sum > best_iou)) {
      best_card = card;
      best_iou = sum;
      best.clear();
      for (std::size_t i = 0; i < K; ++i) {
        if (a[i] >= 0) best.emplace_back(i, static_cast<std::size_t>(a[i]));
      }
    }
  });
  return best;
}

struct WindowValues {
  double idtp = 0.0;
  double track_tp = 0.0;
  double approx_track_tp = 0.0;
  int boxes = 0;
  int tracks = 0;
  int gt_tracks = 0;
  int pred_tracks = 0;
};

inline WindowValues window_values(const Boxes& b, Frame first, Frame last, double thr) {
  const std::size_t K = b.gt.size(), Kh = b.pred.size();
  Matrix counts(K, std::vector<double>(Kh, 0.0)), q = counts, qt = counts, matched = counts;
  WindowValues v;
  std::vector<int> gp(K, 0), pp(Kh, 0);
  for (Frame t = first; t <= last; ++t) {
    for (std::size_t i = 0; i < K; ++i) gp[i] += b.gt[i][static_cast<std::size_t>(t)].has_value();
    for (std::size_t j = 0; j < Kh; ++j) pp[j] += b.pred[j][static_cast<std::size_t>(t)].has_value();
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < Kh; ++j) counts[i][j] += overlaps(b, i, j, t, thr);
    }
    for (const auto& [i, j] : frame_correspondence(b, t, thr)) matched[i][j] += 1.0;
  }
  for (std::size_t i = 0; i < K; ++i) {
    v.boxes += gp[i];
    v.gt_tracks += gp[i] > 0;
  }
  for (std::size_t j = 0; j < Kh; ++j) {
    v.boxes += pp[j];
    v.pred_tracks += pp[j] > 0;
  }
  v.tracks = v.gt_tracks + v.pred_tracks;
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < Kh; ++j) {
      int uni = 0;
      for (Frame t = first; t <= last; ++t) {
        uni += b.gt[i][static_cast<std::size_t>(t)].has_value() ||
               b.pred[j][static_cast<std::size_t>(t)].has_value();
      }
      q[i][j] = uni > 0 ? counts[i][j] / uni : 0.0;
      qt[i][j] = uni > 0 ? matched[i][j] / uni : 0.0;
    }
  }
  v.idtp = max_matching(counts, Kh);
  v.track_tp = max_matching(q, Kh);
  v.approx_track_tp = max_matching(qt, Kh);
  return v;
}

struct Values {
  double det_f1 = 0.0;
  double idtp = 0.0;
  double idf1 = 0.0;
  double track_tp = 0.0;
  double ata = 0.0;
  double approx_ata = 0.0;
  double lidf1 = 0.0;  // at the requested radius
  double alta = 0.0;
};

inline double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Strict values plus windowed values at radius r (nullopt: strict only).
inline Values evaluate(const Sequence& seq, std::optional<Frame> r, double thr = 0.5) {
  const Boxes b = boxes_of(seq);
  Values out;
  if (b.T <= 0) return out;
  const Frame T = b.T;
  const WindowValues whole = window_values(b, 1, T, thr);
  out.idtp = whole.idtp;
  out.idf1 = ratio(whole.idtp, whole.boxes / 2.0);
  out.track_tp = whole.track_tp;
  out.ata = ratio(whole.track_tp, whole.tracks / 2.0);
  out.approx_ata = ratio(whole.approx_track_tp, whole.tracks / 2.0);
  double det_tp = 0.0;
  for (Frame t = 1; t <= T; ++t) det_tp += static_cast<double>(frame_correspondence(b, t, thr).size());
  out.det_f1 = ratio(det_tp, whole.boxes / 2.0);
  if (r) {
    double idtp = 0.0, tp = 0.0, boxes = 0.0, tracks = 0.0;
    for (Frame t = 1; t <= T; ++t) {
      const WindowValues w = window_values(b, std::max<Frame>(1, t - *r), std::min<Frame>(T, t + *r), thr);
      idtp += w.idtp;
      tp += w.track_tp;
      boxes += w.boxes;
      tracks += w.tracks;
    }
    out.lidf1 = ratio(idtp / T, boxes / (2.0 * T));
    out.alta = ratio(tp / T, tracks / (2.0 * T));
  }
  return out;
}

}  // namespace oracle
