#include "localmot/decompose.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "localmot/assign.hpp"
#include "localmot/error.hpp"
#include "localmot/metrics.hpp"

namespace localmot {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

SpanPrefix prefix_over(const SpanPrefix& span, const std::vector<Frame>& frames) {
  return SpanPrefix(span.first(), span.last(), frames);
}

}  // namespace

FrameCorrespondence FrameCorrespondence::build(const OverlapSeries& s) {
  FrameCorrespondence c;
  c.series_ = &s;
  const Frame T = s.num_frames();
  c.per_frame_.reserve(static_cast<std::size_t>(std::max<Frame>(T, 0)));

  std::vector<std::vector<Frame>> gt_frames(s.num_gt()), pred_frames(s.num_pred());
  std::vector<std::vector<Frame>> cop_pred(s.pairs().size()), cop_gt(s.pairs().size());
  const std::uint64_t stride = s.num_pred();
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<std::uint64_t> keys;
  std::vector<std::vector<Frame>> pair_frames;

  std::vector<char> gt_hit(s.num_gt()), pred_hit(s.num_pred());
  for (Frame t = 1; t <= T; ++t) {
    Matching m = frame_matching(s, t);
    c.det_tp_ += static_cast<std::int64_t>(m.size());
    for (const auto& [i, j] : m.pairs) {
      gt_frames[i].push_back(t);
      pred_frames[j].push_back(t);
      gt_hit[i] = 1;
      pred_hit[j] = 1;
      const std::uint64_t key = i * stride + j;
      auto [it, inserted] = index.try_emplace(key, pair_frames.size());
      if (inserted) {
        keys.push_back(key);
        pair_frames.emplace_back();
      }
      pair_frames[it->second].push_back(t);
    }
    for (std::size_t i : s.gt_at(t)) {
      for (std::size_t j : s.pred_at(t)) {
        if (!gt_hit[i] && !pred_hit[j]) continue;
        const PairSeries* p = s.find_pair(i, j);
        const auto k = static_cast<std::size_t>(p - s.pairs().data());
        if (pred_hit[j]) cop_pred[k].push_back(t);
        if (gt_hit[i]) cop_gt[k].push_back(t);
      }
    }
    for (const auto& [i, j] : m.pairs) {
      gt_hit[i] = 0;
      pred_hit[j] = 0;
    }
    c.per_frame_.push_back(std::move(m));
  }

  for (std::size_t i = 0; i < s.num_gt(); ++i) {
    c.gt_matched_.push_back(prefix_over(s.gt_span(i), gt_frames[i]));
  }
  for (std::size_t j = 0; j < s.num_pred(); ++j) {
    c.pred_matched_.push_back(prefix_over(s.pred_span(j), pred_frames[j]));
  }
  for (std::size_t k = 0; k < s.pairs().size(); ++k) {
    const SpanPrefix& span = s.pairs()[k].copresence;
    c.copresent_pred_matched_.push_back(prefix_over(span, cop_pred[k]));
    c.copresent_gt_matched_.push_back(prefix_over(span, cop_gt[k]));
  }

  std::vector<std::size_t> order(keys.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  for (std::size_t k : order) {
    const auto& frames = pair_frames[k];
    c.matched_.push_back({static_cast<std::size_t>(keys[k] / stride),
                          static_cast<std::size_t>(keys[k] % stride),
                          SpanPrefix(frames.front(), frames.back(), frames)});
  }

  // Row and column adjacency in CSR form.
  c.row_offsets_.assign(s.num_gt() + 1, 0);
  c.col_offsets_.assign(s.num_pred() + 1, 0);
  for (const auto& mp : c.matched_) {
    ++c.row_offsets_[mp.gt + 1];
    ++c.col_offsets_[mp.pred + 1];
  }
  for (std::size_t i = 1; i < c.row_offsets_.size(); ++i) c.row_offsets_[i] += c.row_offsets_[i - 1];
  for (std::size_t j = 1; j < c.col_offsets_.size(); ++j) c.col_offsets_[j] += c.col_offsets_[j - 1];
  c.row_index_.resize(c.matched_.size());
  c.col_index_.resize(c.matched_.size());
  std::vector<std::size_t> rc(c.row_offsets_.begin(), c.row_offsets_.end() - 1);
  std::vector<std::size_t> cc(c.col_offsets_.begin(), c.col_offsets_.end() - 1);
  for (std::size_t k = 0; k < c.matched_.size(); ++k) {
    c.row_index_[rc[c.matched_[k].gt]++] = k;
    c.col_index_[cc[c.matched_[k].pred]++] = k;
  }
  return c;
}

int FrameCorrespondence::matched(std::size_t i, std::size_t j, Frame a, Frame b) const {
  for (std::size_t k : row(i)) {
    if (matched_[k].pred == j) return matched_[k].frames.count(a, b);
  }
  return 0;
}

std::span<const std::size_t> FrameCorrespondence::row(std::size_t i) const {
  return {row_index_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
}

std::span<const std::size_t> FrameCorrespondence::col(std::size_t j) const {
  return {col_index_.data() + col_offsets_[j], col_offsets_[j + 1] - col_offsets_[j]};
}

int FrameCorrespondence::copresent_pred_matched(std::size_t i, std::size_t j,
                                                Frame a, Frame b) const {
  const PairSeries* p = series_->find_pair(i, j);
  if (!p) return 0;
  return copresent_pred_matched_[static_cast<std::size_t>(p - series_->pairs().data())]
      .count(a, b);
}

int FrameCorrespondence::copresent_gt_matched(std::size_t i, std::size_t j,
                                              Frame a, Frame b) const {
  const PairSeries* p = series_->find_pair(i, j);
  if (!p) return 0;
  return copresent_gt_matched_[static_cast<std::size_t>(p - series_->pairs().data())]
      .count(a, b);
}

FrameCorrespondence frame_correspondence(const OverlapSeries& s) {
  return FrameCorrespondence::build(s);
}

namespace {

int union_count(const OverlapSeries& s, std::size_t i, std::size_t j, Window w) {
  const PairSeries* p = s.find_pair(i, j);
  const int cop = p ? p->copresence.count(w.first, w.last) : 0;
  return s.gt_presence(i, w.first, w.last) + s.pred_presence(j, w.first, w.last) - cop;
}

}  // namespace

ApproxTrackAccuracy approx_ata(const FrameCorrespondence& c, Window w) {
  const OverlapSeries& s = c.series();
  ApproxTrackAccuracy out;
  std::vector<WeightedEdge> edges;
  for (const auto& mp : c.matched_pairs()) {
    if (mp.frames.last() < w.first || mp.frames.first() > w.last) continue;
    const int count = mp.frames.count(w.first, w.last);
    if (count == 0) continue;
    edges.push_back({mp.gt, mp.pred,
                     static_cast<double>(count) / union_count(s, mp.gt, mp.pred, w)});
  }
  out.pi = max_weight_matching(s.num_gt(), s.num_pred(), edges);
  out.approx_track_tp = out.pi.objective;
  for (std::size_t i = 0; i < s.num_gt(); ++i) {
    out.num_gt_tracks += s.gt_presence(i, w.first, w.last) > 0;
  }
  for (std::size_t j = 0; j < s.num_pred(); ++j) {
    out.num_pred_tracks += s.pred_presence(j, w.first, w.last) > 0;
  }
  const auto k = static_cast<double>(out.num_gt_tracks);
  const auto k_hat = static_cast<double>(out.num_pred_tracks);
  out.approx_atr = k > 0 ? out.approx_track_tp / k : 0.0;
  out.approx_atp = k_hat > 0 ? out.approx_track_tp / k_hat : 0.0;
  out.approx_ata = k + k_hat > 0 ? out.approx_track_tp / ((k + k_hat) / 2.0) : 0.0;
  return out;
}

ApproxTrackAccuracy approx_ata(const FrameCorrespondence& c) {
  return approx_ata(c, Window{1, c.series().num_frames()});
}

RecallMasses& RecallMasses::operator+=(const RecallMasses& o) noexcept {
  fn += o.fn;
  split += o.split;
  merge += o.merge;
  union_fp += o.union_fp;
  union_merge += o.union_merge;
  return *this;
}

RecallMasses RecallMasses::scaled(double f) const noexcept {
  return {fn * f, split * f, merge * f, union_fp * f, union_merge * f};
}

PrecisionMasses& PrecisionMasses::operator+=(const PrecisionMasses& o) noexcept {
  fp += o.fp;
  merge += o.merge;
  split += o.split;
  union_fn += o.union_fn;
  union_split += o.union_split;
  return *this;
}

PrecisionMasses PrecisionMasses::scaled(double f) const noexcept {
  return {fp * f, merge * f, split * f, union_fn * f, union_split * f};
}

namespace {

// One side of the rho chain. `self` is the track being decomposed, `partner`
// its matched track on the other side (or kNone).
struct ChainTerms {
  double detection = 0.0;    // 1 - rho_det
  double multi = 0.0;        // rho_det - rho_best
  double best_taken = 0.0;   // rho_best - rho_pi
  double gap_other = 0.0;    // union gap, partner matched elsewhere
  double gap_unmatched = 0.0;  // union gap, partner unmatched
  double q_tilde = 0.0;
};

ChainTerms chain(int present, int matched_any, int best, int with_partner,
                 int uni, int partner_extra, int partner_extra_matched) {
  ChainTerms t;
  const double n = present;
  const double rho_det = matched_any / n;
  const double rho_best = best / n;
  const double rho_pi = with_partner / n;
  t.q_tilde = uni > 0 ? with_partner / static_cast<double>(uni) : 0.0;
  t.detection = 1.0 - rho_det;
  t.multi = rho_det - rho_best;
  t.best_taken = rho_best - rho_pi;
  const double gap = rho_pi - t.q_tilde;
  if (partner_extra > 0 && gap != 0.0) {
    t.gap_other = gap * partner_extra_matched / static_cast<double>(partner_extra);
    t.gap_unmatched = gap * (partner_extra - partner_extra_matched) /
                      static_cast<double>(partner_extra);
  }
  return t;
}

}  // namespace

std::vector<GtTrackMasses> decompose_recall(const FrameCorrespondence& c,
                                            const Matching& pi, Window w) {
  const OverlapSeries& s = c.series();
  const auto partner = pi.row_map(s.num_gt());
  std::vector<GtTrackMasses> out;
  for (std::size_t i = 0; i < s.num_gt(); ++i) {
    const int present = s.gt_presence(i, w.first, w.last);
    if (present == 0) continue;
    int best = 0;
    for (std::size_t k : c.row(i)) {
      best = std::max(best, c.matched_pairs()[k].frames.count(w.first, w.last));
    }
    int with_partner = 0, uni = present, extra = 0, extra_matched = 0;
    if (partner[i]) {
      const std::size_t j = *partner[i];
      with_partner = c.matched(i, j, w.first, w.last);
      uni = union_count(s, i, j, w);
      extra = uni - present;
      extra_matched = c.pred_matched(j, w.first, w.last) -
                      c.copresent_pred_matched(i, j, w.first, w.last);
    }
    const ChainTerms t = chain(present, c.gt_matched(i, w.first, w.last), best,
                               with_partner, uni, extra, extra_matched);
    GtTrackMasses m;
    m.track = i;
    m.windows = 1;
    m.q_tilde = t.q_tilde;
    m.masses = {t.detection, t.multi, t.best_taken, t.gap_unmatched, t.gap_other};
    out.push_back(m);
  }
  return out;
}

std::vector<PredTrackMasses> decompose_precision(const FrameCorrespondence& c,
                                                 const Matching& pi, Window w) {
  const OverlapSeries& s = c.series();
  const auto partner = pi.col_map(s.num_pred());
  std::vector<PredTrackMasses> out;
  for (std::size_t j = 0; j < s.num_pred(); ++j) {
    const int present = s.pred_presence(j, w.first, w.last);
    if (present == 0) continue;
    int best = 0;
    for (std::size_t k : c.col(j)) {
      best = std::max(best, c.matched_pairs()[k].frames.count(w.first, w.last));
    }
    int with_partner = 0, uni = present, extra = 0, extra_matched = 0;
    if (partner[j]) {
      const std::size_t i = *partner[j];
      with_partner = c.matched(i, j, w.first, w.last);
      uni = union_count(s, i, j, w);
      extra = uni - present;
      extra_matched = c.gt_matched(i, w.first, w.last) -
                      c.copresent_gt_matched(i, j, w.first, w.last);
    }
    const ChainTerms t = chain(present, c.pred_matched(j, w.first, w.last), best,
                               with_partner, uni, extra, extra_matched);
    PredTrackMasses m;
    m.track = j;
    m.windows = 1;
    m.q_tilde = t.q_tilde;
    m.masses = {t.detection, t.multi, t.best_taken, t.gap_unmatched, t.gap_other};
    out.push_back(m);
  }
  return out;
}

ErrorMasses fold(const RecallMasses& r, const PrecisionMasses& p) noexcept {
  ErrorMasses e;
  e.det_fn = r.fn + p.union_fn;
  e.det_fp = p.fp + r.union_fp;
  e.split = r.split + p.split + p.union_split;
  e.merge = r.merge + p.merge + r.union_merge;
  return e;
}

namespace {

OverallDecomposition normalise(const ErrorMasses& masses, double track_weight) {
  OverallDecomposition out;
  if (track_weight > 0.0) {
    out.raw = {masses.det_fn / track_weight, masses.det_fp / track_weight,
               masses.split / track_weight, masses.merge / track_weight};
  }
  // Masses are differences of ratios; treat round-off sized totals as zero.
  const double total = masses.total();
  if (!(track_weight > 0.0) || total <= 1e-12 * track_weight) {
    out.no_error = true;
    return out;
  }
  out.normalised = {masses.det_fn / total, masses.det_fp / total,
                    masses.split / total, masses.merge / total};
  return out;
}

}  // namespace

OverallDecomposition decompose_overall(std::span<const GtTrackMasses> recall,
                                       std::span<const PredTrackMasses> precision,
                                       std::size_t num_gt_tracks,
                                       std::size_t num_pred_tracks) {
  RecallMasses r;
  for (const auto& m : recall) r += m.masses;
  PrecisionMasses p;
  for (const auto& m : precision) p += m.masses;
  return normalise(fold(r, p), static_cast<double>(num_gt_tracks + num_pred_tracks));
}

OverallDecomposition DecompositionReport::overall() const noexcept {
  return normalise(overall_masses(), gt_track_weight + pred_track_weight);
}

DecompositionReport& DecompositionReport::operator+=(
    const DecompositionReport& o) noexcept {
  recall += o.recall;
  precision += o.precision;
  gt_track_weight += o.gt_track_weight;
  pred_track_weight += o.pred_track_weight;
  approx_ata += o.approx_ata;
  approx_atr += o.approx_atr;
  approx_atp += o.approx_atp;
  return *this;
}

DecompositionReport decompose_at_horizon(const FrameCorrespondence& c,
                                         std::optional<Frame> radius) {
  const OverlapSeries& s = c.series();
  const Frame T = s.num_frames();
  DecompositionReport report;
  report.radius = radius;
  if (T <= 0) return report;

  std::vector<GtTrackMasses> gt_tracks(s.num_gt());
  std::vector<PredTrackMasses> pred_tracks(s.num_pred());
  for (std::size_t i = 0; i < gt_tracks.size(); ++i) gt_tracks[i].track = i;
  for (std::size_t j = 0; j < pred_tracks.size(); ++j) pred_tracks[j].track = j;

  double tp_sum = 0.0;
  std::int64_t k_sum = 0, k_hat_sum = 0;
  RecallMasses recall;
  PrecisionMasses precision;

  const Frame windows = radius ? T : 1;
  for (Frame t = 1; t <= windows; ++t) {
    const Window w = radius ? centered_window(t, *radius, T) : Window{1, T};
    const ApproxTrackAccuracy a = approx_ata(c, w);
    tp_sum += a.approx_track_tp;
    k_sum += static_cast<std::int64_t>(a.num_gt_tracks);
    k_hat_sum += static_cast<std::int64_t>(a.num_pred_tracks);
    for (const auto& m : decompose_recall(c, a.pi, w)) {
      auto& acc = gt_tracks[m.track];
      acc.windows += 1;
      acc.q_tilde += m.q_tilde;
      acc.masses += m.masses;
      recall += m.masses;
    }
    for (const auto& m : decompose_precision(c, a.pi, w)) {
      auto& acc = pred_tracks[m.track];
      acc.windows += 1;
      acc.q_tilde += m.q_tilde;
      acc.masses += m.masses;
      precision += m.masses;
    }
  }

  const double scale = radius ? 1.0 / T : 1.0;
  report.recall = recall.scaled(scale);
  report.precision = precision.scaled(scale);
  report.gt_track_weight = static_cast<double>(k_sum) * scale;
  report.pred_track_weight = static_cast<double>(k_hat_sum) * scale;
  const double tp = tp_sum * scale;
  report.approx_ata = {tp, (report.gt_track_weight + report.pred_track_weight) / 2.0};
  report.approx_atr = {tp, report.gt_track_weight};
  report.approx_atp = {tp, report.pred_track_weight};
  report.recall_tracks = std::move(gt_tracks);
  report.precision_tracks = std::move(pred_tracks);
  return report;
}

DecompositionReport decompose_at_horizon(const FrameCorrespondence& c,
                                         const Horizon& h, double fps) {
  return decompose_at_horizon(c, h.resolve(fps));
}

}  // namespace localmot
