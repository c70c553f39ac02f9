#include "localmot/local.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "localmot/assign.hpp"
#include "localmot/error.hpp"

namespace localmot {

Horizon Horizon::frames(Frame radius) {
  if (radius < 0) throw ContractError("horizon must be non-negative");
  Horizon h;
  h.unit_ = Unit::Frames;
  h.frames_ = radius;
  return h;
}

Horizon Horizon::seconds(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ContractError("horizon must be a non-negative number of seconds");
  }
  Horizon h;
  h.unit_ = Unit::Seconds;
  h.seconds_ = value;
  return h;
}

Horizon Horizon::strict() noexcept {
  Horizon h;
  h.unit_ = Unit::Strict;
  return h;
}

Horizon Horizon::parse(std::string_view text) {
  const auto fail = [&]() -> Horizon {
    throw ContractError("invalid horizon '" + std::string(text) +
                        "' (expected <int>f, <real>s, 0 or strict)");
  };
  if (text == "strict") return strict();
  if (text == "0") return frames(0);
  if (text.size() < 2) return fail();
  const char unit = text.back();
  const std::string_view number = text.substr(0, text.size() - 1);
  const char* first = number.data();
  const char* last = number.data() + number.size();
  if (unit == 'f') {
    Frame r = 0;
    auto [ptr, ec] = std::from_chars(first, last, r);
    if (ec != std::errc() || ptr != last || r < 0) return fail();
    return frames(r);
  }
  if (unit == 's') {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v) || v < 0.0) {
      return fail();
    }
    return seconds(v);
  }
  return fail();
}

std::optional<Frame> Horizon::resolve(double fps) const {
  switch (unit_) {
    case Unit::Strict:
      return std::nullopt;
    case Unit::Frames:
      return frames_;
    case Unit::Seconds: {
      if (!(fps > 0.0)) {
        throw ContractError("horizon " + label() + " needs a positive frame rate");
      }
      const double r = std::round(seconds_ * fps);
      if (r > static_cast<double>(std::numeric_limits<Frame>::max() / 2)) {
        return std::numeric_limits<Frame>::max() / 2;
      }
      return static_cast<Frame>(r);
    }
  }
  return std::nullopt;
}

std::string Horizon::label() const {
  switch (unit_) {
    case Unit::Strict:
      return "strict";
    case Unit::Frames:
      return frames_ == 0 ? std::string("0") : std::to_string(frames_) + "f";
    case Unit::Seconds: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, seconds_);
      (void)ec;
      return std::string(buf, ptr) + "s";
    }
  }
  return {};
}

const char* to_string(LocalMetric metric) noexcept {
  return metric == LocalMetric::LIDF1 ? "lidf1" : "alta";
}

namespace {

struct WindowOptima {
  double idtp = 0.0;
  double track_tp = 0.0;
  int boxes = 0;   // N_w + N-hat_w
  int tracks = 0;  // K_w + K-hat_w
};

int present_tracks(const OverlapSeries& s, Window w) {
  int n = 0;
  for (std::size_t i = 0; i < s.num_gt(); ++i) n += s.gt_presence(i, w.first, w.last) > 0;
  for (std::size_t j = 0; j < s.num_pred(); ++j) n += s.pred_presence(j, w.first, w.last) > 0;
  return n;
}

// Only pairs overlapping inside the window carry weight, so the assignment is
// solved over those; absent tracks would contribute all-zero rows.
WindowOptima solve_window(const OverlapSeries& s, Window w,
                          std::vector<WeightedEdge>& counts,
                          std::vector<WeightedEdge>& ratios) {
  counts.clear();
  ratios.clear();
  for (std::size_t k : s.overlapping_pairs()) {
    const PairSeries& p = s.pairs()[k];
    if (p.overlap.last() < w.first || p.overlap.first() > w.last) continue;
    const int overlap = p.overlap.count(w.first, w.last);
    if (overlap == 0) continue;
    const int uni = s.gt_presence(p.gt, w.first, w.last) +
                    s.pred_presence(p.pred, w.first, w.last) -
                    p.copresence.count(w.first, w.last);
    counts.push_back({p.gt, p.pred, static_cast<double>(overlap)});
    ratios.push_back({p.gt, p.pred, static_cast<double>(overlap) / uni});
  }
  WindowOptima o;
  o.idtp = max_weight_matching(s.num_gt(), s.num_pred(), counts).objective;
  o.track_tp = max_weight_matching(s.num_gt(), s.num_pred(), ratios).objective;
  o.boxes = s.gt_boxes(w.first, w.last) + s.pred_boxes(w.first, w.last);
  o.tracks = present_tracks(s, w);
  return o;
}

}  // namespace

LocalAccumulators evaluate_local(const OverlapSeries& s,
                                 std::optional<Frame> radius) {
  LocalAccumulators out;
  const Frame T = s.num_frames();
  if (T <= 0) return out;
  std::vector<WeightedEdge> counts, ratios;

  if (!radius) {
    const WindowOptima o = solve_window(s, Window{1, T}, counts, ratios);
    out.lidf1 = {o.idtp, o.boxes / 2.0};
    out.alta = {o.track_tp, o.tracks / 2.0};
    return out;
  }

  double idtp_sum = 0.0, track_tp_sum = 0.0;
  std::int64_t box_sum = 0, track_sum = 0;
  for (Frame t = 1; t <= T; ++t) {
    const WindowOptima o = solve_window(s, centered_window(t, *radius, T), counts, ratios);
    idtp_sum += o.idtp;
    track_tp_sum += o.track_tp;
    box_sum += o.boxes;
    track_sum += o.tracks;
  }
  out.lidf1 = {idtp_sum / T, static_cast<double>(box_sum) / (2.0 * T)};
  out.alta = {track_tp_sum / T, static_cast<double>(track_sum) / (2.0 * T)};
  return out;
}

MetricAccumulator lidf1(const OverlapSeries& s, const Horizon& h, double fps) {
  return evaluate_local(s, h.resolve(fps)).lidf1;
}

MetricAccumulator alta(const OverlapSeries& s, const Horizon& h, double fps) {
  return evaluate_local(s, h.resolve(fps)).alta;
}

HorizonCurve horizon_curve(const OverlapSeries& s, double fps,
                           std::span<const Horizon> horizons,
                           LocalMetric metric) {
  if (horizons.empty()) throw ContractError("horizon curve needs at least one horizon");
  HorizonCurve curve;
  curve.metric = metric;
  for (const Horizon& h : horizons) {
    CurvePoint point;
    point.horizon = h;
    point.frames = h.resolve(fps);
    const LocalAccumulators acc = evaluate_local(s, point.frames);
    point.accumulator = metric == LocalMetric::LIDF1 ? acc.lidf1 : acc.alta;
    point.value = point.accumulator.value();
    curve.points.push_back(point);
  }
  return curve;
}

LocalScore combine(std::span<const LocalScore> scores) {
  if (scores.empty()) throw ContractError("nothing to combine");
  LocalScore out;
  out.metric = scores.front().metric;
  out.horizon = scores.front().horizon;
  for (const LocalScore& s : scores) {
    if (s.metric != out.metric || !(s.horizon == out.horizon)) {
      throw ContractError("cannot combine " + std::string(to_string(s.metric)) +
                          "(" + s.horizon.label() + ") with " +
                          to_string(out.metric) + "(" + out.horizon.label() + ")");
    }
    out.accumulator += s.accumulator;
  }
  return out;
}

double mean_over_horizons(std::span<const double> values) {
  if (values.empty()) throw ContractError("mean of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace localmot
