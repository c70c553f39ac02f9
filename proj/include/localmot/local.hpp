#pragma once

// Temporally local tracking metrics. Every frame t contributes the optimal
// track correspondence inside the window [t - r, t + r]; numerators and
// denominators are averaged over windows before taking the ratio.
//
//   LIDF1(r) = (1/T) sum_t IDTP_w / (1/2T) sum_t (N_w + N-hat_w)
//   ALTA(r)  = (1/T) sum_t TrackTP_w / (1/2T) sum_t (K_w + K-hat_w)
//
// r = 0 reduces both to detection F1; r >= T - 1 gives IDF1 and ATA.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "localmot/model.hpp"
#include "localmot/overlap.hpp"

namespace localmot {

class Horizon {
 public:
  enum class Unit { Frames, Seconds, Strict };

  static Horizon frames(Frame radius);
  static Horizon seconds(double value);
  static Horizon strict() noexcept;
  // Grammar: "<int>f" | "<real>s" | "0" | "strict". Throws ContractError.
  static Horizon parse(std::string_view text);

  Unit unit() const noexcept { return unit_; }
  bool is_strict() const noexcept { return unit_ == Unit::Strict; }
  Frame frame_count() const noexcept { return frames_; }
  double seconds_value() const noexcept { return seconds_; }

  // Window radius in frames for a sequence at `fps`; nullopt means the whole
  // sequence. Seconds are rounded half away from zero.
  std::optional<Frame> resolve(double fps) const;

  // Canonical text form: "0", "12f", "0.5s", "strict".
  std::string label() const;

  friend bool operator==(const Horizon&, const Horizon&) = default;

 private:
  Unit unit_ = Unit::Frames;
  Frame frames_ = 0;
  double seconds_ = 0.0;
};

enum class LocalMetric { LIDF1, ALTA };

const char* to_string(LocalMetric metric) noexcept;

struct LocalAccumulators {
  MetricAccumulator lidf1;
  MetricAccumulator alta;
};

// Both local metrics at one resolved radius (nullopt = strict).
LocalAccumulators evaluate_local(const OverlapSeries& s,
                                 std::optional<Frame> radius);

MetricAccumulator lidf1(const OverlapSeries& s, const Horizon& h, double fps);
MetricAccumulator alta(const OverlapSeries& s, const Horizon& h, double fps);

struct CurvePoint {
  Horizon horizon;
  std::optional<Frame> frames;  // resolved radius; nullopt = strict
  double value = 0.0;
  MetricAccumulator accumulator;
};

struct HorizonCurve {
  LocalMetric metric = LocalMetric::ALTA;
  std::vector<CurvePoint> points;
};

HorizonCurve horizon_curve(const OverlapSeries& s, double fps,
                           std::span<const Horizon> horizons,
                           LocalMetric metric);

// One accumulator tagged with what it measures, for cross-sequence and
// cross-class aggregation.
struct LocalScore {
  LocalMetric metric = LocalMetric::ALTA;
  Horizon horizon;
  MetricAccumulator accumulator;
};

// Sums accumulators; classes are treated as further sequences. Throws
// ContractError when metric or horizon differ between entries.
LocalScore combine(std::span<const LocalScore> scores);

// Arithmetic mean; throws ContractError on an empty list.
double mean_over_horizons(std::span<const double> values);

}  // namespace localmot
