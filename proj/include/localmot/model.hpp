#pragma once

// Domain types shared by every module. No I/O and no algorithms live here.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace localmot {

// Frames are 1-based throughout the public interface.
using Frame = int;
using TrackId = std::int64_t;

// Axis-aligned rectangle in pixels. width and height are strictly positive.
struct Box {
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;

  // Validating factory; throws ContractError on non-positive extent.
  static Box make(double left, double top, double width, double height);

  double right() const noexcept { return left + width; }
  double bottom() const noexcept { return top + height; }
  double area() const noexcept { return width * height; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct Track {
  TrackId external_id = 0;
  // Visibility set is exactly the key set.
  std::map<Frame, Box> boxes;

  std::size_t size() const noexcept { return boxes.size(); }
  Frame first_frame() const { return boxes.begin()->first; }
  Frame last_frame() const { return boxes.rbegin()->first; }
  const Box* box_at(Frame t) const;
};

enum class Role { GroundTruth, Predicted };

const char* to_string(Role role) noexcept;

// All tracks of one role in one sequence, ordered by external id.
class TrackSet {
 public:
  TrackSet() = default;
  explicit TrackSet(Role role);
  // Sorts by external id; throws ContractError on duplicate ids or empty tracks.
  TrackSet(Role role, std::vector<Track> tracks);

  Role role() const noexcept { return role_; }
  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  std::size_t size() const noexcept { return tracks_.size(); }
  bool empty() const noexcept { return tracks_.empty(); }
  const Track& operator[](std::size_t i) const { return tracks_[i]; }

  // Total number of boxes (N for ground truth, N-hat for predictions).
  std::size_t box_count() const noexcept;
  Frame max_frame() const noexcept;

  auto begin() const noexcept { return tracks_.begin(); }
  auto end() const noexcept { return tracks_.end(); }

 private:
  Role role_ = Role::GroundTruth;
  std::vector<Track> tracks_;
};

struct Sequence {
  std::string name;
  Frame num_frames = 0;
  double fps = 0.0;  // 0 = unknown
  TrackSet gt{Role::GroundTruth};
  TrackSet pred{Role::Predicted};

  // Throws FormatError when a box lies outside [1, num_frames] or fps is negative.
  void validate() const;

  // Exchanges the roles of ground truth and predictions.
  Sequence swapped() const;
};

// One-to-one correspondence between ground-truth rows (first) and predicted
// columns (second). Pairs are sorted ascending.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double objective = 0.0;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  // pi(i): partner column of row i.
  std::optional<std::size_t> partner_of_row(std::size_t row) const;
  // pi^-1(j): partner row of column j.
  std::optional<std::size_t> partner_of_col(std::size_t col) const;

  // Row -> column lookup table sized `rows`; unmatched rows hold nullopt.
  std::vector<std::optional<std::size_t>> row_map(std::size_t rows) const;
  std::vector<std::optional<std::size_t>> col_map(std::size_t cols) const;
};

// Numerator/denominator pair. Aggregation across windows, sequences and
// classes sums these instead of averaging ratios.
struct MetricAccumulator {
  double numerator = 0.0;
  double denominator = 0.0;

  // 0/0 is defined as 0.
  double value() const noexcept {
    return denominator > 0.0 ? numerator / denominator : 0.0;
  }

  MetricAccumulator& operator+=(const MetricAccumulator& other) noexcept {
    numerator += other.numerator;
    denominator += other.denominator;
    return *this;
  }

  friend bool operator==(const MetricAccumulator&,
                         const MetricAccumulator&) = default;
};

MetricAccumulator accumulator_merge(const MetricAccumulator& a,
                                    const MetricAccumulator& b) noexcept;

}  // namespace localmot
