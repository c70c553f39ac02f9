#include "localmot/model.hpp"

#include <algorithm>
#include <cmath>

#include "localmot/error.hpp"

namespace localmot {

Box Box::make(double left, double top, double width, double height) {
  if (!std::isfinite(left) || !std::isfinite(top) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw ContractError("box coordinates must be finite");
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw ContractError("box width and height must be positive");
  }
  return Box{left, top, width, height};
}

const Box* Track::box_at(Frame t) const {
  auto it = boxes.find(t);
  return it == boxes.end() ? nullptr : &it->second;
}

const char* to_string(Role role) noexcept {
  return role == Role::GroundTruth ? "gt" : "pred";
}

TrackSet::TrackSet(Role role) : role_(role) {}

TrackSet::TrackSet(Role role, std::vector<Track> tracks)
    : role_(role), tracks_(std::move(tracks)) {
  std::sort(tracks_.begin(), tracks_.end(),
            [](const Track& a, const Track& b) {
              return a.external_id < b.external_id;
            });
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].boxes.empty()) {
      throw ContractError("track " + std::to_string(tracks_[i].external_id) +
                          " has no boxes");
    }
    if (i > 0 && tracks_[i].external_id == tracks_[i - 1].external_id) {
      throw ContractError("duplicate track id " +
                          std::to_string(tracks_[i].external_id));
    }
  }
}

std::size_t TrackSet::box_count() const noexcept {
  std::size_t n = 0;
  for (const auto& track : tracks_) n += track.size();
  return n;
}

Frame TrackSet::max_frame() const noexcept {
  Frame t = 0;
  for (const auto& track : tracks_) t = std::max(t, track.last_frame());
  return t;
}

void Sequence::validate() const {
  if (!(fps >= 0.0) || !std::isfinite(fps)) {
    throw FormatError("sequence '" + name + "': fps must be finite and non-negative");
  }
  if (num_frames < 0) {
    throw FormatError("sequence '" + name + "': negative frame count");
  }
  for (const TrackSet* set : {&gt, &pred}) {
    for (const auto& track : *set) {
      if (track.first_frame() < 1 || track.last_frame() > num_frames) {
        throw FormatError("sequence '" + name + "': " + to_string(set->role()) +
                          " track " + std::to_string(track.external_id) +
                          " has frames outside [1, " +
                          std::to_string(num_frames) + "]");
      }
    }
  }
}

Sequence Sequence::swapped() const {
  Sequence out;
  out.name = name;
  out.num_frames = num_frames;
  out.fps = fps;
  out.gt = TrackSet(Role::GroundTruth, pred.tracks());
  out.pred = TrackSet(Role::Predicted, gt.tracks());
  return out;
}

std::optional<std::size_t> Matching::partner_of_row(std::size_t row) const {
  for (const auto& [i, j] : pairs) {
    if (i == row) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> Matching::partner_of_col(std::size_t col) const {
  for (const auto& [i, j] : pairs) {
    if (j == col) return i;
  }
  return std::nullopt;
}

std::vector<std::optional<std::size_t>> Matching::row_map(
    std::size_t rows) const {
  std::vector<std::optional<std::size_t>> out(rows);
  for (const auto& [i, j] : pairs) {
    if (i < rows) out[i] = j;
  }
  return out;
}

std::vector<std::optional<std::size_t>> Matching::col_map(
    std::size_t cols) const {
  std::vector<std::optional<std::size_t>> out(cols);
  for (const auto& [i, j] : pairs) {
    if (j < cols) out[j] = i;
  }
  return out;
}

MetricAccumulator accumulator_merge(const MetricAccumulator& a,
                                    const MetricAccumulator& b) noexcept {
  MetricAccumulator out = a;
  out += b;
  return out;
}

}  // namespace localmot
