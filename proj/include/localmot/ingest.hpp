#pragma once

// MOTChallenge text files -> Sequence.
//
// Rows: frame, id, bb_left, bb_top, bb_width, bb_height[, conf[, class[, visibility]]]
// Further fields are ignored.

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "localmot/model.hpp"

namespace localmot {

struct RawEntry {
  Frame frame = 1;
  TrackId id = 0;
  Box box;
  double conf = 1.0;
  int class_id = 1;
  double visibility = 1.0;

  friend bool operator==(const RawEntry&, const RawEntry&) = default;
};

// Throws ParseError (with the line number) on malformed rows and FormatError
// on a repeated (frame, id).
std::vector<RawEntry> parse_mot(std::istream& in);
std::vector<RawEntry> parse_mot(std::string_view text);
std::vector<RawEntry> read_mot_file(const std::filesystem::path& path);

// Writes all nine fields with round-trip precision.
void write_mot(std::ostream& out, std::span<const RawEntry> entries);
std::vector<RawEntry> to_entries(const TrackSet& tracks, double conf = 1.0,
                                 int class_id = 1);

struct ScoreThreshold {
  bool automatic = false;
  double value = -std::numeric_limits<double>::infinity();
  std::map<int, double> per_class;

  static ScoreThreshold fixed(double v);
  static ScoreThreshold select_automatically();
  // "auto" | "<real>" | "<class>=<real>[,<class>=<real>...]"
  static ScoreThreshold parse(std::string_view text);

  double for_class(std::optional<int> class_id) const;
};

struct IngestConfig {
  double iou_threshold = 0.5;
  std::set<int> gt_classes{1};
  double min_visibility = 0.0;
  ScoreThreshold score_threshold;
  std::optional<double> fps_override;
  std::optional<Frame> num_frames_override;

  void validate() const;
};

// [Sequence] frameRate / seqLength from a seqinfo.ini file.
struct SequenceInfo {
  std::optional<std::string> name;
  std::optional<double> frame_rate;
  std::optional<Frame> length;
};

SequenceInfo parse_seqinfo(std::istream& in);
SequenceInfo read_seqinfo(const std::filesystem::path& path);

// Keeps ground truth whose class is in cfg.gt_classes (or equals only_class
// when given) with visibility >= cfg.min_visibility, and predictions with
// conf >= the class threshold (and class == only_class when given). Tracks
// are grouped by id. T is cfg.num_frames_override or the last surviving
// frame; both sets empty gives T = 0.
Sequence build_sequence(std::string name, std::span<const RawEntry> gt,
                        std::span<const RawEntry> pred, const IngestConfig& cfg,
                        double fps, std::optional<int> only_class = std::nullopt);

struct ThresholdProblem {
  std::span<const RawEntry> gt;
  std::span<const RawEntry> pred;
};

// Distinct prediction confidences, ascending.
std::vector<double> candidate_thresholds(std::span<const ThresholdProblem> problems,
                                         std::optional<int> only_class = std::nullopt);

// Candidate threshold maximising pooled detection F1 over the problems
// (per-frame normalised, each problem weighted by 1/T with T its unfiltered
// frame extent). Ties go to the larger threshold.
double select_score_threshold(std::span<const ThresholdProblem> problems,
                              const IngestConfig& cfg,
                              std::span<const double> candidates,
                              std::optional<int> only_class = std::nullopt);

}  // namespace localmot
