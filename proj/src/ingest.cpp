#include "localmot/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "localmot/error.hpp"
#include "localmot/overlap.hpp"

namespace localmot {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> to_number(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

template <typename Int>
std::optional<Int> to_integer(std::string_view field) {
  const auto v = to_number(field);
  if (!v || std::trunc(*v) != *v) return std::nullopt;
  if (*v < static_cast<double>(std::numeric_limits<Int>::min()) ||
      *v > static_cast<double>(std::numeric_limits<Int>::max())) {
    return std::nullopt;
  }
  return static_cast<Int>(*v);
}

struct PairHash {
  std::size_t operator()(const std::pair<Frame, TrackId>& p) const noexcept {
    return std::hash<TrackId>{}(p.second) * 1000003u ^ std::hash<Frame>{}(p.first);
  }
};

}  // namespace

std::vector<RawEntry> parse_mot(std::istream& in) {
  std::vector<RawEntry> out;
  std::unordered_set<std::pair<Frame, TrackId>, PairHash> seen;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;

    fields.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      fields.push_back(text.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 6) {
      throw ParseError(line_no, "expected at least 6 comma-separated fields, got " +
                                    std::to_string(fields.size()));
    }

    RawEntry e;
    const auto frame = to_integer<Frame>(fields[0]);
    const auto id = to_integer<TrackId>(fields[1]);
    if (!frame) throw ParseError(line_no, "frame is not an integer");
    if (!id) throw ParseError(line_no, "id is not an integer");
    if (*frame < 1) throw ParseError(line_no, "frame must be >= 1");
    e.frame = *frame;
    e.id = *id;

    double coords[4];
    for (int k = 0; k < 4; ++k) {
      const auto v = to_number(fields[2 + k]);
      if (!v) throw ParseError(line_no, "box field " + std::to_string(3 + k) + " is not numeric");
      coords[k] = *v;
    }
    if (!(coords[2] > 0.0) || !(coords[3] > 0.0)) {
      throw ParseError(line_no, "box width and height must be positive");
    }
    e.box = Box{coords[0], coords[1], coords[2], coords[3]};

    if (fields.size() > 6) {
      const auto v = to_number(fields[6]);
      if (!v) throw ParseError(line_no, "conf is not numeric");
      e.conf = *v;
    }
    if (fields.size() > 7) {
      const auto v = to_integer<int>(fields[7]);
      if (!v) throw ParseError(line_no, "class is not an integer");
      e.class_id = *v;
    }
    if (fields.size() > 8) {
      const auto v = to_number(fields[8]);
      if (!v) throw ParseError(line_no, "visibility is not numeric");
      e.visibility = *v;
    }

    if (!seen.emplace(e.frame, e.id).second) {
      throw FormatError("line " + std::to_string(line_no) + ": duplicate row for frame " +
                        std::to_string(e.frame) + ", id " + std::to_string(e.id));
    }
    out.push_back(e);
  }
  return out;
}

std::vector<RawEntry> parse_mot(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_mot(in);
}

std::vector<RawEntry> read_mot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_mot(in);
  } catch (const ParseError& e) {
    const std::string prefix = "line " + std::to_string(e.line()) + ": ";
    throw ParseError(e.line(), path.string() + ": " + std::string(e.what()).substr(prefix.size()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_mot(std::ostream& out, std::span<const RawEntry> entries) {
  const auto num = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
  };
  for (const RawEntry& e : entries) {
    out << e.frame << ',' << e.id << ',' << num(e.box.left) << ',' << num(e.box.top)
        << ',' << num(e.box.width) << ',' << num(e.box.height) << ',' << num(e.conf)
        << ',' << e.class_id << ',' << num(e.visibility) << '\n';
  }
}

std::vector<RawEntry> to_entries(const TrackSet& tracks, double conf, int class_id) {
  std::vector<RawEntry> out;
  for (const Track& track : tracks) {
    for (const auto& [t, box] : track.boxes) {
      out.push_back(RawEntry{t, track.external_id, box, conf, class_id, 1.0});
    }
  }
  std::sort(out.begin(), out.end(), [](const RawEntry& a, const RawEntry& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

ScoreThreshold ScoreThreshold::fixed(double v) {
  ScoreThreshold s;
  s.value = v;
  return s;
}

ScoreThreshold ScoreThreshold::select_automatically() {
  ScoreThreshold s;
  s.automatic = true;
  return s;
}

ScoreThreshold ScoreThreshold::parse(std::string_view text) {
  text = trim(text);
  if (text == "auto") return select_automatically();
  if (text.find('=') == std::string_view::npos) {
    const auto v = to_number(text);
    if (!v) throw ContractError("invalid score threshold '" + std::string(text) + "'");
    return fixed(*v);
  }
  ScoreThreshold s;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                           : comma - start);
    const std::size_t eq = item.find('=');
    const auto cls = eq == std::string_view::npos ? std::nullopt
                                                  : to_integer<int>(item.substr(0, eq));
    const auto v = eq == std::string_view::npos ? std::nullopt : to_number(item.substr(eq + 1));
    if (!cls || !v) {
      throw ContractError("invalid per-class score threshold '" + std::string(item) + "'");
    }
    s.per_class[*cls] = *v;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return s;
}

double ScoreThreshold::for_class(std::optional<int> class_id) const {
  if (automatic) {
    throw ContractError("automatic score threshold must be resolved before filtering");
  }
  if (class_id) {
    auto it = per_class.find(*class_id);
    if (it != per_class.end()) return it->second;
  }
  return value;
}

void IngestConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ContractError("iou threshold must lie in (0, 1]");
  }
  if (fps_override && !(*fps_override > 0.0)) {
    throw ContractError("fps must be positive");
  }
  if (num_frames_override && *num_frames_override < 0) {
    throw ContractError("frame count must be non-negative");
  }
}

SequenceInfo parse_seqinfo(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("seqinfo: ") + e.what());
  }
  SequenceInfo info;
  const auto section = tree.get_child_optional("Sequence");
  if (!section) return info;
  if (auto v = section->get_optional<std::string>("name")) info.name = *v;
  if (auto v = section->get_optional<std::string>("frameRate")) {
    const auto n = to_number(*v);
    if (!n || !(*n > 0.0)) throw FormatError("seqinfo: invalid frameRate '" + *v + "'");
    info.frame_rate = *n;
  }
  if (auto v = section->get_optional<std::string>("seqLength")) {
    const auto n = to_integer<Frame>(*v);
    if (!n || *n < 0) throw FormatError("seqinfo: invalid seqLength '" + *v + "'");
    info.length = *n;
  }
  return info;
}

SequenceInfo read_seqinfo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_seqinfo(in);
}

namespace {

bool keep_gt(const RawEntry& e, const IngestConfig& cfg, std::optional<int> only_class) {
  const bool class_ok = only_class ? e.class_id == *only_class
                                   : cfg.gt_classes.count(e.class_id) > 0;
  return class_ok && e.visibility >= cfg.min_visibility;
}

bool keep_pred_class(const RawEntry& e, std::optional<int> only_class) {
  return !only_class || e.class_id == *only_class;
}

std::vector<Track> group_tracks(std::span<const RawEntry> entries,
                                const std::vector<char>& keep) {
  std::map<TrackId, Track> by_id;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!keep[k]) continue;
    const RawEntry& e = entries[k];
    Track& track = by_id[e.id];
    track.external_id = e.id;
    if (!track.boxes.emplace(e.frame, e.box).second) {
      throw FormatError("duplicate box for frame " + std::to_string(e.frame) +
                        ", id " + std::to_string(e.id));
    }
  }
  std::vector<Track> out;
  out.reserve(by_id.size());
  for (auto& [id, track] : by_id) out.push_back(std::move(track));
  return out;
}

}  // namespace

Sequence build_sequence(std::string name, std::span<const RawEntry> gt,
                        std::span<const RawEntry> pred, const IngestConfig& cfg,
                        double fps, std::optional<int> only_class) {
  cfg.validate();
  std::vector<char> keep(gt.size());
  for (std::size_t k = 0; k < gt.size(); ++k) keep[k] = keep_gt(gt[k], cfg, only_class);
  auto gt_tracks = group_tracks(gt, keep);

  const double threshold = cfg.score_threshold.for_class(only_class);
  keep.assign(pred.size(), 0);
  for (std::size_t k = 0; k < pred.size(); ++k) {
    keep[k] = keep_pred_class(pred[k], only_class) && pred[k].conf >= threshold;
  }
  auto pred_tracks = group_tracks(pred, keep);

  Sequence seq;
  seq.name = std::move(name);
  seq.fps = cfg.fps_override.value_or(fps);
  seq.gt = TrackSet(Role::GroundTruth, std::move(gt_tracks));
  seq.pred = TrackSet(Role::Predicted, std::move(pred_tracks));
  seq.num_frames = cfg.num_frames_override.value_or(
      std::max(seq.gt.max_frame(), seq.pred.max_frame()));
  seq.validate();
  return seq;
}

std::vector<double> candidate_thresholds(std::span<const ThresholdProblem> problems,
                                         std::optional<int> only_class) {
  std::vector<double> out;
  for (const auto& p : problems) {
    for (const RawEntry& e : p.pred) {
      if (keep_pred_class(e, only_class)) out.push_back(e.conf);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Change in pooled counts once predictions with conf >= `conf` are admitted.
struct ThresholdEvent {
  double conf = 0.0;
  double tp = 0.0;     // weighted by 1/T
  double boxes = 0.0;  // weighted by 1/T
};

// Bipartite matching grown one prediction at a time: admitting a vertex
// raises the maximum cardinality by at most one, found by a single augmenting
// path search from it.
class IncrementalMatcher {
 public:
  IncrementalMatcher(std::size_t num_gt, std::vector<std::vector<std::size_t>> adjacency)
      : adjacency_(std::move(adjacency)),
        gt_partner_(num_gt, kFree),
        visited_(num_gt, 0) {}

  bool admit(std::size_t pred) {
    ++stamp_;
    return augment(pred);
  }

 private:
  static constexpr std::size_t kFree = static_cast<std::size_t>(-1);

  bool augment(std::size_t pred) {
    for (std::size_t g : adjacency_[pred]) {
      if (visited_[g] == stamp_) continue;
      visited_[g] = stamp_;
      if (gt_partner_[g] == kFree || augment(gt_partner_[g])) {
        gt_partner_[g] = pred;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::size_t> gt_partner_;
  std::vector<unsigned> visited_;
  unsigned stamp_ = 0;
};

}  // namespace

double select_score_threshold(std::span<const ThresholdProblem> problems,
                              const IngestConfig& cfg,
                              std::span<const double> candidates,
                              std::optional<int> only_class) {
  cfg.validate();
  if (candidates.empty()) throw ContractError("no candidate thresholds");

  std::vector<ThresholdEvent> events;
  double gt_weight = 0.0;
  for (const auto& problem : problems) {
    Frame T = 0;
    for (const RawEntry& e : problem.gt) T = std::max(T, e.frame);
    for (const RawEntry& e : problem.pred) T = std::max(T, e.frame);
    if (T == 0) continue;
    const double w = 1.0 / T;

    std::map<Frame, std::vector<const RawEntry*>> gt_by_frame, pred_by_frame;
    for (const RawEntry& e : problem.gt) {
      if (keep_gt(e, cfg, only_class)) gt_by_frame[e.frame].push_back(&e);
    }
    for (const RawEntry& e : problem.pred) {
      if (keep_pred_class(e, only_class)) pred_by_frame[e.frame].push_back(&e);
    }
    std::size_t n_gt = 0;
    for (const auto& [t, boxes] : gt_by_frame) n_gt += boxes.size();
    gt_weight += static_cast<double>(n_gt) * w;

    for (auto& [t, preds] : pred_by_frame) {
      std::stable_sort(preds.begin(), preds.end(),
                       [](const RawEntry* a, const RawEntry* b) { return a->conf > b->conf; });
      const auto git = gt_by_frame.find(t);
      const std::vector<const RawEntry*> empty;
      const auto& gts = git == gt_by_frame.end() ? empty : git->second;
      std::vector<std::vector<std::size_t>> adjacency(preds.size());
      for (std::size_t p = 0; p < preds.size(); ++p) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
          if (iou(preds[p]->box, gts[g]->box) >= cfg.iou_threshold) adjacency[p].push_back(g);
        }
      }
      IncrementalMatcher matcher(gts.size(), std::move(adjacency));
      std::size_t p = 0;
      while (p < preds.size()) {
        const double conf = preds[p]->conf;
        int gained = 0, admitted = 0;
        for (; p < preds.size() && preds[p]->conf == conf; ++p) {
          gained += matcher.admit(p);
          ++admitted;
        }
        events.push_back({conf, gained * w, admitted * w});
      }
    }
  }

  std::sort(events.begin(), events.end(), [](const ThresholdEvent& a, const ThresholdEvent& b) {
    return a.conf > b.conf;
  });
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  double tp = 0.0, boxes = 0.0;
  std::size_t k = 0;
  double best_value = -1.0;
  double best = sorted.front();
  for (double tau : sorted) {
    for (; k < events.size() && events[k].conf >= tau; ++k) {
      tp += events[k].tp;
      boxes += events[k].boxes;
    }
    const double den = gt_weight + boxes;
    const double f1 = den > 0.0 ? 2.0 * tp / den : 0.0;
    // Descending sweep: only a strictly better score moves to a smaller threshold.
    if (f1 > best_value + 1e-12 * std::max(1.0, f1)) {
      best_value = f1;
      best = tau;
    }
  }
  return best;
}

}  // namespace localmot
