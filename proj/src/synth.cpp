#include "localmot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "localmot/error.hpp"
#include "localmot/ingest.hpp"

namespace localmot {

namespace {

// Uniform [0, 1) from the top 53 bits, identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

using TrackMap = std::map<TrackId, Track>;

Track& find(TrackMap& tracks, TrackId id) {
  auto it = tracks.find(id);
  if (it == tracks.end()) throw ContractError("no track with id " + std::to_string(id));
  return it->second;
}

std::vector<Track*> selected(TrackMap& tracks, const std::vector<TrackId>& ids) {
  std::vector<Track*> out;
  if (ids.empty()) {
    for (auto& [id, track] : tracks) out.push_back(&track);
  } else {
    for (TrackId id : ids) out.push_back(&find(tracks, id));
  }
  return out;
}

TrackId next_id(const TrackMap& tracks) {
  return tracks.empty() ? 1 : tracks.rbegin()->first + 1;
}

void erase_empty(TrackMap& tracks) {
  std::erase_if(tracks, [](const auto& kv) { return kv.second.boxes.empty(); });
}

}  // namespace

Perturbation Perturbation::split(TrackId track, Frame at) {
  Perturbation p;
  p.kind = Kind::SplitAtFrame;
  p.tracks = {track};
  p.frame = at;
  return p;
}

Perturbation Perturbation::merge(TrackId into, TrackId from) {
  Perturbation p;
  p.kind = Kind::MergeTracks;
  p.tracks = {into, from};
  return p;
}

Perturbation Perturbation::drop(std::vector<TrackId> tracks, std::vector<Frame> frames) {
  Perturbation p;
  p.kind = Kind::DropFrames;
  p.tracks = std::move(tracks);
  p.frames = std::move(frames);
  return p;
}

Perturbation Perturbation::drop_random(std::vector<TrackId> tracks, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ContractError("drop rate must lie in [0, 1]");
  Perturbation p;
  p.kind = Kind::DropFrames;
  p.tracks = std::move(tracks);
  p.rate = rate;
  return p;
}

Perturbation Perturbation::spurious(int count, Frame first, Frame last) {
  if (count < 0 || first < 1 || last < first) {
    throw ContractError("spurious tracks need count >= 0 and 1 <= first <= last");
  }
  Perturbation p;
  p.kind = Kind::AddSpurious;
  p.count = count;
  p.first = first;
  p.last = last;
  return p;
}

Perturbation Perturbation::jitter(std::vector<TrackId> tracks, double magnitude) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw ContractError("jitter magnitude must be finite and non-negative");
  }
  Perturbation p;
  p.kind = Kind::JitterBoxes;
  p.tracks = std::move(tracks);
  p.magnitude = magnitude;
  return p;
}

TrackSet apply(const TrackSet& gt, std::span<const Perturbation> edits, std::uint64_t seed) {
  Rng rng(seed);
  TrackMap tracks;
  for (const Track& t : gt) tracks.emplace(t.external_id, t);

  for (const Perturbation& p : edits) {
    switch (p.kind) {
      case Perturbation::Kind::SplitAtFrame: {
        if (p.tracks.size() != 1) throw ContractError("split needs exactly one track");
        Track& source = find(tracks, p.tracks.front());
        Track tail;
        tail.external_id = next_id(tracks);
        auto cut = source.boxes.lower_bound(p.frame);
        tail.boxes.insert(cut, source.boxes.end());
        source.boxes.erase(cut, source.boxes.end());
        if (!tail.boxes.empty()) tracks.emplace(tail.external_id, std::move(tail));
        break;
      }
      case Perturbation::Kind::MergeTracks: {
        if (p.tracks.size() != 2 || p.tracks[0] == p.tracks[1]) {
          throw ContractError("merge needs two distinct tracks");
        }
        Track& into = find(tracks, p.tracks[0]);
        Track& from = find(tracks, p.tracks[1]);
        for (const auto& [t, box] : from.boxes) {
          if (into.boxes.count(t)) {
            throw ContractError("cannot merge tracks " + std::to_string(p.tracks[0]) +
                                " and " + std::to_string(p.tracks[1]) +
                                ": both present at frame " + std::to_string(t));
          }
        }
        into.boxes.insert(from.boxes.begin(), from.boxes.end());
        tracks.erase(p.tracks[1]);
        break;
      }
      case Perturbation::Kind::DropFrames: {
        for (Track* track : selected(tracks, p.tracks)) {
          if (!p.frames.empty()) {
            for (Frame t : p.frames) track->boxes.erase(t);
          } else {
            for (auto it = track->boxes.begin(); it != track->boxes.end();) {
              it = rng.uniform() < p.rate ? track->boxes.erase(it) : std::next(it);
            }
          }
        }
        erase_empty(tracks);
        break;
      }
      case Perturbation::Kind::AddSpurious: {
        double right = 0.0, height = 80.0;
        for (const auto& [id, track] : tracks) {
          for (const auto& [t, box] : track.boxes) right = std::max(right, box.right());
        }
        for (int k = 0; k < p.count; ++k) {
          Track track;
          track.external_id = next_id(tracks);
          for (Frame t = p.first; t <= p.last; ++t) {
            track.boxes.emplace(t, Box{right + 100.0 * (k + 1), 50.0, 40.0, height});
          }
          tracks.emplace(track.external_id, std::move(track));
        }
        break;
      }
      case Perturbation::Kind::JitterBoxes: {
        for (Track* track : selected(tracks, p.tracks)) {
          for (auto& [t, box] : track->boxes) {
            box.left += rng.uniform(-p.magnitude, p.magnitude);
            box.top += rng.uniform(-p.magnitude, p.magnitude);
          }
        }
        break;
      }
    }
  }

  std::vector<Track> out;
  out.reserve(tracks.size());
  for (auto& [id, track] : tracks) out.push_back(std::move(track));
  return TrackSet(Role::Predicted, std::move(out));
}

TrackSet synthetic_ground_truth(int count, Frame first, Frame last) {
  if (count < 0 || first < 1 || last < first) {
    throw ContractError("ground truth needs count >= 0 and 1 <= first <= last");
  }
  std::vector<Track> tracks;
  for (int k = 0; k < count; ++k) {
    Track track;
    track.external_id = k + 1;
    for (Frame t = first; t <= last; ++t) {
      track.boxes.emplace(t, Box{100.0 * k + 2.0 * t, 50.0, 40.0, 80.0});
    }
    tracks.push_back(std::move(track));
  }
  return TrackSet(Role::GroundTruth, std::move(tracks));
}

namespace {

Sequence make_sequence(std::string name, Frame T, TrackSet gt, TrackSet pred) {
  Sequence seq;
  seq.name = std::move(name);
  seq.num_frames = T;
  seq.fps = 10.0;
  seq.gt = TrackSet(Role::GroundTruth, gt.tracks());
  seq.pred = TrackSet(Role::Predicted, pred.tracks());
  seq.validate();
  return seq;
}

TrackSet with_tracks(std::vector<Track> tracks, Role role) {
  return TrackSet(role, std::move(tracks));
}

}  // namespace

std::vector<Fixture> fixture_catalog(std::uint64_t seed) {
  std::vector<Fixture> out;
  const TrackSet one = synthetic_ground_truth(1, 1, 10);
  const TrackSet two = synthetic_ground_truth(2, 1, 10);

  {
    const Perturbation edits[] = {Perturbation::split(1, 6)};
    out.push_back({"S1", make_sequence("S1", 10, one, apply(one, edits, seed)),
                   {{"det_f1", 1.0},
                    {"idf1", 0.5},
                    {"ata", 1.0 / 3.0},
                    {"atr", 0.5},
                    {"atp", 0.25},
                    {"alta_1f", 28.0 / 33.0},
                    {"mota", 0.9},
                    {"id_switches", 1.0},
                    {"split_fraction", 1.0},
                    {"merge_fraction", 0.0},
                    {"det_fn_fraction", 0.0},
                    {"det_fp_fraction", 0.0}}});
  }
  {
    // Two consecutive ground-truth tracks covered by one prediction.
    Track a = one[0], b = one[0];
    a.boxes.erase(a.boxes.lower_bound(6), a.boxes.end());
    b.external_id = 2;
    b.boxes.erase(b.boxes.begin(), b.boxes.lower_bound(6));
    const TrackSet gt = with_tracks({a, b}, Role::GroundTruth);
    const Perturbation edits[] = {Perturbation::merge(1, 2)};
    out.push_back({"S2", make_sequence("S2", 10, gt, apply(gt, edits, seed)),
                   {{"det_f1", 1.0},
                    {"idf1", 0.5},
                    {"ata", 1.0 / 3.0},
                    {"atr", 0.25},
                    {"atp", 0.5},
                    {"alta_1f", 28.0 / 33.0},
                    {"split_fraction", 0.0},
                    {"merge_fraction", 1.0},
                    {"det_fn_fraction", 0.0},
                    {"det_fp_fraction", 0.0}}});
  }
  out.push_back({"perfect", make_sequence("perfect", 10, two, apply(two, {}, seed)),
                 {{"det_f1", 1.0},
                  {"idf1", 1.0},
                  {"ata", 1.0},
                  {"alta_1f", 1.0},
                  {"mota", 1.0},
                  {"id_switches", 0.0},
                  {"approx_ata", 1.0},
                  {"error_mass", 0.0}}});
  {
    std::vector<Frame> all;
    for (Frame t = 1; t <= 10; ++t) all.push_back(t);
    const Perturbation edits[] = {Perturbation::drop({2}, all)};
    out.push_back({"fn_only", make_sequence("fn_only", 10, two, apply(two, edits, seed)),
                   {{"det_f1", 2.0 / 3.0},
                    {"ata", 2.0 / 3.0},
                    {"atr", 0.5},
                    {"atp", 1.0},
                    {"det_fn_fraction", 1.0}}});
  }
  {
    const Perturbation edits[] = {Perturbation::spurious(1, 1, 10)};
    out.push_back({"fp_only", make_sequence("fp_only", 10, one, apply(one, edits, seed)),
                   {{"det_f1", 2.0 / 3.0},
                    {"ata", 2.0 / 3.0},
                    {"atr", 1.0},
                    {"atp", 0.5},
                    {"det_fp_fraction", 1.0}}});
  }
  {
    const TrackSet gt = synthetic_ground_truth(1, 1, 4);
    const Perturbation edits[] = {Perturbation::drop({1}, {2, 4})};
    out.push_back({"fn_alternating",
                   make_sequence("fn_alternating", 4, gt, apply(gt, edits, seed)),
                   {{"ata", 0.5}, {"det_fn_fraction", 1.0}}});
  }
  {
    // Small offsets keep every IOU above the threshold.
    const Perturbation edits[] = {Perturbation::jitter({}, 2.0)};
    out.push_back({"jitter", make_sequence("jitter", 10, two, apply(two, edits, seed)),
                   {{"det_f1", 1.0}, {"idf1", 1.0}, {"ata", 1.0}, {"alta_1f", 1.0}}});
  }
  {
    std::vector<Track> tracks = synthetic_ground_truth(4, 1, 30).tracks();
    tracks[2].boxes.erase(tracks[2].boxes.lower_bound(15), tracks[2].boxes.end());
    tracks[3].boxes.erase(tracks[3].boxes.begin(), tracks[3].boxes.lower_bound(17));
    for (auto& [t, box] : tracks[3].boxes) box.left = tracks[2].boxes.begin()->second.left + 2.0 * t;
    const TrackSet gt = with_tracks(std::move(tracks), Role::GroundTruth);
    const Perturbation edits[] = {Perturbation::split(1, 12),
                                  Perturbation::merge(3, 4),
                                  Perturbation::drop_random({}, 0.1),
                                  Perturbation::spurious(1, 5, 20),
                                  Perturbation::jitter({}, 3.0)};
    out.push_back({"mixed", make_sequence("mixed", 30, gt, apply(gt, edits, seed + 1)), {}});
  }
  return out;
}

void write_fixture(const std::filesystem::path& root, const Fixture& fixture,
                   const std::string& tracker) {
  namespace fs = std::filesystem;
  const fs::path seq_dir = root / "gt" / fixture.name;
  fs::create_directories(seq_dir / "gt");
  fs::create_directories(root / "trackers" / tracker);

  const auto open = [](const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
  };
  {
    auto out = open(seq_dir / "gt" / "gt.txt");
    const auto entries = to_entries(fixture.sequence.gt, 1.0, 1);
    write_mot(out, entries);
  }
  {
    auto out = open(root / "trackers" / tracker / (fixture.name + ".txt"));
    const auto entries = to_entries(fixture.sequence.pred, 1.0, 1);
    write_mot(out, entries);
  }
  {
    auto out = open(seq_dir / "seqinfo.ini");
    out << "[Sequence]\nname=" << fixture.name << "\nframeRate=" << fixture.sequence.fps
        << "\nseqLength=" << fixture.sequence.num_frames << "\n";
  }
}

}  // namespace localmot
