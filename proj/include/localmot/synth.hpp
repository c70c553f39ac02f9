#pragma once

// Synthetic predictions derived from ground truth by controlled edits, and a
// catalogue of small named scenarios.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "localmot/model.hpp"

namespace localmot {

struct Perturbation {
  enum class Kind { SplitAtFrame, MergeTracks, DropFrames, AddSpurious, JitterBoxes };

  Kind kind = Kind::JitterBoxes;
  // External ids the edit applies to; empty means every track (drop, jitter).
  std::vector<TrackId> tracks;
  Frame frame = 0;              // split: first frame of the new track
  std::vector<Frame> frames;    // drop: explicit frames
  double rate = 0.0;            // drop: per-box probability when frames is empty
  Frame first = 1, last = 1;    // spurious: frame span
  int count = 0;                // spurious: number of tracks
  double magnitude = 0.0;       // jitter: max offset in pixels per axis

  static Perturbation split(TrackId track, Frame at);
  // Moves every box of `from` into `into`; the tracks must not share a frame.
  static Perturbation merge(TrackId into, TrackId from);
  static Perturbation drop(std::vector<TrackId> tracks, std::vector<Frame> frames);
  static Perturbation drop_random(std::vector<TrackId> tracks, double rate);
  // `count` tracks over [first, last], placed clear of every existing box.
  static Perturbation spurious(int count, Frame first, Frame last);
  static Perturbation jitter(std::vector<TrackId> tracks, double magnitude);
};

// Applies the edits in order. New tracks take ids above the current maximum.
// Deterministic in (gt, edits, seed). Throws ContractError when a target
// track does not exist or a merge would put two boxes in one frame.
TrackSet apply(const TrackSet& gt, std::span<const Perturbation> edits, std::uint64_t seed);

// `count` non-overlapping straight-line tracks over [first, last] each.
TrackSet synthetic_ground_truth(int count, Frame first, Frame last);

struct Fixture {
  std::string name;
  Sequence sequence;
  // Metric name -> expected value. Empty for seeded fixtures, whose values
  // come from an independent oracle.
  std::map<std::string, double> expected;
};

std::vector<Fixture> fixture_catalog(std::uint64_t seed = 0);

// Writes <root>/gt/<name>/{gt/gt.txt, seqinfo.ini} and
// <root>/trackers/<tracker>/<name>.txt.
void write_fixture(const std::filesystem::path& root, const Fixture& fixture,
                   const std::string& tracker = "synth");

}  // namespace localmot
