#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "localmot/error.hpp"
#include "localmot/ingest.hpp"
#include "localmot/metrics.hpp"
#include "localmot/overlap.hpp"
#include "support/random_sequence.hpp"

using namespace localmot;

TEST(ParseMot, ReadsSixToNineFields) {
  const auto rows = parse_mot(
      "1,1,10,20,30,40\n"
      "2, 1, 10.5, 20, 30, 40, 0.9\r\n"
      "\n"
      "2,2,0,0,5,5,0.4,3,0.25\n"
      "3,2,0,0,5,5,0.4,3,0.25,extra,fields\n");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].frame, 1);
  EXPECT_EQ(rows[0].box, (Box{10, 20, 30, 40}));
  EXPECT_EQ(rows[0].conf, 1.0);
  EXPECT_EQ(rows[1].box.left, 10.5);
  EXPECT_EQ(rows[1].conf, 0.9);
  EXPECT_EQ(rows[2].class_id, 3);
  EXPECT_EQ(rows[2].visibility, 0.25);
  EXPECT_EQ(rows[3].frame, 3);
}

TEST(ParseMot, AcceptsIntegralFloats) {
  const auto rows = parse_mot("1.0,7.000,1,1,2,2,-1,-1,-1\n");
  EXPECT_EQ(rows[0].id, 7);
  EXPECT_EQ(rows[0].class_id, -1);
}

TEST(ParseMot, ReportsLineNumbers) {
  try {
    parse_mot("1,1,0,0,1,1\n1,2,0,0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_mot("x,1,0,0,1,1\n"), ParseError);
  EXPECT_THROW(parse_mot("1.5,1,0,0,1,1\n"), ParseError);
  EXPECT_THROW(parse_mot("0,1,0,0,1,1\n"), ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,0,1\n"), ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,1,-3\n"), ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,1,nan\n"), ParseError);
}

TEST(ParseMot, DuplicateFrameIdIsFormatError) {
  EXPECT_THROW(parse_mot("1,1,0,0,1,1\n1,1,5,5,1,1\n"), FormatError);
}

TEST(WriteMot, RoundTrips) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Sequence seq = testsupport::random_sequence(seed, {8, 4, 4});
    auto entries = to_entries(seq.pred, 0.123456789012345, 2);
    std::ostringstream out;
    write_mot(out, entries);
    EXPECT_EQ(parse_mot(out.str()), entries);
  }
}

TEST(ScoreThreshold, Parse) {
  EXPECT_TRUE(ScoreThreshold::parse("auto").automatic);
  EXPECT_EQ(ScoreThreshold::parse("0.5").value, 0.5);
  const auto per = ScoreThreshold::parse("1=0.3,2=0.7");
  EXPECT_EQ(per.for_class(1), 0.3);
  EXPECT_EQ(per.for_class(2), 0.7);
  EXPECT_EQ(per.for_class(std::nullopt), -INFINITY);
  EXPECT_THROW(ScoreThreshold::parse("abc"), ContractError);
  EXPECT_THROW(ScoreThreshold::parse("1=x"), ContractError);
  EXPECT_THROW(ScoreThreshold::select_automatically().for_class(1), ContractError);
}

TEST(Seqinfo, ParsesMotIni) {
  std::istringstream in("[Sequence]\nname=MOT17-02\nimDir=img1\nframeRate=30\nseqLength=600\n");
  const SequenceInfo info = parse_seqinfo(in);
  EXPECT_EQ(info.name, "MOT17-02");
  EXPECT_EQ(info.frame_rate, 30.0);
  EXPECT_EQ(info.length, 600);
  std::istringstream bad("[Sequence]\nframeRate=fast\n");
  EXPECT_THROW(parse_seqinfo(bad), FormatError);
  std::istringstream empty("");
  EXPECT_FALSE(parse_seqinfo(empty).frame_rate);
}

TEST(BuildSequence, FiltersClassesVisibilityAndScores) {
  const auto gt = parse_mot(
      "1,1,0,0,10,10,1,1,1\n"
      "1,2,50,0,10,10,1,2,1\n"      // other class
      "2,1,0,0,10,10,1,1,0.1\n");   // barely visible
  const auto pred = parse_mot(
      "1,5,0,0,10,10,0.9\n"
      "2,5,0,0,10,10,0.2\n"
      "4,6,0,0,10,10,0.95\n");
  IngestConfig cfg;
  cfg.min_visibility = 0.5;
  cfg.score_threshold = ScoreThreshold::fixed(0.5);
  const Sequence seq = build_sequence("s", gt, pred, cfg, 25.0);
  EXPECT_EQ(seq.gt.box_count(), 1u);
  EXPECT_EQ(seq.pred.box_count(), 2u);
  EXPECT_EQ(seq.num_frames, 4);
  EXPECT_EQ(seq.fps, 25.0);

  cfg.gt_classes = {1, 2};
  cfg.num_frames_override = 10;
  EXPECT_EQ(build_sequence("s", gt, pred, cfg, 25.0).gt.size(), 2u);
  EXPECT_EQ(build_sequence("s", gt, pred, cfg, 25.0).num_frames, 10);
  EXPECT_EQ(build_sequence("s", gt, pred, cfg, 25.0, 2).gt.size(), 1u);

  cfg.num_frames_override = 3;
  EXPECT_THROW(build_sequence("s", gt, pred, cfg, 25.0), FormatError);
  cfg.num_frames_override.reset();
  cfg.score_threshold = ScoreThreshold::select_automatically();
  EXPECT_THROW(build_sequence("s", gt, pred, cfg, 25.0), ContractError);
}

TEST(BuildSequence, EmptyInputsGiveEmptySequence) {
  const Sequence seq = build_sequence("s", {}, {}, IngestConfig{}, 10.0);
  EXPECT_EQ(seq.num_frames, 0);
  EXPECT_TRUE(seq.gt.empty());
}

namespace {

// Pooled DetF1 at threshold tau by building every sequence from scratch.
double pooled_det_f1(const std::vector<std::vector<RawEntry>>& gts,
                     const std::vector<std::vector<RawEntry>>& preds, double tau) {
  MetricAccumulator acc;
  for (std::size_t k = 0; k < gts.size(); ++k) {
    IngestConfig cfg;
    cfg.score_threshold = ScoreThreshold::fixed(tau);
    Frame T = 0;
    for (const auto& e : gts[k]) T = std::max(T, e.frame);
    for (const auto& e : preds[k]) T = std::max(T, e.frame);
    cfg.num_frames_override = T;
    const Sequence seq = build_sequence("s", gts[k], preds[k], cfg, 10.0);
    acc += det_f1(OverlapSeries::build(seq, 0.5)).accumulator;
  }
  return acc.value();
}

}  // namespace

TEST(SelectScoreThreshold, MatchesRecomputation) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    testsupport::Uniform u(seed * 31 + 1);
    std::vector<std::vector<RawEntry>> gts, preds;
    std::vector<ThresholdProblem> problems;
    for (int k = 0; k < 3; ++k) {
      const Sequence seq = testsupport::random_sequence(seed * 3 + k, {10, 4, 5});
      gts.push_back(to_entries(seq.gt));
      auto pred = to_entries(seq.pred);
      // Coarse confidences so equal-confidence groups occur.
      for (auto& e : pred) e.conf = std::round(u() * 8.0) / 8.0;
      preds.push_back(std::move(pred));
    }
    for (std::size_t k = 0; k < gts.size(); ++k) problems.push_back({gts[k], preds[k]});
    const auto candidates = candidate_thresholds(problems);
    if (candidates.empty()) continue;
    const double chosen = select_score_threshold(problems, IngestConfig{}, candidates);

    double best = -1.0, best_tau = 0.0;
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
      const double f = pooled_det_f1(gts, preds, *it);
      if (f > best + 1e-12 * std::max(1.0, f)) {
        best = f;
        best_tau = *it;
      }
    }
    EXPECT_EQ(chosen, best_tau) << "seed " << seed;
    EXPECT_NEAR(pooled_det_f1(gts, preds, chosen), best, 1e-12);
  }
}

TEST(SelectScoreThreshold, PrefersLargerThresholdOnTies) {
  // A spurious low-confidence box only lowers precision.
  const auto gt = parse_mot("1,1,0,0,10,10\n");
  const auto pred = parse_mot("1,1,0,0,10,10,0.9\n1,2,50,50,10,10,0.3\n");
  const ThresholdProblem problems[] = {{gt, pred}};
  const auto candidates = candidate_thresholds(problems);
  EXPECT_EQ(candidates, (std::vector<double>{0.3, 0.9}));
  EXPECT_EQ(select_score_threshold(problems, IngestConfig{}, candidates), 0.9);
}

TEST(ReadMotFile, PrefixesPath) {
  const auto path = std::filesystem::temp_directory_path() / "localmot_bad.txt";
  std::ofstream(path) << "1,1,0,0,1,1\nbad\n";
  try {
    read_mot_file(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("localmot_bad.txt"), std::string::npos);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(read_mot_file("/nonexistent/file.txt"), Error);
}
