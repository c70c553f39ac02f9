#include <gtest/gtest.h>

#include "localmot/error.hpp"
#include "localmot/overlap.hpp"
#include "localmot/synth.hpp"
#include "support/builders.hpp"
#include "support/oracle.hpp"
#include "support/random_sequence.hpp"

using namespace localmot;
using testsupport::track;
using testsupport::track_range;

TEST(Iou, Basics) {
  const Box a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, Box{10, 0, 10, 10}), 0.0);
  EXPECT_EQ(iou(a, Box{20, 20, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, Box{5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(iou(a, Box{0, 0, 5, 10}), 0.5);
}

TEST(OverlapSeries, ThresholdIsInclusive) {
  // IOU exactly 0.5.
  Track g = track(1, 0, {1});
  Track p;
  p.external_id = 2;
  p.boxes.emplace(1, Box{0, 0, 20, 80});
  const Sequence s = testsupport::sequence(1, {g}, {p});
  EXPECT_EQ(OverlapSeries::build(s, 0.5).pairs_at(1).size(), 1u);
  EXPECT_EQ(OverlapSeries::build(s, 0.5000001).pairs_at(1).size(), 0u);
}

TEST(OverlapSeries, RejectsBadThreshold) {
  const Sequence s = testsupport::sequence(1, {}, {});
  EXPECT_THROW(OverlapSeries::build(s, 0.0), ContractError);
  EXPECT_THROW(OverlapSeries::build(s, 1.5), ContractError);
  EXPECT_NO_THROW(OverlapSeries::build(s, 1.0));
}

TEST(OverlapSeries, IntervalCountsOnSplitFixture) {
  const Fixture s1 = fixture_catalog().front();
  ASSERT_EQ(s1.name, "S1");
  const OverlapSeries s = OverlapSeries::build(s1.sequence, 0.5);
  // g1 with p1 on [4, 6]: overlap 2, presence 3 and 2, union 3.
  const IntervalCounts c = s.interval_counts(0, 0, 4, 6);
  EXPECT_EQ(c.overlap, 2);
  EXPECT_EQ(c.presence_gt, 3);
  EXPECT_EQ(c.presence_pred, 2);
  EXPECT_EQ(c.union_count, 3);
  EXPECT_EQ(c.copresence, 2);
  EXPECT_EQ(s.overlap_total(0, 0), 5);
  EXPECT_EQ(s.overlap_total(0, 1), 5);
}

TEST(OverlapSeries, EmptyAndDisjointIntervals) {
  const Sequence seq = testsupport::sequence(10, {track_range(1, 0, 1, 3)}, {track_range(2, 0, 7, 9)});
  const OverlapSeries s = OverlapSeries::build(seq, 0.5);
  EXPECT_EQ(s.interval_counts(0, 0, 4, 6), IntervalCounts{});
  const IntervalCounts all = s.interval_counts(0, 0, 1, 10);
  EXPECT_EQ(all.overlap, 0);
  EXPECT_EQ(all.union_count, 6);
  EXPECT_EQ(s.gt_boxes(1, 10), 3);
  EXPECT_EQ(s.pred_boxes(8, 20), 2);
  EXPECT_EQ(s.gt_boxes(5, 4), 0);
  EXPECT_TRUE(s.pairs().empty());
}

TEST(OverlapSeries, PrefixCountsMatchDirectCounting) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Sequence seq = testsupport::random_sequence(seed, {12, 4, 4});
    const OverlapSeries s = OverlapSeries::build(seq, 0.5);
    const oracle::Boxes b = oracle::boxes_of(seq);
    const Frame T = seq.num_frames;
    for (Frame a = 1; a <= T; ++a) {
      for (Frame e = a; e <= T; ++e) {
        for (std::size_t i = 0; i < b.gt.size(); ++i) {
          for (std::size_t j = 0; j < b.pred.size(); ++j) {
            IntervalCounts want;
            for (Frame t = a; t <= e; ++t) {
              const bool g = b.gt[i][t].has_value(), p = b.pred[j][t].has_value();
              want.overlap += oracle::overlaps(b, i, j, t, 0.5);
              want.presence_gt += g;
              want.presence_pred += p;
              want.union_count += g || p;
              want.copresence += g && p;
            }
            ASSERT_EQ(s.interval_counts(i, j, a, e), want) << seed << " " << a << " " << e;
          }
        }
      }
    }
  }
}

TEST(OverlapSeries, FramePairsSortedWithIou) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Sequence seq = testsupport::random_sequence(seed, {8, 4, 4});
    const OverlapSeries s = OverlapSeries::build(seq, 0.5);
    const oracle::Boxes b = oracle::boxes_of(seq);
    for (Frame t = 1; t <= seq.num_frames; ++t) {
      std::vector<FramePair> want;
      for (std::size_t i = 0; i < b.gt.size(); ++i) {
        for (std::size_t j = 0; j < b.pred.size(); ++j) {
          if (oracle::overlaps(b, i, j, t, 0.5)) {
            want.push_back({i, j, oracle::iou(*b.gt[i][t], *b.pred[j][t])});
          }
        }
      }
      const auto got = s.pairs_at(t);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t k = 0; k < want.size(); ++k) {
        EXPECT_EQ(got[k].gt, want[k].gt);
        EXPECT_EQ(got[k].pred, want[k].pred);
        EXPECT_NEAR(got[k].iou, want[k].iou, 1e-15);
      }
    }
  }
}

TEST(CenteredWindow, ClipsToSequence) {
  EXPECT_EQ(centered_window(1, 2, 10).first, 1);
  EXPECT_EQ(centered_window(1, 2, 10).last, 3);
  EXPECT_EQ(centered_window(10, 2, 10).first, 8);
  EXPECT_EQ(centered_window(10, 2, 10).last, 10);
  EXPECT_EQ(centered_window(5, 0, 10).first, 5);
  EXPECT_EQ(centered_window(5, 100, 10).last, 10);
}
