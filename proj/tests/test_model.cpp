#include <gtest/gtest.h>

#include <cmath>

#include "localmot/error.hpp"
#include "localmot/model.hpp"
#include "support/builders.hpp"

using namespace localmot;
using testsupport::track;

TEST(Box, MakeValidates) {
  EXPECT_NO_THROW(Box::make(0, 0, 1, 1));
  EXPECT_THROW(Box::make(0, 0, 0, 1), ContractError);
  EXPECT_THROW(Box::make(0, 0, 1, -2), ContractError);
  EXPECT_THROW(Box::make(NAN, 0, 1, 1), ContractError);
  const Box b = Box::make(1, 2, 3, 4);
  EXPECT_EQ(b.right(), 4.0);
  EXPECT_EQ(b.bottom(), 6.0);
  EXPECT_EQ(b.area(), 12.0);
}

TEST(TrackSet, SortsAndRejectsDuplicates) {
  const TrackSet set(Role::GroundTruth, {track(5, 0, {1}), track(2, 1, {1, 2})});
  EXPECT_EQ(set[0].external_id, 2);
  EXPECT_EQ(set.box_count(), 3u);
  EXPECT_EQ(set.max_frame(), 2);
  EXPECT_THROW(TrackSet(Role::GroundTruth, {track(1, 0, {1}), track(1, 1, {2})}), ContractError);
  EXPECT_THROW(TrackSet(Role::Predicted, {Track{3, {}}}), ContractError);
}

TEST(Sequence, ValidateChecksFrameRange) {
  EXPECT_NO_THROW(testsupport::sequence(3, {track(1, 0, {1, 3})}, {}));
  EXPECT_THROW(testsupport::sequence(2, {track(1, 0, {1, 3})}, {}), FormatError);
  EXPECT_THROW(testsupport::sequence(2, {}, {track(1, 0, {0})}), FormatError);
  EXPECT_THROW(testsupport::sequence(2, {}, {}, -1.0), FormatError);
}

TEST(Sequence, SwappedExchangesRoles) {
  const Sequence s = testsupport::sequence(2, {track(1, 0, {1})}, {track(7, 0, {1, 2})});
  const Sequence w = s.swapped();
  EXPECT_EQ(w.gt.role(), Role::GroundTruth);
  EXPECT_EQ(w.gt[0].external_id, 7);
  EXPECT_EQ(w.pred[0].external_id, 1);
  EXPECT_EQ(w.pred.role(), Role::Predicted);
}

TEST(Matching, Lookups) {
  Matching m;
  m.pairs = {{0, 2}, {3, 1}};
  EXPECT_EQ(m.partner_of_row(3), 1u);
  EXPECT_FALSE(m.partner_of_row(1));
  EXPECT_EQ(m.partner_of_col(2), 0u);
  const auto rows = m.row_map(4);
  EXPECT_EQ(rows[0], 2u);
  EXPECT_FALSE(rows[2]);
  const auto cols = m.col_map(3);
  EXPECT_EQ(cols[1], 3u);
  EXPECT_FALSE(cols[0]);
}

TEST(MetricAccumulator, MergeAndValue) {
  EXPECT_EQ(MetricAccumulator{}.value(), 0.0);
  const MetricAccumulator a{1, 2}, b{3, 4};
  EXPECT_EQ(accumulator_merge(a, b), (MetricAccumulator{4, 6}));
  EXPECT_DOUBLE_EQ(accumulator_merge(a, a).value(), a.value());
}
