#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "localmot/error.hpp"
#include "localmot/evaluate.hpp"
#include "localmot/synth.hpp"

using namespace localmot;
using nlohmann::json;

namespace {

std::vector<TrackerSequences> catalog_inputs(const std::string& tracker = "synth") {
  TrackerSequences t;
  t.tracker = tracker;
  for (Fixture& f : fixture_catalog()) t.sequences.push_back(std::move(f.sequence));
  return {t};
}

EvalOptions options(const std::string& horizons = "0,1f,strict") {
  EvalOptions o;
  o.horizons = parse_horizons(horizons);
  o.decompose = true;
  o.per_sequence = true;
  return o;
}

const json& entry(const json& report, const std::string& seq) {
  for (const auto& e : report.at("per_sequence")) {
    if (e.at("sequence") == seq) return e;
  }
  throw std::runtime_error("no entry " + seq);
}

}  // namespace

TEST(ParseHorizons, List) {
  const auto h = parse_horizons("0, 2f,0.5s ,strict");
  ASSERT_EQ(h.size(), 4u);
  EXPECT_EQ(h[1], Horizon::frames(2));
  EXPECT_THROW(parse_horizons(""), ContractError);
  EXPECT_THROW(parse_horizons("1q"), ContractError);
  EXPECT_EQ(default_horizons().size(), 7u);
}

TEST(Report, ContainsFixtureExpectations) {
  const json report = json::parse(report_json(evaluate(catalog_inputs(), options())));
  for (const char* key : {"config", "per_sequence", "combined", "curves", "decomposition", "metadata"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  const json& s1 = entry(report, "S1").at("metrics");
  EXPECT_EQ(s1.at("det_f1").at("value"), 1.0);
  EXPECT_EQ(s1.at("idf1").at("value"), 0.5);
  EXPECT_EQ(s1.at("ata").at("value"), 0.333333);
  EXPECT_EQ(s1.at("alta").at("1f").at("value"), 0.848485);
  EXPECT_NEAR(s1.at("alta").at("1f").at("numerator").get<double>() /
                  s1.at("alta").at("1f").at("denominator").get<double>(),
              28.0 / 33.0, 1e-15);
  EXPECT_EQ(s1.at("mota").at("value"), 0.9);
  EXPECT_EQ(s1.at("mota").at("id_switches"), 1);
  EXPECT_EQ(entry(report, "S1").at("decomposition").at("strict").at("fractions").at("split"), 1.0);
  EXPECT_EQ(entry(report, "S2").at("decomposition").at("strict").at("fractions").at("merge"), 1.0);
  EXPECT_EQ(report.at("metadata").at("version"), LOCALMOT_VERSION);
}

TEST(Report, DeterministicAcrossJobs) {
  EvalOptions one = options(), eight = options();
  one.jobs = 1;
  eight.jobs = 8;
  EXPECT_EQ(report_json(evaluate(catalog_inputs(), one)), report_json(evaluate(catalog_inputs(), eight)));
  EXPECT_EQ(report_csv(evaluate(catalog_inputs(), one)), report_csv(evaluate(catalog_inputs(), eight)));
}

TEST(Report, CsvAndJsonAgree) {
  const RunResult r = evaluate(catalog_inputs(), options());
  const json report = json::parse(report_json(r));
  std::istringstream csv(report_csv(r));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "tracker,sequence,metric,horizon,value,numerator,denominator");
  int checked = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.push_back("");
    ASSERT_EQ(f.size(), 7u) << line;
    const json& metrics = f[1] == "combined" ? report.at("combined").at(f[0]) : entry(report, f[1]).at("metrics");
    json value;
    if (f[2] == "alta" || f[2] == "lidf1") {
      value = metrics.at(f[2]).at(f[3]);
    } else if (metrics.contains(f[2]) && metrics.at(f[2]).is_object() && f[2] != "mota") {
      value = metrics.at(f[2]);
    } else if (metrics.contains(f[2]) && f[2] != "mota") {
      EXPECT_EQ(metrics.at(f[2]).dump(), f[4]);
      ++checked;
      continue;
    } else {
      const json& mota = metrics.at("mota");
      EXPECT_EQ(mota.at(f[2] == "mota" ? "value" : f[2]).dump(), f[4]) << line;
      ++checked;
      continue;
    }
    EXPECT_EQ(value.at("value").dump(), f[4]) << line;
    EXPECT_EQ(value.at("numerator").dump(), f[5]) << line;
    EXPECT_EQ(value.at("denominator").dump(), f[6]) << line;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Combined, PoolsAccumulators) {
  TrackerSequences t;
  t.tracker = "x";
  Sequence a = fixture_catalog()[0].sequence;
  Sequence b = a;
  b.name = "copy";
  t.sequences = {a, b};
  const RunResult two = evaluate({t}, options());
  t.sequences = {a};
  const RunResult one = evaluate({t}, options());
  const CombinedResult& c2 = two.trackers[0].combined;
  const CombinedResult& c1 = one.trackers[0].combined;
  EXPECT_EQ(c2.num_sequences, 2u);
  EXPECT_DOUBLE_EQ(c2.ata.value(), c1.ata.value());
  EXPECT_DOUBLE_EQ(c2.local[1].alta.value(), c1.local[1].alta.value());
  EXPECT_EQ(c2.mota.id_switches, 2);
  EXPECT_DOUBLE_EQ(c2.mota.mota, c1.mota.mota);
}

TEST(Run, MissingFilesBecomeErrorEntries) {
  std::map<std::string, SequenceSource> gt;
  const Fixture s1 = fixture_catalog()[0];
  SequenceSource src{"S1", to_entries(s1.sequence.gt), {std::nullopt, 10.0, 10}};
  gt.emplace("S1", src);
  src.name = "other";
  gt.emplace("other", src);
  TrackerSource tracker{"t", {{"S1", to_entries(s1.sequence.pred)}, {"stray", {}}}};
  const RunResult r = run(gt, {tracker}, options());
  EXPECT_FALSE(r.ok());
  const auto& seqs = r.trackers[0].sequences;
  ASSERT_EQ(seqs.size(), 3u);
  EXPECT_FALSE(seqs[0].error);  // S1
  EXPECT_TRUE(seqs[1].error);   // other
  EXPECT_TRUE(seqs[2].error);   // stray
  EXPECT_EQ(r.trackers[0].combined.num_sequences, 1u);
  EXPECT_EQ(r.trackers[0].combined.num_failed, 2u);
  const json report = json::parse(report_json(r));
  EXPECT_TRUE(entry(report, "other").contains("error"));
}

TEST(Run, SecondsResolvedPerSequence) {
  std::map<std::string, SequenceSource> gt;
  const Fixture s1 = fixture_catalog()[0];
  gt.emplace("S1", SequenceSource{"S1", to_entries(s1.sequence.gt), {std::nullopt, 10.0, 10}});
  const TrackerSource tracker{"t", {{"S1", to_entries(s1.sequence.pred)}}};
  const RunResult r = run(gt, {tracker}, options("1s,0.1s,strict"));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.trackers[0].sequences[0].radii[0], 10);
  EXPECT_EQ(r.trackers[0].sequences[0].radii[1], 1);
  const json report = json::parse(report_json(r));
  const json& radii = report.at("metadata").at("horizon_resolution").at("sequences").at("S1").at("radii");
  EXPECT_EQ(radii.at("1s"), 10);
  EXPECT_EQ(radii.at("strict"), "strict");

  // No frame rate anywhere: seconds horizons cannot be resolved.
  std::map<std::string, SequenceSource> no_fps = gt;
  no_fps.at("S1").info.frame_rate.reset();
  EXPECT_FALSE(run(no_fps, {tracker}, options("1s")).ok());
  EXPECT_TRUE(run(no_fps, {tracker}, options("2f")).ok());
}

TEST(Run, SplitClassesAndAutoThreshold) {
  std::map<std::string, SequenceSource> gt;
  const Fixture s1 = fixture_catalog()[0];
  auto g = to_entries(s1.sequence.gt, 1.0, 1);
  for (auto e : to_entries(s1.sequence.gt, 1.0, 2)) {
    e.id += 100;
    e.box.left += 500;
    g.push_back(e);
  }
  gt.emplace("S1", SequenceSource{"S1", g, {std::nullopt, 10.0, 10}});
  auto p = to_entries(s1.sequence.pred, 0.8, 1);
  for (auto e : to_entries(s1.sequence.pred, 0.6, 2)) {
    e.id += 100;
    e.box.left += 500;
    p.push_back(e);
  }
  EvalOptions o = options();
  o.ingest.gt_classes = {1, 2};
  o.split_classes = true;
  o.ingest.score_threshold = ScoreThreshold::select_automatically();
  const RunResult r = run(gt, {TrackerSource{"t", {{"S1", p}}}}, o);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.trackers[0].sequences.size(), 2u);
  EXPECT_EQ(r.trackers[0].sequences[0].sequence, "S1/1");
  EXPECT_EQ(r.trackers[0].sequences[1].sequence, "S1/2");
  EXPECT_EQ(r.score_thresholds.at("t").at("1"), 0.8);
  EXPECT_EQ(r.score_thresholds.at("t").at("2"), 0.6);
  EXPECT_DOUBLE_EQ(r.trackers[0].combined.idf1.value(), 0.5);
}

TEST(Compare, ScoresAndRanking) {
  auto inputs = catalog_inputs("b");
  TrackerSequences perfect;
  perfect.tracker = "a";
  for (Fixture& f : fixture_catalog()) {
    f.sequence.pred = TrackSet(Role::Predicted, f.sequence.gt.tracks());
    perfect.sequences.push_back(std::move(f.sequence));
  }
  inputs.push_back(std::move(perfect));
  const RunResult r = evaluate(inputs, options("1s,5s,strict"));
  const TrackerScores scores = tracker_scores(r);
  EXPECT_EQ(scores, tracker_scores_from_report(report_json(r)));
  EXPECT_EQ(scores.at("a").at("mean_alta"), 1.0);
  const RankTable t = rank_table(scores, "mean_alta", lower_is_better_metrics());
  EXPECT_EQ(t.rows[0].tracker, "a");
  EXPECT_EQ(t.rows[0].cells.at("normalized_id_switches")->rank, 1);
  const json cmp = json::parse(compare_json(t, kendall_matrix(scores)));
  EXPECT_EQ(cmp.at("rank_table").at(0).at("tracker"), "a");
  EXPECT_THROW(tracker_scores_from_report("{}"), FormatError);
}

TEST(Curves, CsvHasOneRowPerPoint) {
  const RunResult r = evaluate(catalog_inputs(), options());
  std::istringstream in(curves_csv(r, false));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * 3);
}
