#pragma once

// Comparisons across trackers: rank correlation, normalised identity
// switches and rank tables.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace localmot {

// Kendall tau-b. Throws ContractError on a length mismatch or fewer than two
// entries; absent when either list is constant (the statistic is 0/0).
std::optional<double> kendall_tau_b(std::span<const double> a, std::span<const double> b);

// id_switches / det_tp, 0 when both are 0. Throws ContractError on negative
// counts or switches without any matches.
double normalized_id_switches(std::int64_t id_switches, std::int64_t det_tp);

// tracker -> metric -> value
using TrackerScores = std::map<std::string, std::map<std::string, double>>;

struct RankCell {
  double value = 0.0;
  int rank = 0;  // dense, 1 = best
};

struct RankRow {
  std::string tracker;
  std::map<std::string, std::optional<RankCell>> cells;
};

struct RankTable {
  std::string sort_key;
  std::vector<std::string> metrics;  // sorted
  std::vector<RankRow> rows;         // descending by sort_key, then by name
};

// Larger is better for every metric except those in lower_is_better. Trackers
// missing a metric get an absent cell and take no part in its ranking; they
// are listed after all trackers that have the sort key.
RankTable rank_table(const TrackerScores& scores, const std::string& sort_key,
                     const std::set<std::string>& lower_is_better = {});

struct KendallMatrix {
  std::vector<std::string> metrics;
  // tau[a][b] over trackers that report both metrics.
  std::vector<std::vector<std::optional<double>>> tau;
};

KendallMatrix kendall_matrix(const TrackerScores& scores);

}  // namespace localmot
