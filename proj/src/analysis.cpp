#include "localmot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "localmot/error.hpp"

namespace localmot {

std::optional<double> kendall_tau_b(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("kendall tau: length mismatch");
  if (a.size() < 2) throw ContractError("kendall tau: need at least two entries");
  std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const int da = (a[i] > a[j]) - (a[i] < a[j]);
      const int db = (b[i] > b[j]) - (b[i] < b[j]);
      if (da == 0 && db == 0) continue;
      if (da == 0) {
        ++ties_a;
      } else if (db == 0) {
        ++ties_b;
      } else if (da == db) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n_a = static_cast<double>(concordant + discordant + ties_b);
  const double n_b = static_cast<double>(concordant + discordant + ties_a);
  if (n_a == 0.0 || n_b == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / std::sqrt(n_a * n_b);
}

double normalized_id_switches(std::int64_t id_switches, std::int64_t det_tp) {
  if (id_switches < 0 || det_tp < 0) throw ContractError("counts must be non-negative");
  if (det_tp == 0) {
    if (id_switches > 0) throw ContractError("identity switches without matches");
    return 0.0;
  }
  return static_cast<double>(id_switches) / static_cast<double>(det_tp);
}

RankTable rank_table(const TrackerScores& scores, const std::string& sort_key,
                     const std::set<std::string>& lower_is_better) {
  RankTable table;
  table.sort_key = sort_key;
  std::set<std::string> metrics;
  bool key_seen = false;
  for (const auto& [tracker, row] : scores) {
    for (const auto& [metric, value] : row) metrics.insert(metric);
    key_seen = key_seen || row.count(sort_key) > 0;
  }
  if (!scores.empty() && !key_seen) {
    throw ContractError("sort key '" + sort_key + "' is not reported by any tracker");
  }
  table.metrics.assign(metrics.begin(), metrics.end());

  for (const auto& [tracker, row] : scores) {
    RankRow r;
    r.tracker = tracker;
    for (const std::string& metric : table.metrics) {
      auto it = row.find(metric);
      if (it == row.end()) {
        r.cells[metric] = std::nullopt;
      } else {
        r.cells[metric] = RankCell{it->second, 0};
      }
    }
    table.rows.push_back(std::move(r));
  }

  for (const std::string& metric : table.metrics) {
    const bool lower = lower_is_better.count(metric) > 0;
    std::vector<double> values;
    for (const RankRow& r : table.rows) {
      if (const auto& cell = r.cells.at(metric)) values.push_back(cell->value);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (!lower) std::reverse(values.begin(), values.end());
    for (RankRow& r : table.rows) {
      if (auto& cell = r.cells.at(metric)) {
        const auto pos = lower ? std::lower_bound(values.begin(), values.end(), cell->value)
                               : std::lower_bound(values.begin(), values.end(), cell->value,
                                                  std::greater<>());
        cell->rank = static_cast<int>(pos - values.begin()) + 1;
      }
    }
  }

  const auto key_rank = [&](const RankRow& r) {
    const auto& cell = r.cells.at(sort_key);
    return cell ? cell->rank : std::numeric_limits<int>::max();
  };
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const RankRow& x, const RankRow& y) {
                     const int rx = key_rank(x), ry = key_rank(y);
                     return rx != ry ? rx < ry : x.tracker < y.tracker;
                   });
  return table;
}

KendallMatrix kendall_matrix(const TrackerScores& scores) {
  KendallMatrix out;
  std::set<std::string> metrics;
  for (const auto& [tracker, row] : scores) {
    for (const auto& [metric, value] : row) metrics.insert(metric);
  }
  out.metrics.assign(metrics.begin(), metrics.end());
  const std::size_t m = out.metrics.size();
  out.tau.assign(m, std::vector<std::optional<double>>(m));
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      std::vector<double> a, b;
      for (const auto& [tracker, row] : scores) {
        auto ix = row.find(out.metrics[x]);
        auto iy = row.find(out.metrics[y]);
        if (ix == row.end() || iy == row.end()) continue;
        a.push_back(ix->second);
        b.push_back(iy->second);
      }
      if (a.size() >= 2) out.tau[x][y] = kendall_tau_b(a, b);
    }
  }
  return out;
}

}  // namespace localmot
