#include "localmot/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "localmot/error.hpp"

namespace localmot {
namespace {

void check_weight(double w) {
  if (!std::isfinite(w) || w < 0.0) {
    throw ContractError("assignment weights must be finite and non-negative, got " +
                        std::to_string(w));
  }
}

// Hungarian method with row/column potentials (shortest augmenting path).
// Minimises total cost assigning each of n rows to a distinct column of m,
// requires n <= m. cost is row-major n x m. Returns the column of each row.
std::vector<std::size_t> solve_min_cost(std::size_t n, std::size_t m,
                                        const std::vector<double>& cost) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      const double* row = cost.data() + (i0 - 1) * m;
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

// Solves one connected component given by sorted local row/col lists.
void solve_component(const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols,
                     const std::vector<const WeightedEdge*>& edges,
                     std::vector<WeightedEdge>& out) {
  if (edges.size() == 1) {
    out.push_back(*edges.front());
    return;
  }
  auto local = [](const std::vector<std::size_t>& ids, std::size_t id) {
    return static_cast<std::size_t>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  // Dense weights in the given orientation, rows x cols.
  const std::size_t nr = rows.size(), nc = cols.size();
  std::vector<double> given(nr * nc, 0.0);
  for (const WeightedEdge* e : edges) {
    given[local(rows, e->row) * nc + local(cols, e->col)] = e->weight;
  }
  // The solve orientation depends only on the weights, never on which side
  // is rows: the smaller side, or the lexicographically smaller of W and W^T.
  bool transpose = nr > nc;
  if (nr == nc) {
    for (std::size_t k = 0; k < nr * nc; ++k) {
      const double a = given[k], b = given[(k % nc) * nc + k / nc];
      if (a != b) {
        transpose = b < a;
        break;
      }
    }
  }
  const std::size_t n = transpose ? nc : nr;
  const std::size_t m = transpose ? nr : nc;

  // cost = -weight; absent entries cost 0.
  std::vector<double> cost(n * m, 0.0);
  std::vector<double> weight(n * m, 0.0);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t k = transpose ? c * m + r : r * m + c;
      weight[k] = given[r * nc + c];
      cost[k] = -weight[k];
    }
  }

  const auto assignment = solve_min_cost(n, m, cost);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = assignment[r];
    const double w = weight[r * m + c];
    if (w <= 0.0) continue;
    if (transpose) {
      out.push_back({rows[c], cols[r], w});
    } else {
      out.push_back({rows[r], cols[c], w});
    }
  }
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

WeightMatrix::WeightMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

WeightMatrix::WeightMatrix(std::size_t rows, std::size_t cols,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ContractError("weight matrix size mismatch");
  }
  for (double w : values_) check_weight(w);
}

WeightMatrix::WeightMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ContractError("ragged weight matrix");
    for (double w : row) {
      check_weight(w);
      values_.push_back(w);
    }
  }
}

void WeightMatrix::set(std::size_t i, std::size_t j, double w) {
  check_weight(w);
  values_[i * cols_ + j] = w;
}

Matching max_weight_matching(const WeightMatrix& w) {
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (w(i, j) > 0.0) edges.push_back({i, j, w(i, j)});
    }
  }
  return max_weight_matching(w.rows(), w.cols(), edges);
}

Matching max_weight_matching(std::size_t rows, std::size_t cols,
                             std::span<const WeightedEdge> edges) {
  std::vector<std::size_t> parent(rows + cols);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& e : edges) {
    if (e.row >= rows || e.col >= cols) {
      throw ContractError("edge index out of range");
    }
    check_weight(e.weight);
    if (e.weight <= 0.0) continue;
    const std::size_t a = find_root(parent, e.row);
    const std::size_t b = find_root(parent, rows + e.col);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  // Components are numbered by first appearance in `edges`, so the solve
  // order depends on the input only.
  struct Component {
    std::vector<std::size_t> rows, cols;
    std::vector<const WeightedEdge*> edges;
  };
  std::vector<std::size_t> slot(rows + cols, static_cast<std::size_t>(-1));
  std::vector<Component> components;
  for (const auto& e : edges) {
    if (e.weight <= 0.0) continue;
    const std::size_t root = find_root(parent, e.row);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = components.size();
      components.emplace_back();
    }
    auto& comp = components[slot[root]];
    comp.rows.push_back(e.row);
    comp.cols.push_back(e.col);
    comp.edges.push_back(&e);
  }

  std::vector<WeightedEdge> chosen;
  for (auto& comp : components) {
    std::sort(comp.rows.begin(), comp.rows.end());
    comp.rows.erase(std::unique(comp.rows.begin(), comp.rows.end()),
                    comp.rows.end());
    std::sort(comp.cols.begin(), comp.cols.end());
    comp.cols.erase(std::unique(comp.cols.begin(), comp.cols.end()),
                    comp.cols.end());
    solve_component(comp.rows, comp.cols, comp.edges, chosen);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  Matching result;
  result.pairs.reserve(chosen.size());
  std::vector<double> weights;
  weights.reserve(chosen.size());
  for (const auto& e : chosen) {
    result.pairs.emplace_back(e.row, e.col);
    weights.push_back(e.weight);
  }
  // Summed in ascending weight order, which does not depend on which side
  // is rows, so transposed inputs give bitwise-equal objectives.
  std::sort(weights.begin(), weights.end());
  for (double w : weights) result.objective += w;
  return result;
}

Matching max_cardinality_matching(const WeightMatrix& binary,
                                  const WeightMatrix& tie_weights) {
  if (binary.rows() != tie_weights.rows() ||
      binary.cols() != tie_weights.cols()) {
    throw ContractError("binary and tie-weight matrices differ in shape");
  }
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < binary.rows(); ++i) {
    for (std::size_t j = 0; j < binary.cols(); ++j) {
      const double b = binary(i, j);
      if (b != 0.0 && b != 1.0) {
        throw ContractError("overlap matrix entries must be 0 or 1");
      }
      if (b == 1.0) edges.push_back({i, j, tie_weights(i, j)});
    }
  }
  return max_cardinality_matching(binary.rows(), binary.cols(), edges);
}

Matching max_cardinality_matching(std::size_t rows, std::size_t cols,
                                  std::span<const WeightedEdge> edges) {
  std::vector<double> ties;
  ties.reserve(edges.size());
  for (const auto& e : edges) {
    if (!(e.weight >= 0.0 && e.weight < 1.0)) {
      throw ContractError("tie weights must lie in [0, 1)");
    }
    ties.push_back(e.weight);
  }
  // Order-independent sum, as for the objective.
  std::sort(ties.begin(), ties.end());
  double tie_total = 0.0;
  for (double w : ties) tie_total += w;
  // Any matching of cardinality k has weight below k + eps * tie_total < k + 1.
  const double eps = 0.5 / (1.0 + tie_total);
  std::vector<WeightedEdge> scaled(edges.begin(), edges.end());
  for (auto& e : scaled) e.weight = 1.0 + eps * e.weight;

  Matching result = max_weight_matching(rows, cols, scaled);
  result.objective = static_cast<double>(result.pairs.size());
  return result;
}

}  // namespace localmot
