#pragma once

// Exact maximum-weight one-to-one assignment on rectangular non-negative
// weight matrices.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "localmot/model.hpp"

namespace localmot {

// Dense row-major matrix of finite, non-negative weights.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols);
  // Throws ContractError on a size mismatch or a negative/non-finite entry.
  WeightMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  WeightMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  void set(std::size_t i, std::size_t j, double w);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct WeightedEdge {
  std::size_t row = 0;
  std::size_t col = 0;
  double weight = 0.0;
};

// Returns a matching maximising the summed weight. Zero-weight pairs never
// appear in the result. The solver is deterministic: identical inputs give
// identical pairs.
Matching max_weight_matching(const WeightMatrix& w);

// Sparse form: `edges` lists the non-zero entries of a rows x cols matrix,
// each (row, col) at most once. Connected components are solved separately.
Matching max_weight_matching(std::size_t rows, std::size_t cols,
                             std::span<const WeightedEdge> edges);

// Maximum-cardinality matching over the edges where `binary` is 1; among
// those, maximum total tie weight. tie_weights entries must lie in [0, 1).
// The returned objective is the cardinality.
Matching max_cardinality_matching(const WeightMatrix& binary,
                                  const WeightMatrix& tie_weights);

// Sparse form: every listed edge is present (b = 1); `weight` is its tie
// weight in [0, 1).
Matching max_cardinality_matching(std::size_t rows, std::size_t cols,
                                  std::span<const WeightedEdge> edges);

}  // namespace localmot
