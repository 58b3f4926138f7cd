#pragma once

// Penalized order-preserving alignment of two sequences. Each source element
// may take a contiguous run of target elements; the run's summed score is
// divided by sqrt(run length). Runs never cross.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace iat {

/// Pair scores: rows are target elements, columns source elements (0-based).
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::size_t targets, std::size_t sources, double fill = 0.0)
      : n_(targets), m_(sources), cells_(targets * sources, fill) {}

  std::size_t targets() const { return n_; }
  std::size_t sources() const { return m_; }

  double& operator()(std::size_t i, std::size_t j) { return cells_[i * m_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return cells_[i * m_ + j]; }

  bool operator==(const ScoreTable&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> cells_;
};

/// Source element `source` takes targets [first, last] (inclusive, 0-based).
struct Assignment {
  std::size_t source = 0;
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
  bool operator==(const Assignment&) const = default;
};

struct DPResult {
  double value = 0.0;
  std::vector<Assignment> assignment;  // ordered by target range
};

/// Multiplier applied to a run of `d` targets sharing one source element.
inline double run_penalty(std::size_t d) { return 1.0 / std::sqrt(static_cast<double>(d)); }

/// Filled (n+1) x (m+1) table with the action chosen in every cell.
struct DPTable {
  enum class Action : std::uint8_t { none, skip_source, skip_target, run };

  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> value;
  std::vector<Action> action;
  std::vector<std::uint32_t> run_start;  // k (1-based) when action == run

  double at(std::size_t i, std::size_t j) const { return value[i * (m + 1) + j]; }
};

/// dp[i,j] = max(dp[i,j-1], dp[i-1,j],
///               max_k (1/sqrt(i-k+1)) * sum_{l=k..i} s(l,j) + dp[k-1,j-1]).
/// Ties prefer a run over skipping a target over skipping a source; among
/// runs the shortest wins. O(n^2 m). Throws on negative or non-finite cells.
DPTable dp_fill(const ScoreTable& scores);

/// Walks recorded actions back from (n, m). Runs whose summed score is zero
/// are dropped.
DPResult dp_traceback(const DPTable& table, const ScoreTable& scores);

DPResult dp_match(const ScoreTable& scores);

/// Order-preserving one-to-one matching of maximum total weight (every run
/// has length 1). Used by the bipartite matchers.
DPResult ordered_one_to_one_match(const ScoreTable& scores);

}  // namespace iat
