#include "iat/dp.hpp"

#include <algorithm>
#include <string>

#include "iat/error.hpp"

namespace iat {

namespace {

void check_scores(const ScoreTable& scores) {
  for (std::size_t i = 0; i < scores.targets(); ++i) {
    for (std::size_t j = 0; j < scores.sources(); ++j) {
      const double s = scores(i, j);
      if (!std::isfinite(s) || s < 0.0) {
        throw Error(ErrorCode::invalid_argument,
                    "score table cell (" + std::to_string(i) + "," + std::to_string(j) +
                        ") must be finite and >= 0");
      }
    }
  }
}

}  // namespace

DPTable dp_fill(const ScoreTable& scores) {
  check_scores(scores);
  DPTable table;
  table.n = scores.targets();
  table.m = scores.sources();
  const std::size_t width = table.m + 1;
  const std::size_t cells = (table.n + 1) * width;
  table.value.assign(cells, 0.0);
  table.action.assign(cells, DPTable::Action::none);
  table.run_start.assign(cells, 0);

  for (std::size_t i = 1; i <= table.n; ++i) {
    for (std::size_t j = 1; j <= table.m; ++j) {
      double best = -1.0;
      std::uint32_t best_k = 0;
      double sum = 0.0;
      // k runs from i downwards so the shortest run wins ties.
      for (std::size_t k = i; k >= 1; --k) {
        sum += scores(k - 1, j - 1);
        const double candidate =
            sum / std::sqrt(static_cast<double>(i - k + 1)) + table.value[(k - 1) * width + (j - 1)];
        if (candidate > best) {
          best = candidate;
          best_k = static_cast<std::uint32_t>(k);
        }
      }

      auto action = DPTable::Action::run;
      const double up = table.value[(i - 1) * width + j];
      const double left = table.value[i * width + (j - 1)];
      if (up > best) {
        best = up;
        action = DPTable::Action::skip_target;
      }
      if (left > best) {
        best = left;
        action = DPTable::Action::skip_source;
      }
      table.value[i * width + j] = best;
      table.action[i * width + j] = action;
      table.run_start[i * width + j] = action == DPTable::Action::run ? best_k : 0;
    }
  }
  return table;
}

DPResult dp_traceback(const DPTable& table, const ScoreTable& scores) {
  DPResult result;
  result.value = table.at(table.n, table.m);
  const std::size_t width = table.m + 1;
  std::size_t i = table.n;
  std::size_t j = table.m;
  while (i > 0 && j > 0) {
    switch (table.action[i * width + j]) {
      case DPTable::Action::run: {
        const std::size_t k = table.run_start[i * width + j];
        double sum = 0.0;
        for (std::size_t l = k; l <= i; ++l) sum += scores(l - 1, j - 1);
        if (sum > 0.0) result.assignment.push_back({j - 1, k - 1, i - 1});
        i = k - 1;
        --j;
        break;
      }
      case DPTable::Action::skip_target:
        --i;
        break;
      case DPTable::Action::skip_source:
      case DPTable::Action::none:
        --j;
        break;
    }
  }
  std::reverse(result.assignment.begin(), result.assignment.end());
  return result;
}

DPResult dp_match(const ScoreTable& scores) { return dp_traceback(dp_fill(scores), scores); }

DPResult ordered_one_to_one_match(const ScoreTable& scores) {
  check_scores(scores);
  const std::size_t n = scores.targets();
  const std::size_t m = scores.sources();
  const std::size_t width = m + 1;
  std::vector<double> best((n + 1) * width, 0.0);
  std::vector<DPTable::Action> action((n + 1) * width, DPTable::Action::none);

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double value = best[(i - 1) * width + (j - 1)] + scores(i - 1, j - 1);
      auto chosen = DPTable::Action::run;
      if (best[(i - 1) * width + j] > value) {
        value = best[(i - 1) * width + j];
        chosen = DPTable::Action::skip_target;
      }
      if (best[i * width + (j - 1)] > value) {
        value = best[i * width + (j - 1)];
        chosen = DPTable::Action::skip_source;
      }
      best[i * width + j] = value;
      action[i * width + j] = chosen;
    }
  }

  DPResult result;
  result.value = best[n * width + m];
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 && j > 0) {
    switch (action[i * width + j]) {
      case DPTable::Action::run:
        if (scores(i - 1, j - 1) > 0.0) result.assignment.push_back({j - 1, i - 1, i - 1});
        --i;
        --j;
        break;
      case DPTable::Action::skip_target:
        --i;
        break;
      default:
        --j;
        break;
    }
  }
  std::reverse(result.assignment.begin(), result.assignment.end());
  return result;
}

}  // namespace iat
