#include "iat/scoring.hpp"

#include <algorithm>

namespace iat {

double shape_score(LayerKind target_kind, const Shape& target, LayerKind source_kind,
                   const Shape& source) {
  if (target_kind != source_kind || !is_parameterized(target_kind)) return 0.0;
  if (target.size() != source.size() || target.empty()) return 0.0;
  double score = 1.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] < 1 || source[i] < 1) return 0.0;
    const double t = static_cast<double>(target[i]);
    const double s = static_cast<double>(source[i]);
    score *= std::min(t / s, s / t);
  }
  return score;
}

double shape_score(const LayerNode& target, const LayerNode& source) {
  const auto* t = target.weight_shape();
  const auto* s = source.weight_shape();
  if (!t || !s) return 0.0;
  return shape_score(target.kind, *t, source.kind, *s);
}

std::vector<std::size_t> parameterized_indices(const Block& block) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < block.layers.size(); ++i) {
    if (is_parameterized(block.layers[i].kind)) out.push_back(i);
  }
  return out;
}

namespace {

ScoreTable score_table(const Block& target, const std::vector<std::size_t>& t_idx,
                       const Block& source, const std::vector<std::size_t>& s_idx) {
  ScoreTable table(t_idx.size(), s_idx.size());
  for (std::size_t i = 0; i < t_idx.size(); ++i) {
    for (std::size_t j = 0; j < s_idx.size(); ++j) {
      table(i, j) = shape_score(target.layers[t_idx[i]], source.layers[s_idx[j]]);
    }
  }
  return table;
}

DPResult align(const ScoreTable& table, LayerAligner aligner) {
  return aligner == LayerAligner::penalized_dp ? dp_match(table)
                                               : ordered_one_to_one_match(table);
}

}  // namespace

ScoreTable layer_score_table(const Block& target, const Block& source) {
  return score_table(target, parameterized_indices(target), source,
                     parameterized_indices(source));
}

BlockPairScore block_pair_score(const Block& target, const Block& source,
                                LayerAligner aligner) {
  const auto t_idx = parameterized_indices(target);
  const auto s_idx = parameterized_indices(source);
  BlockPairScore out;
  if (t_idx.empty() || s_idx.empty()) return out;

  const auto table = score_table(target, t_idx, source, s_idx);
  const auto result = align(table, aligner);
  out.score = result.value;
  for (const auto& run : result.assignment) {
    for (std::size_t i = run.first; i <= run.last; ++i) {
      const double s = table(i, run.source);
      if (s <= 0.0) continue;
      LayerMatch match;
      match.target_path = target.layers[t_idx[i]].path;
      match.source_path = source.layers[s_idx[run.source]].path;
      match.score = s;
      match.target_layer = t_idx[i];
      match.source_layer = s_idx[run.source];
      out.layers.push_back(std::move(match));
    }
  }
  return out;
}

double block_pair_value(const Block& target, const Block& source, LayerAligner aligner) {
  const auto t_idx = parameterized_indices(target);
  const auto s_idx = parameterized_indices(source);
  if (t_idx.empty() || s_idx.empty()) return 0.0;
  const auto table = score_table(target, t_idx, source, s_idx);
  if (aligner == LayerAligner::penalized_dp) return dp_fill(table).at(table.targets(), table.sources());
  return ordered_one_to_one_match(table).value;
}

}  // namespace iat
