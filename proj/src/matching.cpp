#include "iat/matching.hpp"

#include <random>

#include "iat/error.hpp"

namespace iat {

std::string_view to_string(Matcher matcher) {
  switch (matcher) {
    case Matcher::dp: return "dp";
    case Matcher::bipartite: return "bipartite";
    case Matcher::nbipartite: return "nbipartite";
    case Matcher::random: return "random";
  }
  return "dp";
}

std::optional<Matcher> parse_matcher(std::string_view text) {
  for (auto m : {Matcher::dp, Matcher::bipartite, Matcher::nbipartite, Matcher::random}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

ScoreTable score_block_pairs_serial(const StandardizedNetwork& target,
                                    const StandardizedNetwork& source, LayerAligner aligner) {
  ScoreTable table(target.blocks.size(), source.blocks.size());
  for (std::size_t i = 0; i < table.targets(); ++i) {
    for (std::size_t j = 0; j < table.sources(); ++j) {
      table(i, j) = block_pair_value(target.blocks[i], source.blocks[j], aligner);
    }
  }
  return table;
}

ScoreTable score_block_pairs(const StandardizedNetwork& target,
                             const StandardizedNetwork& source, LayerAligner aligner,
                             Execution exec) {
  if (exec == Execution::serial) return score_block_pairs_serial(target, source, aligner);

  const auto n = static_cast<std::int64_t>(target.blocks.size());
  const auto m = static_cast<std::int64_t>(source.blocks.size());
  ScoreTable table(target.blocks.size(), source.blocks.size());
  const std::int64_t cells = n * m;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t c = 0; c < cells; ++c) {
    const auto i = static_cast<std::size_t>(c / m);
    const auto j = static_cast<std::size_t>(c % m);
    table(i, j) = block_pair_value(target.blocks[i], source.blocks[j], aligner);
  }
  return table;
}

namespace {

void require_non_empty(const StandardizedNetwork& target, const StandardizedNetwork& source) {
  if (target.blocks.empty() || source.blocks.empty()) {
    throw Error(ErrorCode::empty_network, "cannot match an empty network");
  }
}

NetworkMatching match_random(const StandardizedNetwork& target,
                             const StandardizedNetwork& source, std::uint64_t seed) {
  struct Slot {
    std::size_t block;
    std::size_t layer;
  };
  std::vector<Slot> source_slots;
  for (std::size_t b = 0; b < source.blocks.size(); ++b) {
    for (auto l : parameterized_indices(source.blocks[b])) source_slots.push_back({b, l});
  }

  std::mt19937_64 rng(seed);
  NetworkMatching out;
  for (std::size_t b = 0; b < target.blocks.size(); ++b) {
    for (auto l : parameterized_indices(target.blocks[b])) {
      const auto& t = target.blocks[b].layers[l];
      std::vector<std::size_t> compatible;
      for (std::size_t c = 0; c < source_slots.size(); ++c) {
        const auto& s = source.blocks[source_slots[c].block].layers[source_slots[c].layer];
        if (shape_score(t, s) > 0.0) compatible.push_back(c);
      }
      if (compatible.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, compatible.size() - 1);
      const auto& slot = source_slots[compatible[pick(rng)]];
      const auto& s = source.blocks[slot.block].layers[slot.layer];
      out.pairs.push_back({t.path, s.path, shape_score(t, s), b, l, slot.block, slot.layer});
    }
  }
  return out;
}

}  // namespace

NetworkMatching match_networks(const StandardizedNetwork& target,
                               const StandardizedNetwork& source, Matcher matcher,
                               std::uint64_t seed, Execution exec) {
  require_non_empty(target, source);
  if (matcher == Matcher::random) return match_random(target, source, seed);

  const bool one_to_one_blocks = matcher == Matcher::nbipartite;
  const auto block_aligner =
      one_to_one_blocks ? LayerAligner::one_to_one : LayerAligner::penalized_dp;
  const auto layer_aligner =
      matcher == Matcher::dp ? LayerAligner::penalized_dp : LayerAligner::one_to_one;

  const ScoreTable block_scores = score_block_pairs(target, source, block_aligner, exec);
  const DPResult blocks =
      one_to_one_blocks ? ordered_one_to_one_match(block_scores) : dp_match(block_scores);

  NetworkMatching out;
  out.network_score = blocks.value;
  for (const auto& run : blocks.assignment) {
    out.block_pairs.push_back({run.first, run.last, run.source});
    for (std::size_t i = run.first; i <= run.last; ++i) {
      if (block_scores(i, run.source) <= 0.0) continue;
      auto layers = block_pair_score(target.blocks[i], source.blocks[run.source], layer_aligner);
      for (auto& match : layers.layers) {
        match.target_block = i;
        match.source_block = run.source;
        out.pairs.push_back(std::move(match));
      }
    }
  }
  return out;
}

double network_score(const StandardizedNetwork& target, const StandardizedNetwork& source,
                     Execution exec) {
  require_non_empty(target, source);
  const auto table = score_block_pairs(target, source, LayerAligner::penalized_dp, exec);
  return dp_fill(table).at(table.targets(), table.sources());
}

}  // namespace iat
