#pragma once

#include <vector>

#include "iat/arch.hpp"
#include "iat/dp.hpp"

namespace iat {

/// Product over dimensions of min(t/s, s/t). Zero when kinds differ, either
/// kind is parameterless, or ranks differ. Symmetric.
double shape_score(LayerKind target_kind, const Shape& target, LayerKind source_kind,
                   const Shape& source);

/// Scores two layers by their weight tensors.
double shape_score(const LayerNode& target, const LayerNode& source);

/// Layer-level alignment of one target block against one source block.
/// `layers` carries block-local layer indices; block indices are left at 0.
struct BlockPairScore {
  double score = 0.0;
  std::vector<LayerMatch> layers;
};

enum class LayerAligner { penalized_dp, one_to_one };

/// Indices into `block.layers` of the parameterized layers, in order.
std::vector<std::size_t> parameterized_indices(const Block& block);

ScoreTable layer_score_table(const Block& target, const Block& source);

BlockPairScore block_pair_score(const Block& target, const Block& source,
                                LayerAligner aligner = LayerAligner::penalized_dp);

/// Same value as block_pair_score(...).score without building the matching.
double block_pair_value(const Block& target, const Block& source,
                        LayerAligner aligner = LayerAligner::penalized_dp);

}  // namespace iat
