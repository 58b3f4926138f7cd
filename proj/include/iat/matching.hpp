#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "iat/arch.hpp"
#include "iat/dp.hpp"
#include "iat/scoring.hpp"

namespace iat {

enum class Matcher { dp, bipartite, nbipartite, random };

std::string_view to_string(Matcher matcher);
std::optional<Matcher> parse_matcher(std::string_view text);

enum class Execution { serial, parallel };

/// Phase one: score of every (target block, source block) pair. The parallel
/// path distributes cells over OpenMP threads and writes into the pre-sized
/// table; its result is identical to the serial loop.
ScoreTable score_block_pairs(const StandardizedNetwork& target,
                             const StandardizedNetwork& source,
                             LayerAligner aligner = LayerAligner::penalized_dp,
                             Execution exec = Execution::parallel);

/// Reference implementation of score_block_pairs kept for testing.
ScoreTable score_block_pairs_serial(const StandardizedNetwork& target,
                                    const StandardizedNetwork& source,
                                    LayerAligner aligner = LayerAligner::penalized_dp);

/// Two-phase matching of target layers to source layers.
///
/// dp:         penalized DP over layers within every block pair, then over blocks.
/// bipartite:  blocks as in dp; layers of each chosen block pair matched
///             one-to-one.
/// nbipartite: one-to-one at both levels.
/// random:     every target layer gets a uniformly drawn type-compatible
///             source layer (or none if no compatible layer exists).
///
/// Throws Error(empty_network) if either network has no blocks.
NetworkMatching match_networks(const StandardizedNetwork& target,
                               const StandardizedNetwork& source,
                               Matcher matcher = Matcher::dp, std::uint64_t seed = 0,
                               Execution exec = Execution::parallel);

/// dp[n, m] of the block-level alignment.
double network_score(const StandardizedNetwork& target, const StandardizedNetwork& source,
                     Execution exec = Execution::parallel);

}  // namespace iat
