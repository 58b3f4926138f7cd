#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "iat/arch.hpp"

namespace iat::testing {

/// InvertedResidual with a nested SqueezeExcite, declared as timm does.
Node inverted_residual(std::string name, std::int64_t in, std::int64_t mid, std::int64_t out,
                       std::int64_t kernel, std::int64_t se_channels);
Node depthwise_separable(std::string name, std::int64_t in, std::int64_t out,
                         std::int64_t se_channels);

/// Root holding a single inverted-residual module.
ArchDescriptor inverted_residual_net();

struct EfficientNetConfig {
  double width = 1.0;
  double depth = 1.0;
  std::int64_t num_classes = 100;
};

/// EfficientNet-style tree: stem singles, stage containers of inverted
/// residual blocks, head singles.
ArchDescriptor efficientnet_like(const EfficientNetConfig& config, std::string name);
ArchDescriptor efficientnet_b0_like();
ArchDescriptor efficientnet_b2_like();

/// ReXNet(x1.0)-style tree of linear bottlenecks with nested conv-norm modules.
ArchDescriptor rexnet_like();

/// Plain conv stack: channels[0] -> channels[1] -> ... with `kernel` x `kernel`
/// convolutions carrying biases, no normalization.
ArchDescriptor conv_stack(const std::vector<std::int64_t>& channels, std::int64_t kernel = 3,
                          std::string name = "conv_stack");

/// Flat root of `count` single layers (conv/bn pairs then a classifier).
ArchDescriptor flat_net(std::size_t count);

/// Networks sharing no layer kind: only convolutions vs only linear layers.
ArchDescriptor conv_only_net();
ArchDescriptor linear_only_net();

/// Random tree with stems, optional stage containers, blocks and a head.
ArchDescriptor random_net(std::mt19937_64& rng, std::string name);

/// Synthetic network with exactly `parameterized_layers` parameterized layers,
/// grouped into blocks of varying size.
ArchDescriptor synthetic_net(std::size_t parameterized_layers, std::uint64_t seed);

/// Deep tree with `blocks` blocks of six layers nested `height` modules deep.
ArchDescriptor deep_tree(std::size_t blocks, std::size_t height);

/// Weights for every tensor of the descriptor, U[-1, 1].
WeightStore random_weights(const ArchDescriptor& descriptor, std::uint64_t seed);
WeightStore zero_weights(const ArchDescriptor& descriptor);

/// Pairs the i-th parameterized leaf of `target` with the i-th of `source`.
NetworkMatching identity_matching(const ArchDescriptor& target, const ArchDescriptor& source);

/// The fixture set used for self-score checks.
std::vector<ArchDescriptor> named_fixtures();

}  // namespace iat::testing
