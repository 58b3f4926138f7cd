#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iat/scoring.hpp"

namespace iat::testing {

using namespace iat::build;

namespace {

Node squeeze_excite(std::int64_t channels, std::int64_t reduced) {
  return module("se", {conv2d("conv_reduce", reduced, channels, 1, 1, true), activation("act1"),
                       conv2d("conv_expand", channels, reduced, 1, 1, true)});
}

std::int64_t round_channels(double channels, double multiplier) {
  const double scaled = channels * multiplier;
  auto rounded = std::max<std::int64_t>(8, static_cast<std::int64_t>(scaled + 4) / 8 * 8);
  if (static_cast<double>(rounded) < 0.9 * scaled) rounded += 8;
  return rounded;
}

}  // namespace

Node inverted_residual(std::string name, std::int64_t in, std::int64_t mid, std::int64_t out,
                       std::int64_t kernel, std::int64_t se_channels) {
  return module(std::move(name),
                {conv2d("conv_pw", mid, in, 1, 1), batchnorm2d("bn1", mid), activation("act1"),
                 conv2d("conv_dw", mid, 1, kernel, kernel), batchnorm2d("bn2", mid),
                 activation("act2"), squeeze_excite(mid, se_channels),
                 conv2d("conv_pwl", out, mid, 1, 1), batchnorm2d("bn3", out)});
}

Node depthwise_separable(std::string name, std::int64_t in, std::int64_t out,
                         std::int64_t se_channels) {
  return module(std::move(name),
                {conv2d("conv_dw", in, 1, 3, 3), batchnorm2d("bn1", in), activation("act1"),
                 squeeze_excite(in, se_channels), conv2d("conv_pw", out, in, 1, 1),
                 batchnorm2d("bn2", out)});
}

ArchDescriptor inverted_residual_net() {
  return ArchDescriptor("inverted_residual",
                        root({inverted_residual("block", 16, 96, 24, 3, 4)}));
}

ArchDescriptor efficientnet_like(const EfficientNetConfig& config, std::string name) {
  struct Stage {
    std::int64_t expand, kernel, out, repeats;
  };
  const Stage stages[] = {{1, 3, 16, 1}, {6, 3, 24, 2},  {6, 5, 40, 2}, {6, 3, 80, 3},
                          {6, 5, 112, 3}, {6, 5, 192, 4}, {6, 3, 320, 1}};

  const auto stem = round_channels(32, config.width);
  std::vector<Node> stage_nodes;
  std::int64_t in = stem;
  for (std::size_t s = 0; s < std::size(stages); ++s) {
    const auto& stage = stages[s];
    const auto out = round_channels(static_cast<double>(stage.out), config.width);
    const auto repeats =
        static_cast<std::int64_t>(std::ceil(static_cast<double>(stage.repeats) * config.depth));
    std::vector<Node> blocks;
    for (std::int64_t r = 0; r < repeats; ++r) {
      const auto se = std::max<std::int64_t>(1, in / 4);
      if (stage.expand == 1) {
        blocks.push_back(depthwise_separable(std::to_string(r), in, out, se));
      } else {
        blocks.push_back(
            inverted_residual(std::to_string(r), in, in * stage.expand, out, stage.kernel, se));
      }
      in = out;
    }
    stage_nodes.push_back(module(std::to_string(s), std::move(blocks)));
  }

  const auto head = round_channels(1280, config.width);
  return ArchDescriptor(
      std::move(name),
      root({conv2d("conv_stem", stem, 3, 3, 3), batchnorm2d("bn1", stem), activation("act1"),
            module("blocks", std::move(stage_nodes)), conv2d("conv_head", head, in, 1, 1),
            batchnorm2d("bn2", head), activation("act2"), pool("global_pool"),
            linear("classifier", config.num_classes, head)}));
}

ArchDescriptor efficientnet_b0_like() { return efficientnet_like({1.0, 1.0, 100}, "efficientnet_b0"); }
ArchDescriptor efficientnet_b2_like() { return efficientnet_like({1.1, 1.2, 100}, "efficientnet_b2"); }

ArchDescriptor rexnet_like() {
  const std::int64_t layers[] = {1, 2, 2, 3, 3, 5};
  const std::int64_t strides_kernel = 3;
  std::size_t total = 0;
  for (auto l : layers) total += static_cast<std::size_t>(l);

  auto conv_norm = [](std::string name, std::int64_t out, std::int64_t in, std::int64_t k,
                      bool act) {
    std::vector<Node> children{conv2d("conv", out, in, k, k), batchnorm2d("bn", out)};
    if (act) children.push_back(activation("act"));
    return module(std::move(name), std::move(children));
  };

  std::vector<Node> features;
  const std::int64_t stem = 32;
  std::int64_t in = stem;
  double base = 16.0;
  for (std::size_t i = 0; i < total; ++i) {
    const auto out = static_cast<std::int64_t>(std::lround(base));
    base += 180.0 / static_cast<double>(total);
    const std::int64_t expand = i == 0 ? 1 : 6;
    const bool use_se = i >= static_cast<std::size_t>(layers[0] + layers[1]);
    const auto mid = in * expand;

    std::vector<Node> children;
    if (expand != 1) children.push_back(conv_norm("conv_exp", mid, in, 1, true));
    children.push_back(conv_norm("conv_dw", mid, 1, strides_kernel, false));
    if (use_se) {
      const auto rd = std::max<std::int64_t>(1, mid / 12);
      children.push_back(module("se", {conv2d("fc1", rd, mid, 1, 1, true), batchnorm2d("bn", rd),
                                       activation("act"), conv2d("fc2", mid, rd, 1, 1, true)}));
    }
    children.push_back(activation("act_dw"));
    children.push_back(conv_norm("conv_pwl", out, mid, 1, false));
    features.push_back(module(std::to_string(i), std::move(children)));
    in = out;
  }

  return ArchDescriptor(
      "rexnet", root({module("stem", {conv2d("conv", stem, 3, 3, 3), batchnorm2d("bn", stem),
                                      activation("act")}),
                      module("features", std::move(features)),
                      module("head", {conv2d("conv", 1280, in, 1, 1), batchnorm2d("bn", 1280),
                                      activation("act")}),
                      pool("global_pool"), linear("fc", 100, 1280)}));
}

ArchDescriptor conv_stack(const std::vector<std::int64_t>& channels, std::int64_t kernel,
                          std::string name) {
  std::vector<Node> children;
  for (std::size_t i = 0; i + 1 < channels.size(); ++i) {
    if (i) children.push_back(activation("relu" + std::to_string(i - 1)));
    children.push_back(
        conv2d("conv" + std::to_string(i), channels[i + 1], channels[i], kernel, kernel, true));
  }
  return ArchDescriptor(std::move(name), root(std::move(children)));
}

ArchDescriptor flat_net(std::size_t count) {
  std::vector<Node> children;
  for (std::size_t i = 0; i < count; ++i) {
    const auto name = "l" + std::to_string(i);
    const auto width = static_cast<std::int64_t>(8 + 4 * (i / 3));
    switch (i % 3) {
      case 0: children.push_back(conv2d(name, width, i ? width - 4 : 3, 3, 3)); break;
      case 1: children.push_back(batchnorm2d(name, width)); break;
      default: children.push_back(activation(name)); break;
    }
  }
  return ArchDescriptor("flat", root(std::move(children)));
}

ArchDescriptor conv_only_net() { return conv_stack({3, 16, 32, 64}, 3, "conv_only"); }

ArchDescriptor linear_only_net() {
  return ArchDescriptor("linear_only",
                        root({linear("fc1", 256, 784), activation("act1"), linear("fc2", 128, 256),
                              activation("act2"), linear("fc3", 10, 128)}));
}

namespace {

std::int64_t pick(std::mt19937_64& rng, std::initializer_list<std::int64_t> values) {
  std::uniform_int_distribution<std::size_t> dist(0, values.size() - 1);
  return *(values.begin() + dist(rng));
}

int coin(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Node random_block(std::mt19937_64& rng, std::string name, std::int64_t& channels) {
  std::vector<Node> children;
  const int convs = coin(rng, 1, 4);
  for (int c = 0; c < convs; ++c) {
    const auto out = pick(rng, {8, 16, 24, 32, 48, 64});
    const auto k = pick(rng, {1, 3, 5});
    const auto suffix = std::to_string(c);
    children.push_back(conv2d("conv" + suffix, out, channels, k, k, coin(rng, 0, 3) == 0));
    if (coin(rng, 0, 4) != 0) children.push_back(batchnorm2d("bn" + suffix, out));
    if (coin(rng, 0, 2) != 0) children.push_back(activation("act" + suffix));
    channels = out;
    if (c == 0 && coin(rng, 0, 3) == 0) {
      const auto reduced = std::max<std::int64_t>(1, channels / 4);
      children.push_back(squeeze_excite(channels, reduced));
    }
  }
  return module(std::move(name), std::move(children));
}

}  // namespace

ArchDescriptor random_net(std::mt19937_64& rng, std::string name) {
  std::int64_t channels = pick(rng, {8, 16, 32});
  std::vector<Node> top{conv2d("conv_stem", channels, 3, 3, 3), batchnorm2d("bn_stem", channels),
                        activation("act_stem")};

  std::vector<Node> stages;
  const int stage_count = coin(rng, 1, 3);
  const bool grouped = coin(rng, 0, 1) == 1;
  for (int s = 0; s < stage_count; ++s) {
    std::vector<Node> blocks;
    const int block_count = coin(rng, 1, 3);
    for (int b = 0; b < block_count; ++b) {
      blocks.push_back(random_block(rng, std::to_string(b), channels));
    }
    if (grouped) {
      stages.push_back(module(std::to_string(s), std::move(blocks)));
    } else {
      for (auto& block : blocks) {
        auto& node = std::get<ModuleNode>(block.value);
        node.name = std::to_string(s) + "_" + node.name;
        stages.push_back(std::move(block));
      }
    }
  }
  top.push_back(module("blocks", std::move(stages)));

  const auto head = pick(rng, {64, 128, 256});
  top.push_back(conv2d("conv_head", head, channels, 1, 1));
  top.push_back(batchnorm2d("bn_head", head));
  top.push_back(activation("act_head"));
  top.push_back(pool("pool"));
  if (coin(rng, 0, 2) == 0) {
    top.push_back(linear("fc_hidden", head, head));
    top.push_back(activation("act_fc"));
  }
  top.push_back(linear("classifier", pick(rng, {10, 100}), head));
  return ArchDescriptor(std::move(name), root(std::move(top)));
}

ArchDescriptor synthetic_net(std::size_t parameterized_layers, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Node> top{conv2d("conv_stem", 32, 3, 3, 3), batchnorm2d("bn_stem", 32)};
  std::size_t remaining = parameterized_layers - 3;
  std::vector<Node> blocks;
  std::int64_t channels = 32;
  std::size_t index = 0;
  while (remaining > 0) {
    const auto size = std::min<std::size_t>(remaining, static_cast<std::size_t>(coin(rng, 3, 9)));
    std::vector<Node> layers;
    for (std::size_t l = 0; l < size; ++l) {
      const auto suffix = std::to_string(l);
      if (l % 2 == 0) {
        const auto out = pick(rng, {16, 24, 32, 48, 64, 96});
        const auto k = pick(rng, {1, 3, 5});
        layers.push_back(conv2d("conv" + suffix, out, channels, k, k));
        channels = out;
      } else {
        layers.push_back(batchnorm2d("bn" + suffix, channels));
        layers.push_back(activation("act" + suffix));
      }
    }
    blocks.push_back(module(std::to_string(index++), std::move(layers)));
    remaining -= size;
  }
  top.push_back(module("blocks", std::move(blocks)));
  top.push_back(pool("pool"));
  top.push_back(linear("classifier", 100, channels));
  return ArchDescriptor("synthetic", root(std::move(top)));
}

ArchDescriptor deep_tree(std::size_t blocks, std::size_t height) {
  std::vector<Node> stages;
  std::vector<Node> current;
  for (std::size_t b = 0; b < blocks; ++b) {
    Node node = module("body", {conv2d("conv_a", 16, 16, 3, 3), batchnorm2d("bn_a", 16),
                                activation("act_a"), conv2d("conv_b", 16, 16, 3, 3),
                                batchnorm2d("bn_b", 16), activation("act_b")});
    for (std::size_t h = 0; h < height; ++h) {
      node = module("wrap" + std::to_string(h), {std::move(node)});
    }
    std::get<ModuleNode>(node.value).name = std::to_string(b);
    current.push_back(std::move(node));
    if (current.size() == 4 || b + 1 == blocks) {
      stages.push_back(module("stage" + std::to_string(stages.size()), std::move(current)));
      current.clear();
    }
  }
  return ArchDescriptor("deep", root({conv2d("conv_stem", 16, 3, 3, 3),
                                      module("stages", std::move(stages)),
                                      linear("classifier", 10, 16)}));
}

WeightStore random_weights(const ArchDescriptor& descriptor, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  WeightStore store;
  for (const auto* leaf : descriptor.leaves()) {
    for (const auto& spec : leaf->params) {
      Tensor tensor(spec.shape);
      for (auto& v : tensor.values) v = dist(rng);
      store.emplace(tensor_key(leaf->path, spec.role), std::move(tensor));
    }
  }
  return store;
}

WeightStore zero_weights(const ArchDescriptor& descriptor) {
  WeightStore store;
  for (const auto* leaf : descriptor.leaves()) {
    for (const auto& spec : leaf->params) {
      store.emplace(tensor_key(leaf->path, spec.role), Tensor(spec.shape));
    }
  }
  return store;
}

NetworkMatching identity_matching(const ArchDescriptor& target, const ArchDescriptor& source) {
  std::vector<const LayerNode*> t;
  std::vector<const LayerNode*> s;
  for (const auto* leaf : target.leaves()) {
    if (is_parameterized(leaf->kind)) t.push_back(leaf);
  }
  for (const auto* leaf : source.leaves()) {
    if (is_parameterized(leaf->kind)) s.push_back(leaf);
  }
  NetworkMatching matching;
  for (std::size_t i = 0; i < std::min(t.size(), s.size()); ++i) {
    LayerMatch match;
    match.target_path = t[i]->path;
    match.source_path = s[i]->path;
    match.score = shape_score(*t[i], *s[i]);
    matching.pairs.push_back(std::move(match));
  }
  return matching;
}

std::vector<ArchDescriptor> named_fixtures() {
  std::vector<ArchDescriptor> out{inverted_residual_net(),
                                  efficientnet_b0_like(),
                                  efficientnet_b2_like(),
                                  rexnet_like(),
                                  conv_stack({3, 4, 8, 5}),
                                  conv_stack({3, 8, 12, 5}),
                                  flat_net(7),
                                  conv_only_net(),
                                  linear_only_net(),
                                  deep_tree(6, 3),
                                  synthetic_net(40, 1)};
  std::mt19937_64 rng(2024);
  out.push_back(random_net(rng, "random_a"));
  out.push_back(random_net(rng, "random_b"));
  return out;
}

}  // namespace iat::testing
