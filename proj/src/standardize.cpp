#include "iat/standardize.hpp"

#include "iat/error.hpp"

namespace iat {

namespace {

bool is_sublist(const RawElement& element) {
  return std::holds_alternative<std::vector<const LayerNode*>>(element);
}

// Conv and linear layers are what make a group worth keeping as a block.
std::size_t count_conv_linear(const RawList& raw) {
  auto counts = [](const LayerNode* layer) -> std::size_t {
    return layer->kind == LayerKind::conv2d || layer->kind == LayerKind::linear ? 1 : 0;
  };
  std::size_t total = 0;
  for (const auto& element : raw) {
    if (const auto* layer = std::get_if<const LayerNode*>(&element)) {
      total += counts(*layer);
    } else {
      for (const auto* inner : std::get<std::vector<const LayerNode*>>(element)) {
        total += counts(inner);
      }
    }
  }
  return total;
}

std::size_t element_size(const RawElement& element) {
  if (const auto* list = std::get_if<std::vector<const LayerNode*>>(&element)) {
    return list->size();
  }
  return 1;
}

RawList standardize_module(const ModuleNode& module, int d, StandardizeStats* stats) {
  RawList out;
  auto tick = [stats](std::uint64_t n = 1) {
    if (stats) stats->operations += n;
  };

  for (const auto& child : module.children) {
    RawList child_blocks = standardize_raw(child, d + 1, stats);
    if (depth(child_blocks) > 1 || count_conv_linear(child_blocks) <= 1) {
      tick(child_blocks.size());
      for (auto& element : child_blocks) out.push_back(std::move(element));
    } else {
      // depth <= 1 here, so every element is a single layer.
      std::vector<const LayerNode*> group;
      group.reserve(child_blocks.size());
      for (const auto& element : child_blocks) {
        group.push_back(std::get<const LayerNode*>(element));
      }
      tick(group.size());
      out.emplace_back(std::move(group));
    }
  }

  // A one-element list counts as a single layer.
  std::size_t n_blocks = 0;
  std::size_t n_layers = 0;
  for (const auto& element : out) {
    if (element_size(element) > 1) {
      ++n_blocks;
    } else {
      ++n_layers;
    }
  }
  tick(out.size());

  if (n_blocks < n_layers && d > 0) {
    RawList flat;
    for (auto& element : out) {
      if (const auto* layer = std::get_if<const LayerNode*>(&element)) {
        flat.emplace_back(*layer);
        tick();
      } else {
        for (const auto* inner : std::get<std::vector<const LayerNode*>>(element)) {
          flat.emplace_back(inner);
          tick();
        }
      }
    }
    out = std::move(flat);
  }
  return out;
}

}  // namespace

int depth(const RawList& raw) {
  if (raw.empty()) return 0;
  for (const auto& element : raw) {
    if (is_sublist(element)) return 2;
  }
  return 1;
}

RawList standardize_raw(const Node& node, int d, StandardizeStats* stats) {
  if (stats) ++stats->operations;
  if (const auto* layer = node.as_layer()) return RawList{layer};
  return standardize_module(*node.as_module(), d, stats);
}

StandardizedNetwork standardize(const ModuleNode& root, StandardizeStats* stats) {
  if (stats) ++stats->operations;
  const RawList raw = standardize_module(root, 0, stats);
  if (raw.empty()) throw Error(ErrorCode::no_layers, "no layers");

  StandardizedNetwork network;
  network.blocks.reserve(raw.size());
  for (const auto& element : raw) {
    Block block;
    if (const auto* layer = std::get_if<const LayerNode*>(&element)) {
      block.layers.push_back(**layer);
    } else {
      for (const auto* inner : std::get<std::vector<const LayerNode*>>(element)) {
        block.layers.push_back(*inner);
      }
    }
    network.blocks.push_back(std::move(block));
  }
  return network;
}

StandardizedNetwork standardize(const ArchDescriptor& descriptor, StandardizeStats* stats) {
  return standardize(descriptor.root(), stats);
}

}  // namespace iat
