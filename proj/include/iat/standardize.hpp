#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "iat/arch.hpp"

namespace iat {

/// Intermediate DFS result: a list whose elements are single layers or lists
/// of layers. Nesting never exceeds two levels.
using RawElement = std::variant<const LayerNode*, std::vector<const LayerNode*>>;
using RawList = std::vector<RawElement>;

/// 0 for an empty list, 1 for layers only, 2 if any element is a sub-list.
int depth(const RawList& raw);

/// Work counter for the DFS; `operations` counts node visits plus element
/// moves and grows as O(layers * tree height).
struct StandardizeStats {
  std::uint64_t operations = 0;
};

/// Tree collapse for one node at DFS depth `d`.
RawList standardize_raw(const Node& node, int d, StandardizeStats* stats = nullptr);

/// Collapses the implementation tree into an ordered list of blocks. Throws
/// Error(no_layers) when the tree has no leaves.
StandardizedNetwork standardize(const ModuleNode& root, StandardizeStats* stats = nullptr);
StandardizedNetwork standardize(const ArchDescriptor& descriptor,
                                StandardizeStats* stats = nullptr);

}  // namespace iat
