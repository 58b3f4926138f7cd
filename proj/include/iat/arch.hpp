#pragma once

// Domain types shared by every stage of the transfer pipeline: the
// implementation tree of a network, its standardized block form, matchings
// between two networks and the dense tensors that hold parameters.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iat {

enum class LayerKind { conv2d, batchnorm2d, linear, activation, pool, identity, opaque };

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view text);

/// Kinds that carry parameter tensors and take part in matching. `opaque`
/// layers may carry tensors but are never matched.
constexpr bool is_parameterized(LayerKind kind) {
  return kind == LayerKind::conv2d || kind == LayerKind::batchnorm2d ||
         kind == LayerKind::linear;
}

enum class TensorRole { weight, bias, running_mean, running_var };

inline constexpr std::array<TensorRole, 4> kTensorRoles{
    TensorRole::weight, TensorRole::bias, TensorRole::running_mean,
    TensorRole::running_var};

std::string_view to_string(TensorRole role);
std::optional<TensorRole> parse_tensor_role(std::string_view text);

using Shape = std::vector<std::int64_t>;

std::int64_t numel(const Shape& shape);
std::string format_shape(const Shape& shape);

struct TensorSpec {
  TensorRole role = TensorRole::weight;
  Shape shape;

  bool operator==(const TensorSpec&) const = default;
};

struct LayerNode {
  std::string name;
  LayerKind kind = LayerKind::identity;
  std::vector<TensorSpec> params;
  /// Slash-joined names from the root, root name excluded. Filled in by
  /// ArchDescriptor.
  std::string path;

  const TensorSpec* param(TensorRole role) const;
  const Shape* weight_shape() const;

  bool operator==(const LayerNode&) const = default;
};

struct Node;

struct ModuleNode {
  std::string name;
  std::vector<Node> children;
};

struct Node {
  std::variant<ModuleNode, LayerNode> value;

  const std::string& name() const;
  const LayerNode* as_layer() const { return std::get_if<LayerNode>(&value); }
  const ModuleNode* as_module() const { return std::get_if<ModuleNode>(&value); }
};

bool operator==(const ModuleNode& a, const ModuleNode& b);
bool operator==(const Node& a, const Node& b);

/// Architecture description: a named tree of modules whose leaves are layers.
/// Immutable once constructed.
class ArchDescriptor {
 public:
  static constexpr int kFormatVersion = 1;

  ArchDescriptor(std::string name, ModuleNode root, int format_version = kFormatVersion);

  const std::string& name() const { return name_; }
  int format_version() const { return format_version_; }
  const ModuleNode& root() const { return root_; }

  /// Leaves in left-to-right (declaration) order.
  std::vector<const LayerNode*> leaves() const;
  const LayerNode* find_layer(std::string_view path) const;

  bool operator==(const ArchDescriptor& other) const;

 private:
  std::string name_;
  int format_version_;
  ModuleNode root_;
};

struct Block {
  std::vector<LayerNode> layers;

  std::size_t parameterized_count() const;
  bool operator==(const Block&) const = default;
};

struct StandardizedNetwork {
  std::vector<Block> blocks;

  std::size_t layer_count() const;
  std::size_t parameterized_layer_count() const;
  bool operator==(const StandardizedNetwork&) const = default;
};

struct LayerMatch {
  std::string target_path;
  std::string source_path;
  double score = 0.0;
  // Positions inside the standardized networks: block index and index into
  // that block's layer list.
  std::size_t target_block = 0;
  std::size_t target_layer = 0;
  std::size_t source_block = 0;
  std::size_t source_layer = 0;

  bool operator==(const LayerMatch&) const = default;
};

/// A run of consecutive target blocks [target_first, target_last] assigned to
/// one source block.
struct BlockPair {
  std::size_t target_first = 0;
  std::size_t target_last = 0;
  std::size_t source = 0;

  bool operator==(const BlockPair&) const = default;
};

struct NetworkMatching {
  std::vector<LayerMatch> pairs;
  double network_score = 0.0;
  std::vector<BlockPair> block_pairs;

  bool operator==(const NetworkMatching&) const = default;
};

/// Dense row-major f32 tensor.
struct Tensor {
  Shape shape;
  std::vector<float> values;

  Tensor() = default;
  explicit Tensor(Shape shape_);
  Tensor(Shape shape_, std::vector<float> values_);

  std::int64_t numel() const { return static_cast<std::int64_t>(values.size()); }
  std::vector<std::int64_t> strides() const;

  bool operator==(const Tensor&) const = default;
};

/// Keyed by "layer_path/role".
using WeightStore = std::map<std::string, Tensor>;

std::string tensor_key(std::string_view layer_path, TensorRole role);

struct Violation {
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Structural checks on a descriptor and, optionally, the weights that
/// accompany it. Violations are returned as data; an empty list means valid.
std::vector<Violation> validate(const ArchDescriptor& descriptor,
                                const WeightStore* weights = nullptr);

/// Convenience constructors for building trees in code.
namespace build {

Node layer(std::string name, LayerKind kind, std::vector<TensorSpec> params = {});
Node module(std::string name, std::vector<Node> children);
Node conv2d(std::string name, std::int64_t out, std::int64_t in, std::int64_t kh,
            std::int64_t kw, bool bias = false);
Node batchnorm2d(std::string name, std::int64_t channels);
Node linear(std::string name, std::int64_t out, std::int64_t in, bool bias = true);
Node activation(std::string name);
Node pool(std::string name);
Node identity(std::string name);
ModuleNode root(std::vector<Node> children);

}  // namespace build

}  // namespace iat
