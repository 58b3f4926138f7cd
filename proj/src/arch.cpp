#include "iat/arch.hpp"

#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "iat/error.hpp"

namespace iat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::no_layers: return "no layers";
    case ErrorCode::empty_network: return "empty network";
    case ErrorCode::undefined_self_score: return "undefined self-score";
    case ErrorCode::oracle_limit: return "oracle limit exceeded";
    case ErrorCode::rank_mismatch: return "rank mismatch";
    case ErrorCode::malformed_json: return "malformed json";
    case ErrorCode::unknown_layer_type: return "unknown layer type";
    case ErrorCode::duplicate_path: return "duplicate path";
    case ErrorCode::validation: return "validation";
    case ErrorCode::invalid_name: return "invalid name";
    case ErrorCode::unsupported_version: return "unsupported version";
    case ErrorCode::bad_magic: return "bad magic";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::offset_overlap: return "offset overlap";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::unsupported_dtype: return "unsupported dtype";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::batchnorm2d: return "batchnorm2d";
    case LayerKind::linear: return "linear";
    case LayerKind::activation: return "activation";
    case LayerKind::pool: return "pool";
    case LayerKind::identity: return "identity";
    case LayerKind::opaque: return "opaque";
  }
  return "opaque";
}

std::optional<LayerKind> parse_layer_kind(std::string_view text) {
  for (auto kind : {LayerKind::conv2d, LayerKind::batchnorm2d, LayerKind::linear,
                    LayerKind::activation, LayerKind::pool, LayerKind::identity,
                    LayerKind::opaque}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(TensorRole role) {
  switch (role) {
    case TensorRole::weight: return "weight";
    case TensorRole::bias: return "bias";
    case TensorRole::running_mean: return "running_mean";
    case TensorRole::running_var: return "running_var";
  }
  return "weight";
}

std::optional<TensorRole> parse_tensor_role(std::string_view text) {
  for (auto role : kTensorRoles) {
    if (to_string(role) == text) return role;
  }
  return std::nullopt;
}

std::int64_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1},
                         std::multiplies<>());
}

std::string format_shape(const Shape& shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ')';
  return out.str();
}

const TensorSpec* LayerNode::param(TensorRole role) const {
  for (const auto& spec : params) {
    if (spec.role == role) return &spec;
  }
  return nullptr;
}

const Shape* LayerNode::weight_shape() const {
  const auto* spec = param(TensorRole::weight);
  return spec ? &spec->shape : nullptr;
}

const std::string& Node::name() const {
  return std::visit([](const auto& n) -> const std::string& { return n.name; }, value);
}

bool operator==(const ModuleNode& a, const ModuleNode& b) {
  return a.name == b.name && a.children == b.children;
}

bool operator==(const Node& a, const Node& b) { return a.value == b.value; }

namespace {

void assign_paths(ModuleNode& module, const std::string& prefix) {
  for (auto& child : module.children) {
    if (auto* layer = std::get_if<LayerNode>(&child.value)) {
      layer->path = prefix.empty() ? layer->name : prefix + "/" + layer->name;
    } else {
      auto& sub = std::get<ModuleNode>(child.value);
      assign_paths(sub, prefix.empty() ? sub.name : prefix + "/" + sub.name);
    }
  }
}

void collect_leaves(const ModuleNode& module, std::vector<const LayerNode*>& out) {
  for (const auto& child : module.children) {
    if (const auto* layer = child.as_layer()) {
      out.push_back(layer);
    } else {
      collect_leaves(*child.as_module(), out);
    }
  }
}

}  // namespace

ArchDescriptor::ArchDescriptor(std::string name, ModuleNode root, int format_version)
    : name_(std::move(name)), format_version_(format_version), root_(std::move(root)) {
  assign_paths(root_, "");
}

std::vector<const LayerNode*> ArchDescriptor::leaves() const {
  std::vector<const LayerNode*> out;
  collect_leaves(root_, out);
  return out;
}

const LayerNode* ArchDescriptor::find_layer(std::string_view path) const {
  for (const auto* leaf : leaves()) {
    if (leaf->path == path) return leaf;
  }
  return nullptr;
}

bool ArchDescriptor::operator==(const ArchDescriptor& other) const {
  return name_ == other.name_ && format_version_ == other.format_version_ &&
         root_ == other.root_;
}

std::size_t Block::parameterized_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) count += is_parameterized(layer.kind) ? 1 : 0;
  return count;
}

std::size_t StandardizedNetwork::layer_count() const {
  std::size_t count = 0;
  for (const auto& block : blocks) count += block.layers.size();
  return count;
}

std::size_t StandardizedNetwork::parameterized_layer_count() const {
  std::size_t count = 0;
  for (const auto& block : blocks) count += block.parameterized_count();
  return count;
}

Tensor::Tensor(Shape shape_)
    : shape(std::move(shape_)), values(static_cast<std::size_t>(iat::numel(shape)), 0.0f) {}

Tensor::Tensor(Shape shape_, std::vector<float> values_)
    : shape(std::move(shape_)), values(std::move(values_)) {
  if (static_cast<std::int64_t>(values.size()) != iat::numel(shape)) {
    throw Error(ErrorCode::shape_mismatch,
                "tensor of shape " + format_shape(shape) + " given " +
                    std::to_string(values.size()) + " values");
  }
}

std::vector<std::int64_t> Tensor::strides() const {
  std::vector<std::int64_t> out(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) out[i - 1] = out[i] * shape[i];
  return out;
}

std::string tensor_key(std::string_view layer_path, TensorRole role) {
  std::string key(layer_path);
  key += '/';
  key += to_string(role);
  return key;
}

namespace {

std::size_t expected_rank(LayerKind kind, TensorRole role) {
  if (role != TensorRole::weight) return 1;
  switch (kind) {
    case LayerKind::conv2d: return 4;
    case LayerKind::linear: return 2;
    case LayerKind::batchnorm2d: return 1;
    default: return 0;
  }
}

void check_layer(const LayerNode& layer, std::vector<Violation>& out) {
  auto report = [&](std::string message) { out.push_back({layer.path, std::move(message)}); };
  const auto kind_name = std::string(to_string(layer.kind));

  if (layer.kind == LayerKind::opaque) return;
  if (!is_parameterized(layer.kind)) {
    if (!layer.params.empty()) report(kind_name + " layer must not carry parameters");
    return;
  }

  std::set<TensorRole> seen;
  for (const auto& spec : layer.params) {
    const auto role_name = std::string(to_string(spec.role));
    if (!seen.insert(spec.role).second) report("duplicate tensor role " + role_name);
    if (spec.shape.empty()) {
      report(role_name + " shape must be non-empty");
      continue;
    }
    for (auto dim : spec.shape) {
      if (dim < 1) {
        report(role_name + " dims must be >= 1");
        break;
      }
    }
    if (layer.kind != LayerKind::batchnorm2d &&
        (spec.role == TensorRole::running_mean || spec.role == TensorRole::running_var)) {
      report(kind_name + " layer cannot carry " + role_name);
      continue;
    }
    const auto rank = expected_rank(layer.kind, spec.role);
    if (spec.shape.size() != rank) {
      report(kind_name + " " + role_name + " must have " + std::to_string(rank) +
             (rank == 1 ? " dim" : " dims"));
    }
  }

  const auto* weight = layer.weight_shape();
  if (!weight) {
    report(kind_name + " layer requires a weight");
    return;
  }
  if (weight->empty()) return;
  for (const auto& spec : layer.params) {
    if (spec.role == TensorRole::weight || spec.shape.size() != 1) continue;
    if (spec.shape[0] != (*weight)[0]) {
      report(std::string(to_string(spec.role)) + " length must equal output channels");
    }
  }
}

}  // namespace

std::vector<Violation> validate(const ArchDescriptor& descriptor, const WeightStore* weights) {
  std::vector<Violation> out;
  std::set<std::string> paths;

  std::function<void(const ModuleNode&, const std::string&)> walk =
      [&](const ModuleNode& module, const std::string& prefix) {
        std::set<std::string> siblings;
        for (const auto& child : module.children) {
          const auto& name = child.name();
          const auto path = prefix.empty() ? name : prefix + "/" + name;
          if (name.empty()) out.push_back({path, "empty name"});
          if (name.find('/') != std::string::npos) {
            out.push_back({path, "name must not contain '/'"});
          }
          if (!siblings.insert(name).second || !paths.insert(path).second) {
            out.push_back({path, "duplicate path"});
          }
          if (const auto* layer = child.as_layer()) {
            check_layer(*layer, out);
          } else {
            walk(*child.as_module(), path);
          }
        }
      };
  walk(descriptor.root(), "");

  if (!weights) return out;

  std::set<std::string> expected;
  for (const auto* leaf : descriptor.leaves()) {
    for (const auto& spec : leaf->params) {
      auto key = tensor_key(leaf->path, spec.role);
      expected.insert(key);
      auto it = weights->find(key);
      if (it == weights->end()) {
        out.push_back({key, "missing tensor"});
      } else if (it->second.shape != spec.shape) {
        out.push_back({key, "shape mismatch: expected " + format_shape(spec.shape) +
                                ", got " + format_shape(it->second.shape)});
      } else if (it->second.numel() != numel(spec.shape)) {
        out.push_back({key, "value count does not match shape"});
      }
    }
  }
  for (const auto& [key, tensor] : *weights) {
    if (!expected.count(key)) out.push_back({key, "orphan tensor"});
  }
  return out;
}

namespace build {

Node layer(std::string name, LayerKind kind, std::vector<TensorSpec> params) {
  return Node{LayerNode{std::move(name), kind, std::move(params), {}}};
}

Node module(std::string name, std::vector<Node> children) {
  return Node{ModuleNode{std::move(name), std::move(children)}};
}

Node conv2d(std::string name, std::int64_t out, std::int64_t in, std::int64_t kh,
            std::int64_t kw, bool bias) {
  std::vector<TensorSpec> params{{TensorRole::weight, {out, in, kh, kw}}};
  if (bias) params.push_back({TensorRole::bias, {out}});
  return layer(std::move(name), LayerKind::conv2d, std::move(params));
}

Node batchnorm2d(std::string name, std::int64_t channels) {
  return layer(std::move(name), LayerKind::batchnorm2d,
               {{TensorRole::weight, {channels}},
                {TensorRole::bias, {channels}},
                {TensorRole::running_mean, {channels}},
                {TensorRole::running_var, {channels}}});
}

Node linear(std::string name, std::int64_t out, std::int64_t in, bool bias) {
  std::vector<TensorSpec> params{{TensorRole::weight, {out, in}}};
  if (bias) params.push_back({TensorRole::bias, {out}});
  return layer(std::move(name), LayerKind::linear, std::move(params));
}

Node activation(std::string name) { return layer(std::move(name), LayerKind::activation); }
Node pool(std::string name) { return layer(std::move(name), LayerKind::pool); }
Node identity(std::string name) { return layer(std::move(name), LayerKind::identity); }

ModuleNode root(std::vector<Node> children) {
  return ModuleNode{"", std::move(children)};
}

}  // namespace build

}  // namespace iat
