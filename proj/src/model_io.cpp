#include "iat/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "iat/error.hpp"
#include "json.hpp"

namespace iat {

using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'I', 'A', 'T', 'W'};
constexpr std::size_t kAlignment = 8;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::malformed_json, "malformed descriptor: " + what);
}

const json& field(const json& object, const char* name) {
  auto it = object.find(name);
  if (it == object.end()) malformed(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& object, const char* name) {
  const auto& value = field(object, name);
  if (!value.is_string()) malformed(std::string("field '") + name + "' must be a string");
  return value.get<std::string>();
}

Shape parse_shape(const json& value, const std::string& where) {
  if (!value.is_array()) malformed(where + " must be an array of integers");
  Shape shape;
  for (const auto& dim : value) {
    if (!dim.is_number_integer()) malformed(where + " must be an array of integers");
    shape.push_back(dim.get<std::int64_t>());
  }
  return shape;
}

Node parse_node(const json& object, const DescriptorOptions& options) {
  if (!object.is_object()) malformed("node must be an object");
  auto name = string_field(object, "name");
  if (name.find('/') != std::string::npos) {
    throw Error(ErrorCode::invalid_name, "name '" + name + "' must not contain '/'");
  }
  const auto kind = string_field(object, "kind");

  if (kind == "module") {
    const auto& children = field(object, "children");
    if (!children.is_array()) malformed("'children' must be an array");
    ModuleNode module{std::move(name), {}};
    std::set<std::string> names;
    for (const auto& child : children) {
      module.children.push_back(parse_node(child, options));
      if (!names.insert(module.children.back().name()).second) {
        throw Error(ErrorCode::duplicate_path,
                    "duplicate path: '" + module.children.back().name() + "' under '" +
                        module.name + "'");
      }
    }
    return Node{std::move(module)};
  }
  if (kind != "layer") malformed("unknown node kind '" + kind + "'");

  const auto type_name = string_field(object, "layer_type");
  auto layer_kind = parse_layer_kind(type_name);
  if (!layer_kind) {
    if (!options.unknown_as_opaque) {
      throw Error(ErrorCode::unknown_layer_type, "unknown layer_type '" + type_name + "'");
    }
    layer_kind = LayerKind::opaque;
  }

  LayerNode layer{std::move(name), *layer_kind, {}, {}};
  if (auto it = object.find("params"); it != object.end() && !it->is_null()) {
    if (!it->is_object()) malformed("'params' must be an object");
    for (auto role : kTensorRoles) {
      auto p = it->find(std::string(to_string(role)));
      if (p == it->end() || p->is_null()) continue;
      layer.params.push_back(
          {role, parse_shape(*p, "params." + std::string(to_string(role)))});
    }
  }
  return Node{std::move(layer)};
}

json node_to_json(const Node& node) {
  json out;
  out["name"] = node.name();
  if (const auto* layer = node.as_layer()) {
    out["kind"] = "layer";
    out["layer_type"] = std::string(to_string(layer->kind));
    json params = json::object();
    for (auto role : kTensorRoles) {
      const auto* spec = layer->param(role);
      params[std::string(to_string(role))] = spec ? json(spec->shape) : json(nullptr);
    }
    out["params"] = std::move(params);
  } else {
    out["kind"] = "module";
    json children = json::array();
    for (const auto& child : node.as_module()->children) children.push_back(node_to_json(child));
    out["children"] = std::move(children);
  }
  return out;
}

void put_u32(std::string& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return value;
}

std::size_t aligned(std::size_t offset) {
  return (offset + kAlignment - 1) / kAlignment * kAlignment;
}

}  // namespace

ArchDescriptor load_descriptor(std::string_view json_text, const DescriptorOptions& options) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_json, std::string("malformed json: ") + e.what());
  }
  if (!doc.is_object()) malformed("top level must be an object");

  const auto& version = field(doc, "format_version");
  if (!version.is_number_integer()) malformed("'format_version' must be an integer");
  if (version.get<std::int64_t>() != ArchDescriptor::kFormatVersion) {
    throw Error(ErrorCode::unsupported_version,
                "unsupported version " + std::to_string(version.get<std::int64_t>()));
  }
  auto name = string_field(doc, "name");
  Node root = parse_node(field(doc, "root"), options);
  auto* module = std::get_if<ModuleNode>(&root.value);
  if (!module) malformed("root must be a module");

  ArchDescriptor descriptor(std::move(name), std::move(*module));
  if (options.validate) {
    const auto violations = validate(descriptor);
    if (!violations.empty()) {
      std::string message = "invalid descriptor:";
      for (const auto& v : violations) message += "\n  " + v.path + ": " + v.message;
      throw Error(ErrorCode::validation, message);
    }
  }
  return descriptor;
}

std::string save_descriptor(const ArchDescriptor& descriptor) {
  json doc;
  doc["format_version"] = descriptor.format_version();
  doc["name"] = descriptor.name();
  doc["root"] = node_to_json(Node{descriptor.root()});
  return doc.dump(2) + "\n";
}

std::string save_weights(const WeightStore& weights) {
  json manifest = json::array();
  std::size_t offset = 0;
  for (const auto& [key, tensor] : weights) {
    if (tensor.numel() != numel(tensor.shape)) {
      throw Error(ErrorCode::shape_mismatch, "tensor '" + key + "' value count does not match shape");
    }
    offset = aligned(offset);
    manifest.push_back({{"key", key}, {"dtype", "f32"}, {"shape", tensor.shape}, {"offset", offset}});
    offset += tensor.values.size() * sizeof(float);
  }
  const std::string manifest_text = manifest.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(manifest_text.size()));
  out += manifest_text;
  const std::size_t payload_start = out.size();
  out.reserve(payload_start + offset);
  for (const auto& [key, tensor] : weights) {
    out.resize(payload_start + aligned(out.size() - payload_start), '\0');
    for (float value : tensor.values) put_u32(out, std::bit_cast<std::uint32_t>(value));
  }
  return out;
}

WeightStore load_weights(std::string_view bytes) {
  if (bytes.size() < 8) throw Error(ErrorCode::truncated, "truncated: missing header");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::bad_magic, "bad magic: not an IATW file");
  }
  const std::size_t manifest_length = get_u32(bytes, 4);
  if (bytes.size() - 8 < manifest_length) {
    throw Error(ErrorCode::truncated, "truncated: manifest extends past end of file");
  }
  json manifest;
  try {
    manifest = json::parse(bytes.substr(8, manifest_length));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_json, std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.is_array()) {
    throw Error(ErrorCode::malformed_json, "malformed manifest: expected an array");
  }
  const std::string_view payload = bytes.substr(8 + manifest_length);

  struct Extent {
    std::size_t begin;
    std::size_t end;
    std::string key;
  };
  std::vector<Extent> extents;
  WeightStore store;
  for (const auto& entry : manifest) {
    if (!entry.is_object() || !entry.contains("key") || !entry["key"].is_string() ||
        !entry.contains("dtype") || !entry.contains("shape") || !entry.contains("offset") ||
        !entry["offset"].is_number_unsigned()) {
      throw Error(ErrorCode::malformed_json, "malformed manifest entry: " + entry.dump());
    }
    const auto key = entry["key"].get<std::string>();
    if (entry["dtype"] != "f32") {
      throw Error(ErrorCode::unsupported_dtype, "unsupported dtype for '" + key + "'");
    }
    Shape shape;
    if (!entry["shape"].is_array()) throw Error(ErrorCode::malformed_json, "shape of '" + key + "' must be an array");
    for (const auto& dim : entry["shape"]) {
      if (!dim.is_number_integer() || dim.get<std::int64_t>() < 1) {
        throw Error(ErrorCode::shape_mismatch, "shape of '" + key + "' must hold positive integers");
      }
      shape.push_back(dim.get<std::int64_t>());
    }
    if (shape.empty()) throw Error(ErrorCode::shape_mismatch, "shape of '" + key + "' is empty");

    const auto offset = entry["offset"].get<std::uint64_t>();
    if (offset % kAlignment != 0) {
      throw Error(ErrorCode::alignment,
                  "alignment: offset " + std::to_string(offset) + " of '" + key + "' is not 8-byte aligned");
    }
    const auto count = static_cast<std::uint64_t>(numel(shape));
    const std::uint64_t size = count * sizeof(float);
    if (offset > payload.size() || payload.size() - offset < size) {
      throw Error(ErrorCode::truncated, "truncated: payload too short for '" + key + "'");
    }

    Tensor tensor;
    tensor.shape = std::move(shape);
    tensor.values.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      tensor.values[i] = std::bit_cast<float>(get_u32(payload, offset + 4 * i));
    }
    if (!store.emplace(key, std::move(tensor)).second) {
      throw Error(ErrorCode::duplicate_path, "duplicate path: tensor '" + key + "' listed twice");
    }
    extents.push_back({offset, offset + size, key});
  }

  std::sort(extents.begin(), extents.end(),
            [](const Extent& a, const Extent& b) { return a.begin < b.begin; });
  for (std::size_t i = 1; i < extents.size(); ++i) {
    if (extents[i].begin < extents[i - 1].end) {
      throw Error(ErrorCode::offset_overlap,
                  "offset overlap between '" + extents[i - 1].key + "' and '" + extents[i].key + "'");
    }
  }
  return store;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

ArchDescriptor load_descriptor_file(const std::filesystem::path& path,
                                    const DescriptorOptions& options) {
  return load_descriptor(read_file(path), options);
}

WeightStore load_weights_file(const std::filesystem::path& path) {
  return load_weights(read_file(path));
}

}  // namespace iat
