#pragma once

// On-disk formats.
//
// Descriptor (UTF-8 JSON):
//   { "format_version": 1, "name": ..., "root": Node }
//   Node := { "name", "kind": "module", "children": [Node...] }
//         | { "name", "kind": "layer", "layer_type": ...,
//             "params": { "weight"|"bias"|"running_mean"|"running_var": [ints] | null } }
//
// Weights (little-endian):
//   "IATW" | u32 manifest_length | manifest JSON | payload
//   manifest: [{ "key": "path/role", "dtype": "f32", "shape": [...], "offset": u64 }]
//   payload:  row-major f32 tensors at 8-byte aligned offsets, zero padded.
//
// Canonical saves sort keys and manifest entries, so equal inputs give equal
// bytes and load -> save reproduces canonical files exactly.

#include <filesystem>
#include <string>
#include <string_view>

#include "iat/arch.hpp"

namespace iat {

struct DescriptorOptions {
  /// Map unrecognized layer_type strings to `opaque` instead of failing.
  bool unknown_as_opaque = false;
  /// Run validate() and throw Error(validation) on any violation.
  bool validate = true;
};

ArchDescriptor load_descriptor(std::string_view json_text, const DescriptorOptions& options = {});
std::string save_descriptor(const ArchDescriptor& descriptor);

WeightStore load_weights(std::string_view bytes);
std::string save_weights(const WeightStore& weights);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

ArchDescriptor load_descriptor_file(const std::filesystem::path& path,
                                    const DescriptorOptions& options = {});
WeightStore load_weights_file(const std::filesystem::path& path);

}  // namespace iat
