#pragma once

// Moving parameters between tensors of different shapes.
//
// Every operator reduces to a per-axis index map: for axis i, a list of target
// indices and the source index each one receives. Copying walks the cartesian
// product of the axis maps. Bias and batch-norm statistics reuse the axis-0
// map chosen for the layer's weight.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iat/arch.hpp"
#include "iat/matching.hpp"

namespace iat {

enum class TransferOperator { clip, full, magnitude, clipnorm };

std::string_view to_string(TransferOperator op);
std::optional<TransferOperator> parse_transfer_operator(std::string_view text);

/// Center-crop offset map with 1-based indices:
/// g(j, x, y) = j + floor((x - y) / 2) if x > y, else j.
/// Requires 1 <= j <= min(x, y).
std::int64_t crop_index(std::int64_t j, std::int64_t x, std::int64_t y);

struct AxisMap {
  std::vector<std::int64_t> target;  // 0-based
  std::vector<std::int64_t> source;  // 0-based, same length as target
};

using IndexMap = std::vector<AxisMap>;

AxisMap clip_axis(std::int64_t target_size, std::int64_t source_size);
/// Clip where the source is at least as large; modulo tiling otherwise.
AxisMap full_axis(std::int64_t target_size, std::int64_t source_size);

IndexMap clip_map(const Shape& target, const Shape& source);
IndexMap full_map(const Shape& target, const Shape& source);
/// Along axes where the source is larger, keeps the `target` slices with the
/// largest L1 norm (ties to the lower index) in original order; other axes
/// behave like clip.
IndexMap magnitude_map(const Shape& target, const Tensor& source);

/// Copies source[map] into a copy of target, multiplying copied values by
/// `scale`. Returns the number of elements written through `copied`.
Tensor apply_index_map(const Tensor& target, const Tensor& source, const IndexMap& map,
                       float scale = 1.0f, std::int64_t* copied = nullptr);

Tensor clip_transfer(const Tensor& target, const Tensor& source);
Tensor full_transfer(const Tensor& target, const Tensor& source);
Tensor magnitude_transfer(const Tensor& target, const Tensor& source);
/// clip_transfer with copied values scaled by sqrt(fan_in_source / fan_in_target).
Tensor clipnorm_transfer(const Tensor& target, const Tensor& source,
                         std::int64_t fan_in_source, std::int64_t fan_in_target);

/// Product of all non-output dims of a weight shape (1 for 1-D shapes).
std::int64_t fan_in(const Shape& weight_shape);

struct TensorTransfer {
  std::string target_key;
  std::string source_key;
  std::int64_t copied = 0;
  std::int64_t target_numel = 0;
  double fraction = 0.0;  // copied / target_numel

  bool operator==(const TensorTransfer&) const = default;
};

struct TransferReport {
  TransferOperator op = TransferOperator::clip;
  std::vector<TensorTransfer> tensors;
  std::vector<std::string> warnings;
  std::int64_t total_copied = 0;
  std::int64_t total_target_numel = 0;  // over tensors that were written

  bool operator==(const TransferReport&) const = default;
};

/// Transfers the weight of every matched layer with `op` and the remaining
/// roles present on both sides through the weight's axis-0 map. Unmatched
/// target tensors are returned unchanged. Pairs whose weights are missing or
/// differ in rank are skipped with a warning.
std::pair<WeightStore, TransferReport> apply_transfer(const NetworkMatching& matching,
                                                      const WeightStore& source_weights,
                                                      const WeightStore& target_weights,
                                                      TransferOperator op,
                                                      Execution exec = Execution::parallel);

}  // namespace iat
