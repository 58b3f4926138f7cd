#include "iat/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "iat/error.hpp"

namespace iat {

std::string_view to_string(TransferOperator op) {
  switch (op) {
    case TransferOperator::clip: return "clip";
    case TransferOperator::full: return "full";
    case TransferOperator::magnitude: return "magnitude";
    case TransferOperator::clipnorm: return "clipnorm";
  }
  return "clip";
}

std::optional<TransferOperator> parse_transfer_operator(std::string_view text) {
  for (auto op : {TransferOperator::clip, TransferOperator::full, TransferOperator::magnitude,
                  TransferOperator::clipnorm}) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

std::int64_t crop_index(std::int64_t j, std::int64_t x, std::int64_t y) {
  if (j < 1 || j > std::min(x, y)) {
    throw Error(ErrorCode::invalid_argument,
                "crop index " + std::to_string(j) + " outside [1, " +
                    std::to_string(std::min(x, y)) + "]");
  }
  // x - y > 0 here, so integer division is the floor.
  return x > y ? j + (x - y) / 2 : j;
}

AxisMap clip_axis(std::int64_t target_size, std::int64_t source_size) {
  const auto k = std::min(target_size, source_size);
  AxisMap axis;
  axis.target.reserve(static_cast<std::size_t>(k));
  axis.source.reserve(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j <= k; ++j) {
    axis.target.push_back(crop_index(j, target_size, source_size) - 1);
    axis.source.push_back(crop_index(j, source_size, target_size) - 1);
  }
  return axis;
}

AxisMap full_axis(std::int64_t target_size, std::int64_t source_size) {
  if (target_size <= source_size) return clip_axis(target_size, source_size);
  AxisMap axis;
  axis.target.resize(static_cast<std::size_t>(target_size));
  axis.source.resize(static_cast<std::size_t>(target_size));
  for (std::int64_t j = 0; j < target_size; ++j) {
    axis.target[static_cast<std::size_t>(j)] = j;
    axis.source[static_cast<std::size_t>(j)] = j % source_size;
  }
  return axis;
}

namespace {

void require_same_rank(const Shape& target, const Shape& source) {
  if (target.size() != source.size()) {
    throw Error(ErrorCode::rank_mismatch, "rank mismatch: target " + format_shape(target) +
                                              " vs source " + format_shape(source));
  }
}

// L1 norm of every slice along `axis`.
std::vector<double> slice_norms(const Tensor& tensor, std::size_t axis) {
  const auto size = tensor.shape[axis];
  const auto strides = tensor.strides();
  const auto stride = strides[axis];
  std::vector<double> norms(static_cast<std::size_t>(size), 0.0);
  for (std::int64_t flat = 0; flat < tensor.numel(); ++flat) {
    const auto index = (flat / stride) % size;
    norms[static_cast<std::size_t>(index)] += std::fabs(tensor.values[static_cast<std::size_t>(flat)]);
  }
  return norms;
}

}  // namespace

IndexMap clip_map(const Shape& target, const Shape& source) {
  require_same_rank(target, source);
  IndexMap map;
  for (std::size_t i = 0; i < target.size(); ++i) map.push_back(clip_axis(target[i], source[i]));
  return map;
}

IndexMap full_map(const Shape& target, const Shape& source) {
  require_same_rank(target, source);
  IndexMap map;
  for (std::size_t i = 0; i < target.size(); ++i) map.push_back(full_axis(target[i], source[i]));
  return map;
}

IndexMap magnitude_map(const Shape& target, const Tensor& source) {
  require_same_rank(target, source.shape);
  IndexMap map;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto t = target[i];
    const auto s = source.shape[i];
    if (s <= t) {
      map.push_back(clip_axis(t, s));
      continue;
    }
    const auto norms = slice_norms(source, i);
    std::vector<std::int64_t> order(static_cast<std::size_t>(s));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
      return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(t));
    std::sort(order.begin(), order.end());

    AxisMap axis;
    axis.source = std::move(order);
    axis.target.resize(static_cast<std::size_t>(t));
    std::iota(axis.target.begin(), axis.target.end(), 0);
    map.push_back(std::move(axis));
  }
  return map;
}

Tensor apply_index_map(const Tensor& target, const Tensor& source, const IndexMap& map,
                       float scale, std::int64_t* copied) {
  require_same_rank(target.shape, source.shape);
  if (map.size() != target.shape.size()) {
    throw Error(ErrorCode::rank_mismatch, "index map rank does not match tensors");
  }
  Tensor out = target;
  std::int64_t count = 1;
  for (const auto& axis : map) count *= static_cast<std::int64_t>(axis.target.size());
  if (copied) *copied = count;
  if (count == 0) return out;

  const auto t_strides = target.strides();
  const auto s_strides = source.strides();
  const std::size_t rank = map.size();
  std::vector<std::size_t> pos(rank, 0);
  for (std::int64_t n = 0; n < count; ++n) {
    std::int64_t t_off = 0;
    std::int64_t s_off = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      t_off += map[a].target[pos[a]] * t_strides[a];
      s_off += map[a].source[pos[a]] * s_strides[a];
    }
    const float value = source.values[static_cast<std::size_t>(s_off)];
    out.values[static_cast<std::size_t>(t_off)] = scale == 1.0f ? value : value * scale;
    for (std::size_t a = rank; a-- > 0;) {
      if (++pos[a] < map[a].target.size()) break;
      pos[a] = 0;
    }
  }
  return out;
}

Tensor clip_transfer(const Tensor& target, const Tensor& source) {
  return apply_index_map(target, source, clip_map(target.shape, source.shape));
}

Tensor full_transfer(const Tensor& target, const Tensor& source) {
  return apply_index_map(target, source, full_map(target.shape, source.shape));
}

Tensor magnitude_transfer(const Tensor& target, const Tensor& source) {
  return apply_index_map(target, source, magnitude_map(target.shape, source));
}

std::int64_t fan_in(const Shape& weight_shape) {
  std::int64_t out = 1;
  for (std::size_t i = 1; i < weight_shape.size(); ++i) out *= weight_shape[i];
  return out;
}

namespace {

float fan_in_scale(std::int64_t fan_in_source, std::int64_t fan_in_target) {
  if (fan_in_source < 1 || fan_in_target < 1) {
    throw Error(ErrorCode::invalid_argument, "fan-in must be >= 1");
  }
  return static_cast<float>(
      std::sqrt(static_cast<double>(fan_in_source) / static_cast<double>(fan_in_target)));
}

}  // namespace

Tensor clipnorm_transfer(const Tensor& target, const Tensor& source, std::int64_t fan_in_source,
                         std::int64_t fan_in_target) {
  const float scale = fan_in_scale(fan_in_source, fan_in_target);
  return apply_index_map(target, source, clip_map(target.shape, source.shape), scale);
}

namespace {

struct TensorWrite {
  std::string key;
  Tensor value;
  TensorTransfer record;
};

struct PairOutcome {
  std::vector<TensorWrite> writes;
  std::vector<std::string> warnings;
};

TensorTransfer make_record(std::string target_key, std::string source_key,
                           std::int64_t copied, std::int64_t numel) {
  TensorTransfer record;
  record.target_key = std::move(target_key);
  record.source_key = std::move(source_key);
  record.copied = copied;
  record.target_numel = numel;
  record.fraction = numel > 0 ? static_cast<double>(copied) / static_cast<double>(numel) : 0.0;
  return record;
}

PairOutcome transfer_pair(const LayerMatch& match, const WeightStore& source,
                          const WeightStore& target, TransferOperator op) {
  PairOutcome outcome;
  const auto t_key = tensor_key(match.target_path, TensorRole::weight);
  const auto s_key = tensor_key(match.source_path, TensorRole::weight);
  const auto t_it = target.find(t_key);
  const auto s_it = source.find(s_key);
  if (t_it == target.end() || s_it == source.end()) {
    outcome.warnings.push_back("skipped " + match.target_path + " <- " + match.source_path +
                      ": missing weight tensor");
    return outcome;
  }
  const Tensor& t_weight = t_it->second;
  const Tensor& s_weight = s_it->second;
  if (t_weight.shape.size() != s_weight.shape.size()) {
    outcome.warnings.push_back("skipped " + match.target_path + " <- " + match.source_path +
                      ": weight rank mismatch " + format_shape(t_weight.shape) + " vs " +
                      format_shape(s_weight.shape));
    return outcome;
  }

  IndexMap map;
  float scale = 1.0f;
  switch (op) {
    case TransferOperator::clip:
      map = clip_map(t_weight.shape, s_weight.shape);
      break;
    case TransferOperator::full:
      map = full_map(t_weight.shape, s_weight.shape);
      break;
    case TransferOperator::magnitude:
      map = magnitude_map(t_weight.shape, s_weight);
      break;
    case TransferOperator::clipnorm:
      map = clip_map(t_weight.shape, s_weight.shape);
      scale = fan_in_scale(fan_in(s_weight.shape), fan_in(t_weight.shape));
      break;
  }

  std::int64_t copied = 0;
  auto weight = apply_index_map(t_weight, s_weight, map, scale, &copied);
  outcome.writes.push_back({t_key, std::move(weight),
                            make_record(t_key, s_key, copied, t_weight.numel())});

  const IndexMap channel_map{map.front()};
  for (auto role : kTensorRoles) {
    if (role == TensorRole::weight) continue;
    const auto ta_key = tensor_key(match.target_path, role);
    const auto sa_key = tensor_key(match.source_path, role);
    const auto ta = target.find(ta_key);
    const auto sa = source.find(sa_key);
    if (ta == target.end() || sa == source.end()) continue;
    if (ta->second.shape != Shape{t_weight.shape[0]} ||
        sa->second.shape != Shape{s_weight.shape[0]}) {
      outcome.warnings.push_back("skipped " + ta_key + ": shape does not follow output channels");
      continue;
    }
    std::int64_t aux_copied = 0;
    auto aux = apply_index_map(ta->second, sa->second, channel_map, 1.0f, &aux_copied);
    outcome.writes.push_back({ta_key, std::move(aux),
                              make_record(ta_key, sa_key, aux_copied, ta->second.numel())});
  }
  return outcome;
}

void merge(PairOutcome&& outcome, WeightStore& out, TransferReport& report) {
  for (auto& warning : outcome.warnings) report.warnings.push_back(std::move(warning));
  for (auto& write : outcome.writes) {
    report.total_copied += write.record.copied;
    report.total_target_numel += write.record.target_numel;
    report.tensors.push_back(std::move(write.record));
    out[write.key] = std::move(write.value);
  }
}

}  // namespace

std::pair<WeightStore, TransferReport> apply_transfer(const NetworkMatching& matching,
                                                      const WeightStore& source_weights,
                                                      const WeightStore& target_weights,
                                                      TransferOperator op, Execution exec) {
  WeightStore out = target_weights;
  TransferReport report;
  report.op = op;

  std::set<std::string> targets;
  for (const auto& match : matching.pairs) targets.insert(match.target_path);
  const bool injective = targets.size() == matching.pairs.size();

  if (exec == Execution::serial || !injective) {
    // Each pair reads the store as left by the previous ones.
    for (const auto& match : matching.pairs) {
      merge(transfer_pair(match, source_weights, out, op), out, report);
    }
    return {std::move(out), std::move(report)};
  }

  const auto n = static_cast<std::int64_t>(matching.pairs.size());
  std::vector<PairOutcome> outcomes(matching.pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < n; ++p) {
    outcomes[static_cast<std::size_t>(p)] =
        transfer_pair(matching.pairs[static_cast<std::size_t>(p)], source_weights,
                      target_weights, op);
  }
  for (auto& outcome : outcomes) merge(std::move(outcome), out, report);
  return {std::move(out), std::move(report)};
}

}  // namespace iat
