// iat: command-line front end for standardization, matching, similarity and
// parameter transfer between architectures.
//
// Exit codes: 0 success, 1 internal error, 2 usage or validation error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "iat/error.hpp"
#include "iat/matching.hpp"
#include "iat/model_io.hpp"
#include "iat/similarity.hpp"
#include "iat/standardize.hpp"
#include "iat/transfer.hpp"

using json = nlohmann::json;

namespace {

constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

iat::Matcher matcher_arg(const std::string& text) {
  auto m = iat::parse_matcher(text);
  if (!m) throw UsageError("unknown matcher '" + text + "'");
  return *m;
}

iat::TransferOperator operator_arg(const std::string& text) {
  auto op = iat::parse_transfer_operator(text);
  if (!op) throw UsageError("unknown transfer operator '" + text + "'");
  return *op;
}

void emit(const json& doc, const std::string& path) {
  const auto text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    iat::write_file(path, text);
  }
}

void require_valid(const iat::ArchDescriptor& arch, const iat::WeightStore& weights,
                   const std::string& label) {
  const auto report = iat::validate(arch, &weights);
  if (report.empty()) return;
  std::string message = label + " weights do not match the descriptor:";
  for (const auto& v : report) message += "\n  " + v.path + ": " + v.message;
  throw iat::Error(iat::ErrorCode::validation, message);
}

// Every tensor of the descriptor drawn from U[-b, b] with b = sqrt(6 / fan_in)
// of the layer's weight. Batch-norm layers get the identity transform instead.
iat::WeightStore fan_in_uniform(const iat::ArchDescriptor& arch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  iat::WeightStore store;
  for (const auto* leaf : arch.leaves()) {
    const auto* weight = leaf->param(iat::TensorRole::weight);
    const double fan = weight ? static_cast<double>(iat::fan_in(weight->shape)) : 1.0;
    const float bound = static_cast<float>(std::sqrt(6.0 / fan));
    std::uniform_real_distribution<float> u(-bound, bound);
    for (const auto& spec : leaf->params) {
      iat::Tensor tensor(spec.shape);
      if (leaf->kind == iat::LayerKind::batchnorm2d) {
        const bool ones = spec.role == iat::TensorRole::weight ||
                          spec.role == iat::TensorRole::running_var;
        std::fill(tensor.values.begin(), tensor.values.end(), ones ? 1.0f : 0.0f);
      } else {
        for (auto& v : tensor.values) v = u(rng);
      }
      store.emplace(iat::tensor_key(leaf->path, spec.role), std::move(tensor));
    }
  }
  return store;
}

json report_json(const iat::TransferReport& report) {
  json tensors = json::array();
  for (const auto& t : report.tensors) {
    tensors.push_back({{"target_key", t.target_key},
                       {"source_key", t.source_key},
                       {"copied", t.copied},
                       {"target_numel", t.target_numel},
                       {"fraction", t.fraction}});
  }
  return {{"operator", std::string(iat::to_string(report.op))},
          {"tensors", std::move(tensors)},
          {"warnings", report.warnings},
          {"total_copied", report.total_copied},
          {"total_target_numel", report.total_target_numel}};
}

int run_standardize(const std::string& path, bool as_json) {
  const auto net = iat::standardize(iat::load_descriptor_file(path));
  if (as_json) {
    json blocks = json::array();
    for (std::size_t b = 0; b < net.blocks.size(); ++b) {
      json layers = json::array();
      for (const auto& layer : net.blocks[b].layers) {
        layers.push_back({{"path", layer.path}, {"kind", std::string(iat::to_string(layer.kind))}});
      }
      blocks.push_back({{"index", b}, {"layers", std::move(layers)}});
    }
    emit({{"blocks", std::move(blocks)}}, "");
    return 0;
  }
  for (std::size_t b = 0; b < net.blocks.size(); ++b) {
    const auto& layers = net.blocks[b].layers;
    std::cout << "block " << b << " (" << layers.size() << (layers.size() == 1 ? " layer)\n" : " layers)\n");
    for (const auto& layer : layers) {
      std::cout << "  " << layer.path << "  " << iat::to_string(layer.kind);
      if (const auto* w = layer.param(iat::TensorRole::weight)) std::cout << "  " << iat::format_shape(w->shape);
      std::cout << "\n";
    }
  }
  return 0;
}

int run_similarity(const std::string& a, const std::string& b) {
  const auto sa = iat::standardize(iat::load_descriptor_file(a));
  const auto sb = iat::standardize(iat::load_descriptor_file(b));
  std::printf("%.4f\n", iat::similarity(sa, sb));
  return 0;
}

int run_match(const std::string& target, const std::string& source, const std::string& matcher,
              std::uint64_t seed, const std::string& out) {
  const auto m = matcher_arg(matcher);
  const auto t = iat::standardize(iat::load_descriptor_file(target));
  const auto s = iat::standardize(iat::load_descriptor_file(source));
  const auto matching = iat::match_networks(t, s, m, seed);
  json pairs = json::array();
  for (const auto& p : matching.pairs) {
    pairs.push_back({{"target_path", p.target_path}, {"source_path", p.source_path}, {"score", p.score}});
  }
  emit({{"pairs", std::move(pairs)}, {"network_score", matching.network_score}}, out);
  return 0;
}

struct TransferArgs {
  std::string target_arch;
  std::string source_arch;
  std::string source_weights;
  std::string target_weights;
  std::string init;
  std::uint64_t seed = 0;
  std::string matcher = "dp";
  std::string op = "clip";
  std::string out;
  std::string report;
};

int run_transfer(const TransferArgs& args) {
  const auto m = matcher_arg(args.matcher);
  const auto op = operator_arg(args.op);
  if (args.target_weights.empty() && args.init.empty()) {
    throw UsageError("one of --target-weights or --init is required");
  }

  const auto target_arch = iat::load_descriptor_file(args.target_arch);
  const auto source_arch = iat::load_descriptor_file(args.source_arch);
  const auto source = iat::load_weights_file(args.source_weights);
  require_valid(source_arch, source, "source");
  const auto target = args.target_weights.empty() ? fan_in_uniform(target_arch, args.seed)
                                                  : iat::load_weights_file(args.target_weights);
  require_valid(target_arch, target, "target");

  const auto matching =
      iat::match_networks(iat::standardize(target_arch), iat::standardize(source_arch), m, args.seed);
  const auto [weights, report] = iat::apply_transfer(matching, source, target, op);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

  iat::write_file(args.out, iat::save_weights(weights));
  if (!args.report.empty()) emit(report_json(report), args.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inter-architecture parameter transfer"};
  app.require_subcommand(1);

  std::string arch;
  bool as_json = false;
  auto* standardize = app.add_subcommand("standardize", "Print the block decomposition");
  standardize->add_option("arch", arch, "Architecture descriptor")->required();
  standardize->add_flag("--json", as_json, "Machine-readable output");

  std::string sim_a;
  std::string sim_b;
  auto* similarity = app.add_subcommand("similarity", "Architecture similarity in [0, 1]");
  similarity->add_option("a", sim_a, "First descriptor")->required();
  similarity->add_option("b", sim_b, "Second descriptor")->required();

  std::string match_target;
  std::string match_source;
  std::string matcher = "dp";
  std::uint64_t match_seed = 0;
  std::string match_out;
  auto* match = app.add_subcommand("match", "Match target layers to source layers");
  match->add_option("target", match_target, "Target descriptor")->required();
  match->add_option("source", match_source, "Source descriptor")->required();
  match->add_option("--matcher", matcher, "dp|bipartite|nbipartite|random");
  match->add_option("--seed", match_seed, "Seed for the random matcher");
  match->add_option("--out", match_out, "Write the matching here instead of stdout");

  TransferArgs targs;
  auto* transfer = app.add_subcommand("transfer", "Transfer source weights into a target");
  transfer->add_option("--target-arch", targs.target_arch)->required();
  transfer->add_option("--source-arch", targs.source_arch)->required();
  transfer->add_option("--source-weights", targs.source_weights)->required();
  auto* tw = transfer->add_option("--target-weights", targs.target_weights);
  auto* init = transfer->add_option("--init", targs.init, "Initialize the target: fan-in-uniform")
                   ->check(CLI::IsMember({"fan-in-uniform"}));
  tw->excludes(init);
  transfer->add_option("--seed", targs.seed);
  transfer->add_option("--matcher", targs.matcher, "dp|bipartite|nbipartite|random");
  transfer->add_option("--transfer", targs.op, "clip|full|magnitude|clipnorm");
  transfer->add_option("--out", targs.out)->required();
  transfer->add_option("--report", targs.report, "Write a transfer report (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*standardize) return run_standardize(arch, as_json);
    if (*similarity) return run_similarity(sim_a, sim_b);
    if (*match) return run_match(match_target, match_source, matcher, match_seed, match_out);
    if (*transfer) return run_transfer(targs);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const iat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
