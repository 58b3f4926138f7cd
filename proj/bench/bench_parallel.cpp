// Serial reference vs OpenMP path for block-pair scoring and weight transfer.
//
//   bench_parallel [layers=300] [repeats=5]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "iat/matching.hpp"
#include "iat/standardize.hpp"
#include "iat/transfer.hpp"
#include "support/fixtures.hpp"

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t layers = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 300;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  std::printf("threads %d, %zu parameterized layers per network, best of %d\n",
              omp_get_max_threads(), layers, repeats);

  const auto target_desc = iat::testing::synthetic_net(layers, 1);
  const auto source_desc = iat::testing::synthetic_net(layers, 2);
  const auto target = iat::standardize(target_desc);
  const auto source = iat::standardize(source_desc);

  const double s1 = best_of(repeats, [&] { iat::score_block_pairs_serial(target, source); });
  const double p1 = best_of(repeats, [&] {
    iat::score_block_pairs(target, source, iat::LayerAligner::penalized_dp, iat::Execution::parallel);
  });
  report("block-pair scoring", s1, p1);

  const double s2 = best_of(repeats, [&] {
    iat::match_networks(target, source, iat::Matcher::dp, 0, iat::Execution::serial);
  });
  const double p2 = best_of(repeats, [&] {
    iat::match_networks(target, source, iat::Matcher::dp, 0, iat::Execution::parallel);
  });
  report("dp matching", s2, p2);

  const auto matching = iat::match_networks(target, source);
  const auto source_weights = iat::testing::random_weights(source_desc, 3);
  const auto target_weights = iat::testing::zero_weights(target_desc);
  const double s3 = best_of(repeats, [&] {
    iat::apply_transfer(matching, source_weights, target_weights, iat::TransferOperator::magnitude,
                        iat::Execution::serial);
  });
  const double p3 = best_of(repeats, [&] {
    iat::apply_transfer(matching, source_weights, target_weights, iat::TransferOperator::magnitude,
                        iat::Execution::parallel);
  });
  report("magnitude transfer", s3, p3);
  return 0;
}
