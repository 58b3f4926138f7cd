#include "iat/similarity.hpp"

#include <cmath>

#include "iat/error.hpp"

namespace iat {

double directional_similarity(const StandardizedNetwork& a, const StandardizedNetwork& b,
                              Execution exec) {
  if (a.parameterized_layer_count() == 0) {
    throw Error(ErrorCode::undefined_self_score, "undefined self-score");
  }
  if (b.blocks.empty()) return 0.0;
  // The self-score is computed, not assumed; it equals the parameterized
  // layer count of `a`.
  const double self = network_score(a, a, exec);
  return network_score(a, b, exec) / self;
}

double similarity(const StandardizedNetwork& s, const StandardizedNetwork& t, Execution exec) {
  const double st = directional_similarity(s, t, exec);
  const double ts = directional_similarity(t, s, exec);
  // Multiplication commutes exactly in IEEE arithmetic.
  return std::sqrt(st * ts);
}

}  // namespace iat
