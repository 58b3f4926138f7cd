#pragma once

#include "iat/arch.hpp"
#include "iat/matching.hpp"

namespace iat {

/// score(a <- b) / score(a <- a), with `a` as the target. Throws
/// Error(undefined_self_score) when `a` has no parameterized layers.
double directional_similarity(const StandardizedNetwork& a, const StandardizedNetwork& b,
                              Execution exec = Execution::parallel);

/// Geometric mean of both directional similarities; symmetric bit for bit.
double similarity(const StandardizedNetwork& s, const StandardizedNetwork& t,
                  Execution exec = Execution::parallel);

}  // namespace iat
