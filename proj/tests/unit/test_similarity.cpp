#include "doctest.h"

#include <random>

#include "iat/error.hpp"
#include "iat/similarity.hpp"
#include "iat/standardize.hpp"
#include "support/fixtures.hpp"

using namespace iat;

TEST_CASE("every fixture is fully similar to itself") {
  for (const auto& fixture : testing::named_fixtures()) {
    CAPTURE(fixture.name());
    const auto net = standardize(fixture);
    CHECK(network_score(net, net) == static_cast<double>(net.parameterized_layer_count()));
    CHECK(similarity(net, net) == 1.0);
  }
}

TEST_CASE("similarity is bounded and symmetric bit for bit") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = standardize(testing::random_net(rng, "a"));
    const auto b = standardize(testing::random_net(rng, "b"));
    const double ab = similarity(a, b);
    const double ba = similarity(b, a);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab == ba);
  }
}

TEST_CASE("related architectures score higher than unrelated ones") {
  const auto b0 = standardize(testing::efficientnet_b0_like());
  const auto b2 = standardize(testing::efficientnet_b2_like());
  const auto convs = standardize(testing::conv_only_net());
  const auto linears = standardize(testing::linear_only_net());
  const double family = similarity(b0, b2);
  CHECK(family > 0.0);
  CHECK(family < 1.0);
  CHECK(similarity(convs, linears) == 0.0);
  CHECK(family > similarity(b0, linears));
}

TEST_CASE("directional similarity uses the computed self-score") {
  const auto b0 = standardize(testing::efficientnet_b0_like());
  const auto b2 = standardize(testing::efficientnet_b2_like());
  const double forward = directional_similarity(b0, b2);
  CHECK(forward == network_score(b0, b2) / network_score(b0, b0));
  CHECK(forward >= 0.0);
}

TEST_CASE("a network without parameterized layers has no self-score") {
  using namespace build;
  const auto idle = standardize(ArchDescriptor("idle", root({activation("a"), pool("p")})));
  const auto net = standardize(testing::flat_net(4));
  try {
    directional_similarity(idle, net);
    FAIL("expected undefined_self_score");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_self_score);
  }
  CHECK_THROWS_AS(similarity(net, idle), Error);
}
