#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace cohom;

namespace {

std::string path(const char* name) { return std::string(COHOM_SCENARIO_DIR) + "/" + name; }

const char* kMinimal = R"(
name: mini
seed: 1
group: {kind: free, rank: 1}
measure: lazy_uniform
representation:
  p: 2
  dim: 2
  family: orthogonal
  generators:
    - [[0, -1], [1, 0]]
)";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST(Scenario, LoadsEveryShippedAnchor) {
  for (const char* name : {"anchor_a.yaml", "anchor_b.yaml", "s3_standard.yaml", "s3_signed_perm_p3.yaml",
                           "free2_weighted.yaml", "trivial.yaml"}) {
    EXPECT_NO_THROW(load_scenario(path(name))) << name;
  }
}

TEST(Scenario, AnchorBContents) {
  const Scenario sc = load_scenario(path("anchor_b.yaml"));
  EXPECT_EQ(sc.name, "anchor_b");
  EXPECT_EQ(sc.seed, 7u);
  EXPECT_TRUE(sc.group->is_free());
  EXPECT_EQ(sc.group->rank(), 2u);
  EXPECT_EQ(sc.exact_measure->support_size(), 5u);
  ASSERT_TRUE(sc.pair.has_value());
  EXPECT_EQ(sc.rep->dim(), 2u);
  EXPECT_TRUE(sc.rep->generator(1).isApprox(fixtures::rot120(), 1e-15));
  ASSERT_TRUE(sc.exact_generators.has_value());
  EXPECT_EQ(sc.cocycles.size(), 2u);
  EXPECT_EQ(sc.hash.size(), 16u);
}

TEST(Scenario, InfinityExponentAndExplicitWeights) {
  const Scenario sc = load_scenario(path("free2_weighted.yaml"));
  EXPECT_TRUE(sc.rep->space().is_inf());
  EXPECT_EQ((*sc.exact_measure)(sc.group->identity()), Rational(1, 3));
}

TEST(Scenario, HashTracksContent) {
  const Scenario a = parse_scenario(kMinimal);
  const Scenario b = parse_scenario(kMinimal);
  const Scenario c = parse_scenario(with(kMinimal, "seed: 1", "seed: 2"));
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
}

TEST(Scenario, ValidationErrors) {
  const std::string m = kMinimal;
  EXPECT_THROW(parse_scenario("name: [unclosed"), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "dim: 2", "dim: 3")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "[[0, -1], [1, 0]]", "[[1, 1], [0, 1]]")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "[[0, -1], [1, 0]]", "[[1, 2], [2, 4]]")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "kind: free", "kind: lattice")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "p: 2", "p: 0.5")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "lazy_uniform", "{weights: [[e, 1/2], [c, 1/2]]}")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "lazy_uniform", "{weights: [[e, 1/2]]}")), ValidationError);
  EXPECT_THROW(parse_scenario(with(m, "lazy_uniform", "from_pair")), ValidationError);
  EXPECT_THROW(load_scenario(path("corrupted.yaml")), ValidationError);
  EXPECT_THROW(load_scenario(path("no_such_file.yaml")), ValidationError);
}

TEST(Scenario, CocyclesMustSatisfyRelations) {
  const std::string perm = R"(
name: z2
seed: 1
group: {kind: perm, degree: 2, labels: [s], generators: [[1, 0]]}
measure: lazy_uniform
representation: {p: 2, dim: 1, family: orthogonal, generators: [[[-1]]]}
cocycles:
  - {name: ok, values: [[2]]}
)";
  EXPECT_NO_THROW(parse_scenario(perm));
  // z_{s^2} = z_s + pi_s z_s = 0 for any z_s when pi_s = -1, so break it with pi_s = 1.
  const std::string bad = with(with(perm, "[[[-1]]]", "[[[1]]]"), "values: [[2]]", "values: [[2]]");
  EXPECT_THROW(parse_scenario(bad), ValidationError);
}

TEST(Scenario, CocycleShapeIsChecked) {
  const std::string m = std::string(kMinimal) + "cocycles:\n  - {name: z, values: [[1, 2, 3]]}\n";
  EXPECT_THROW(parse_scenario(m), ValidationError);
}
