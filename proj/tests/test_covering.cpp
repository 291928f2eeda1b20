#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "advcongest/covering.hpp"
#include "advcongest/graph.hpp"
#include "advcongest/rng.hpp"
#include "oracles.hpp"

using namespace advcongest;

namespace {

Graph petersen() {
  return Graph(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
                    {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}});
}

}  // namespace

TEST(HashFamily, ShapeArithmetic) {
  auto [h, q] = hash_family_shape(32, 28);
  EXPECT_EQ(h, 4u * 28u * 5u);
  EXPECT_EQ(q, 2u * 28u);
  Graph g = make_circulant(16, {1, 2});
  ASSERT_EQ(g.m(), 32u);
  auto fam = build_hash_family(g, 28, 1);
  EXPECT_EQ(fam.ell(), h * q);
  EXPECT_EQ(fam.hash_count(), h);
  EXPECT_EQ(fam.hash_range(), q);
}

TEST(HashFamily, MembershipIsHashMiss) {
  Graph g = make_hypercube(4);
  auto fam = build_hash_family(g, 8, 3);
  const auto q = fam.hash_range();
  for (EdgeId e = 0; e < g.m(); ++e)
    for (std::size_t i = 0; i < fam.ell(); i += 7) {
      const auto h = i / q, slot = i % q;
      EXPECT_EQ(fam.contains(e, i), fam.hash_value(h, e) != slot);
    }
}

TEST(HashFamily, WidthEqualsHashCount) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Graph g = make_circulant(12 + seed, {1, 2});
    auto fam = build_hash_family(g, 7 * diameter(g), seed, {0.25, 0.5});
    EXPECT_EQ(width(fam, g), fam.hash_count());
    for (EdgeId e = 0; e < g.m(); ++e) EXPECT_EQ(fam.absent_indices(e).size(), fam.hash_count());
  }
}

TEST(HashFamily, CoversK4AtLengthOne) {
  Graph g = make_complete(4);
  auto fam = build_hash_family(g, 1, 9);
  EXPECT_TRUE(verify_strict(fam, g, 1, 1).ok);
  EXPECT_TRUE(oracle::cover_strict(fam, g, 1, 1));
}

TEST(HashFamily, CoversC6) {
  Graph g = make_cycle(6);
  auto fam = build_hash_family(g, 6, 1);
  EXPECT_TRUE(verify_strict(fam, g, 6, 1).ok);
  auto fam21 = build_hash_family(g, 21, 1);
  EXPECT_TRUE(verify_strict(fam21, g, 21, 1).ok);
}

TEST(HashFamily, StrictCheckAgreesWithPathEnumeration) {
  // Small constants give families that sometimes fail, so both verdicts occur.
  int fails = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = seed % 2 ? petersen() : make_circulant(8, {1, 2});
    auto fam = build_hash_family(g, 4, seed, {0.15, 0.5});
    const bool ours = verify_strict(fam, g, 4, 1).ok;
    EXPECT_EQ(ours, oracle::cover_strict(fam, g, 4, 1)) << "seed " << seed;
    fails += !ours;
  }
  EXPECT_GT(fails, 0);
}

TEST(TrivialFamily, Cases) {
  Graph g = make_cycle(5);
  auto fam = trivial_family(g);
  EXPECT_EQ(fam.ell(), 1u);
  EXPECT_EQ(width(fam, g), 0u);
  EXPECT_TRUE(verify_strict(fam, g, 4, 0).ok);
  auto bad = verify_strict(fam, g, 4, 1);
  EXPECT_FALSE(bad.ok);
  ASSERT_TRUE(bad.counterexample.has_value());
  EXPECT_EQ(bad.counterexample->faults.size(), 1u);
  EXPECT_FALSE(bad.counterexample->path.empty());
  EXPECT_TRUE(verify_relaxed(fam, g, diameter(g), 0).ok);
}

TEST(VerifyStrict, Guards) {
  Graph g = make_cycle(11);
  EXPECT_THROW(verify_strict(trivial_family(g), g, 5, 1), std::invalid_argument);
  Graph h = make_cycle(6);
  EXPECT_THROW(verify_strict(trivial_family(h), h, 5, 3), std::invalid_argument);
}

TEST(SampledFamily, DegenerateK0) {
  Graph g = make_cycle(8);
  auto fam = build_sampled_family(g, 8, 0, 1);
  EXPECT_EQ(fam.ell(), 1u);
  for (EdgeId e = 0; e < g.m(); ++e) EXPECT_TRUE(fam.contains(e, 0));
}

TEST(SampledFamily, CoversC8) {
  Graph g = make_cycle(8);
  auto fam = build_sampled_family(g, 8, 1, 4);
  EXPECT_TRUE(verify_strict(fam, g, 8, 1).ok);
}

TEST(SampledFamily, InclusionProbability) {
  Graph g = make_circulant(64, {1, 2, 3});
  auto fam = build_sampled_family(g, 12, 2, 5);
  const double p = 1.0 - 2.0 / 14.0;
  EXPECT_DOUBLE_EQ(fam.keep_probability(), p);
  std::uint64_t kept = 0, total = 0;
  const std::size_t rows = std::min<std::size_t>(fam.ell(), 400);
  for (std::size_t i = 0; i < rows; ++i)
    for (EdgeId e = 0; e < g.m(); ++e) {
      kept += fam.contains(e, i);
      ++total;
    }
  const double sd = std::sqrt(p * (1 - p) / total);
  EXPECT_NEAR(static_cast<double>(kept) / total, p, 5 * sd);
}

TEST(SampledFamily, AbsenceConcentrates) {
  Graph g = make_circulant(20, {1, 2});
  auto fam = build_sampled_family(g, 6, 1, 8);
  const double mean = fam.ell() * (1.0 / 7.0);
  for (EdgeId e = 0; e < g.m(); ++e) {
    const double a = static_cast<double>(fam.absent_indices(e).size());
    EXPECT_NEAR(a, mean, 5 * std::sqrt(mean));
  }
}

TEST(SampledFamily, CapIsEnforced) {
  Graph g = make_cycle(8);
  SampledFamilyParams p;
  p.cap = 10;
  EXPECT_THROW(build_sampled_family(g, 8, 2, 1, p), std::invalid_argument);
}

TEST(SampledFamily, RelaxedK2OnSmallFixture) {
  Graph g = make_circulant(12, {1, 2, 3});
  int pass = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    pass += verify_relaxed(build_sampled_family(g, 3 * diameter(g), 2, seed), g, 3 * diameter(g), 2).ok;
  EXPECT_GE(pass, 4);
}

TEST(ExpanderFamily, SizeAndKeepProbability) {
  Graph g = make_random_regular(64, 8, 2);
  auto fam = build_expander_family(g, 2, 7, false);
  EXPECT_EQ(fam.ell(), static_cast<std::size_t>(std::ceil(6.0 * 2 * std::log(64.0))));
  EXPECT_DOUBLE_EQ(fam.keep_probability(), 0.25);
}

TEST(ExpanderFamily, DirectedSymmetryIsPSquared) {
  Graph g = make_random_regular(128, 12, 4);
  auto fam = build_expander_family(g, 1, 3, true);
  const double p = fam.keep_probability();
  std::uint64_t both = 0, total = 0;
  for (std::size_t i = 0; i < fam.ell(); ++i)
    for (EdgeId e = 0; e < g.m(); ++e) {
      both += fam.contains_dir(2 * e, i) && fam.contains_dir(2 * e + 1, i);
      ++total;
    }
  const double sd = std::sqrt(p * p * (1 - p * p) / total);
  EXPECT_NEAR(static_cast<double>(both) / total, p * p, 5 * sd);
}

TEST(ExpanderFamily, AvoidanceProbability) {
  Graph g = make_random_regular(64, 8, 9);
  const std::uint32_t t = 1;
  std::vector<EdgeId> fault{3, 40};
  std::uint64_t avoid = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto fam = build_expander_family(g, t, seed, true);
    for (std::size_t i = 0; i < fam.ell(); ++i) {
      bool clean = true;
      for (auto e : fault) clean = clean && !fam.contains_dir(2 * e, i) && !fam.contains_dir(2 * e + 1, i);
      avoid += clean;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(avoid) / total, std::exp(-5.0));
}

TEST(ExpanderFamily, RelaxedCoverOn12Regular) {
  Graph g = make_random_regular(64, 12, 1);
  const double phi = conductance_estimate(g).lower;
  const auto L = static_cast<std::uint32_t>(std::ceil(std::log2(64.0) / phi));
  int pass = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) pass += verify_relaxed(build_expander_family(g, 1, seed, false, {}, L), g, L, 1).ok;
  EXPECT_GE(pass, 4);
}

TEST(LocalKnowledge, EndpointsAgree) {
  Graph g = make_random_regular(64, 6, 5);
  std::vector<CoveringFamily> fams{build_hash_family(g, 20, 1), build_sampled_family(g, 6, 1, 2),
                                   build_expander_family(g, 2, 3, false), build_expander_family(g, 2, 3, true)};
  Rng rng(99);
  for (const auto& fam : fams)
    for (int probe = 0; probe < 250000; ++probe) {
      const auto e = static_cast<EdgeId>(rng.below(g.m()));
      const auto i = rng.below(fam.ell());
      ASSERT_EQ(fam.evaluate_at(g.edge(e).u, e, i), fam.evaluate_at(g.edge(e).v, e, i));
    }
}

TEST(Determinism, SameSeedSameMembership) {
  Graph g = make_circulant(30, {1, 2});
  auto a = build_hash_family(g, 14, 42);
  auto b = build_hash_family(g, 14, 42);
  auto c = build_hash_family(g, 14, 43);
  int differ = 0;
  for (EdgeId e = 0; e < g.m(); ++e)
    for (std::size_t i = 0; i < a.ell(); ++i) {
      ASSERT_EQ(a.contains(e, i), b.contains(e, i));
      differ += a.contains(e, i) != c.contains(e, i);
    }
  EXPECT_GT(differ, 0);
}

TEST(Descriptor, RoundTrip) {
  Graph g = make_hypercube(4);
  for (const auto& fam : {build_hash_family(g, 8, 1), build_sampled_family(g, 5, 1, 2),
                          build_expander_family(g, 1, 3, true)}) {
    auto back = family_from_descriptor(fam.descriptor(), g);
    EXPECT_EQ(back, fam);
    for (EdgeId e = 0; e < g.m(); ++e)
      for (std::size_t i = 0; i < fam.ell(); i += 3) ASSERT_EQ(back.contains_dir(2 * e, i), fam.contains_dir(2 * e, i));
  }
}

TEST(Flavor, Names) {
  for (auto f : {Flavor::hash, Flavor::sampled, Flavor::expander_undirected, Flavor::expander_directed})
    EXPECT_EQ(flavor_from_string(to_string(f)), f);
  EXPECT_THROW(flavor_from_string("bogus"), std::invalid_argument);
}
