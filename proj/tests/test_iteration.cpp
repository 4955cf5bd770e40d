// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <functional>

#include "convint/iteration.hpp"

using namespace convint;

namespace {

std::vector<std::string> failing(const std::vector<ConstraintCheck>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs)
    if (!c.ok) out.push_back(c.name);
  return out;
}

}  // namespace

TEST(PaperLedger, CompliantExampleIsAccepted) {
  const auto p = paper_compliant_example();
  const auto cs = check_paper_params(p);
  EXPECT_EQ(cs.size(), 8u);
  EXPECT_TRUE(failing(cs).empty()) << ::testing::PrintToString(failing(cs));
  EXPECT_NO_THROW(require(cs));
  EXPECT_EQ(p.b % 113, 0);
}

TEST(PaperLedger, EachSingleViolationIsNamed) {
  struct Case {
    std::string name;
    std::function<void(IterationParams&)> break_it;
  };
  const std::vector<Case> cases{
      {"gamma = 1/113", [](IterationParams& p) { p.gamma = 1.0 / 112.0; }},
      {"alpha < gamma/54",
       [](IterationParams& p) {
         // Raise alpha past gamma/54 while keeping the beta, b and a constraints intact.
         p.alpha = p.gamma / 53.0;
       }},
      {"alpha*b > 8/fa0", [](IterationParams& p) { p.fa = 0.3; }},
      {"alpha > 48*beta*b^2", [](IterationParams& p) { p.beta = 1.01 * p.alpha / (48.0 * double(p.b) * double(p.b)); }},
      {"b in 113N", [](IterationParams& p) { p.b += 1; }},
      {"a^(b*beta) >= 2+sqrt(2)", [](IterationParams& p) { p.log2_a *= 0.49; }},
  };
  for (const auto& c : cases) {
    auto p = paper_compliant_example();
    c.break_it(p);
    const auto bad = failing(check_paper_params(p));
    ASSERT_FALSE(bad.empty()) << c.name;
    EXPECT_EQ(bad.front(), c.name) << ::testing::PrintToString(bad);
    try {
      require(check_paper_params(p));
      ADD_FAILURE() << "no throw for " << c.name;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find(c.name), std::string::npos) << e.what();
    }
  }
}

TEST(PaperLedger, RedundantConstraintsNeverFailAlone) {
  // alpha*b > 8/fa0 and alpha > 48 beta b^2 give (8/fa0) beta b < alpha^2 b^2 beta / (alpha b) < alpha,
  // and a^(alpha b/2) / a^(b beta) = a^(b (alpha/2 - beta)) with alpha/(2 beta) > 24 b^2, so these
  // two are only ever reported next to another failure. Sweep a grid to confirm.
  for (double fa : {0.0, 0.2, 0.3})
    for (double alpha : {1e-5, 1e-4, 2e-4})
      for (std::int64_t b : {113, 226, 113 * 5281})
        for (double beta : {1e-14, 1e-10, 1e-7})
          for (double log2_a : {1.0, 1e3, 1e9}) {
            IterationParams p = paper_compliant_example();
            p.fa = fa;
            p.alpha = alpha;
            p.b = b;
            p.beta = beta;
            p.log2_a = log2_a;
            const auto bad = failing(check_paper_params(p));
            for (const char* name : {"alpha > (8/fa0)*beta*b", "a^(alpha*b/2) >= 1+1/aleph"})
              if (std::find(bad.begin(), bad.end(), name) != bad.end()) EXPECT_GE(bad.size(), 2u) << name;
          }
}

TEST(PaperLedger, SmallScaleTripsBothScaleConstraints) {
  auto p = paper_compliant_example();
  p.log2_a = 1e-12;
  const auto bad = failing(check_paper_params(p));
  EXPECT_NE(std::find(bad.begin(), bad.end(), "a^(b*beta) >= 2+sqrt(2)"), bad.end());
  EXPECT_NE(std::find(bad.begin(), bad.end(), "a^(alpha*b/2) >= 1+1/aleph"), bad.end());
}

TEST(DeskLedger, DefaultsAreConsistent) {
  IterationParams p;
  EXPECT_TRUE(failing(check_desk_params(p, 3)).empty());
  EXPECT_DOUBLE_EQ(p.lambda(0), 8.0);
  EXPECT_DOUBLE_EQ(p.lambda(3), 64.0);
  EXPECT_DOUBLE_EQ(p.delta(0), 1.0);
  EXPECT_DOUBLE_EQ(p.delta(1), 0.5);
  EXPECT_NEAR(p.delta(2), 0.5 * std::pow(0.5, 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(p.f(0), std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(p.frakC_value(), 2.0);
}

TEST(DeskLedger, RejectsDisorderedFrequencies) {
  IterationParams p;
  p.lambdas = {16, 8};
  EXPECT_THROW(require(check_desk_params(p, 2)), std::invalid_argument);
  p.lambdas = {8, 16};
  p.l = 0.7;
  EXPECT_THROW(require(check_desk_params(p, 2)), std::invalid_argument);
}

TEST(PaperScales, LambdaGrowsDoublyExponentially) {
  const auto p = paper_compliant_example();
  EXPECT_NEAR(p.log2_lambda(1) / p.log2_lambda(0), double(p.b), 1e-6 * p.b);
  EXPECT_GT(p.log2_lambda(0), 0.0);
}
