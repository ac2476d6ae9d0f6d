#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hinfdae/error.hpp"
#include "hinfdae/robust.hpp"

using namespace hinfdae;
using namespace hinfdae::robust;

namespace {

UncertaintyBudget budget(double g1, double g2, double gs, Region region) { return {g1, g2, gs, region}; }

double bisect_uniform(const UncertaintyBudget& b) {
  double lo = 0.0, hi = b.gamma_star + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (admissible(b, mid, mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST(Robust, ExactRegionExamples) {
  const auto b = budget(0.5, 0.0, 0.9988, Region::Exact);
  EXPECT_TRUE(admissible(b, 0.49, 0.0));
  EXPECT_FALSE(admissible(b, 0.51, 0.0));
  EXPECT_TRUE(admissible(b, 0.0, 0.0));
  EXPECT_THROW(admissible(b, -0.1, 0.0), Error);
}

TEST(Robust, ConservativeRegion) {
  const auto b = budget(0.3, 0.4, 1.0, Region::Conservative);
  EXPECT_TRUE(admissible(b, 0.3, 0.4));
  EXPECT_FALSE(admissible(b, 0.31, 0.4));
}

TEST(Robust, ConservativeImpliesExact) {
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  int conservative_hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const double g1 = g(rng), g2 = g(rng);
    const double gs = std::hypot(g1, g2) + 2.0 * g(rng);
    const double d1 = 1.5 * g(rng), d2 = 1.5 * g(rng);
    if (admissible(budget(g1, g2, gs, Region::Conservative), d1, d2)) {
      ++conservative_hits;
      EXPECT_TRUE(admissible(budget(g1, g2, gs, Region::Exact), d1, d2));
    }
  }
  EXPECT_GT(conservative_hits, 50);
}

TEST(Robust, AdmissibleIsMonotone) {
  std::mt19937 rng(607);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    for (Region region : {Region::Exact, Region::Conservative}) {
      const auto b = budget(g(rng), g(rng), 2.0 * g(rng), region);
      const double d1 = g(rng), d2 = g(rng);
      if (admissible(b, d1, d2)) {
        EXPECT_TRUE(admissible(b, d1 * g(rng), d2));
        EXPECT_TRUE(admissible(b, d1, d2 * g(rng)));
      }
    }
  }
}

TEST(Robust, MaxUniformDeltaClosedForms) {
  EXPECT_NEAR(max_uniform_delta(budget(0, 0, 1, Region::Exact)), 1.0 / std::sqrt(2.0), 1e-12);
  const double gs = 0.9988;
  const double d = max_uniform_delta(budget(0.5, 0, gs, Region::Exact));
  EXPECT_NEAR((0.5 + d) * (0.5 + d) + d * d, gs * gs, 1e-12);
  EXPECT_EQ(max_uniform_delta(budget(0.5, 0.5, 0.5, Region::Exact)), 0.0);
  EXPECT_EQ(max_uniform_delta(budget(0.5, 0.5, 0.5, Region::Conservative)), 0.0);
}

TEST(Robust, MaxUniformDeltaIsTight) {
  std::mt19937 rng(608);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    for (Region region : {Region::Exact, Region::Conservative}) {
      const double g1 = g(rng), g2 = g(rng);
      const auto b = budget(g1, g2, std::hypot(g1, g2) + g(rng), region);
      const double d = max_uniform_delta(b);
      EXPECT_TRUE(admissible(b, d, d));
      EXPECT_FALSE(admissible(b, d + 1e-9, d + 1e-9));
      EXPECT_NEAR(d, bisect_uniform(b), 1e-9);
    }
  }
}

TEST(Robust, BoundaryEndpoints) {
  const auto b = budget(0.5, 0.1, 0.9988, Region::Exact);
  const auto pts = region_boundary(b, 16);
  ASSERT_EQ(pts.size(), 32u);
  EXPECT_NEAR(pts.front().dg1, std::sqrt(0.9988 * 0.9988 - 0.01) - 0.5, 1e-12);
  EXPECT_EQ(pts.front().dg2, 0.0);
  EXPECT_EQ(pts[15].dg1, 0.0);
  EXPECT_NEAR(pts[15].dg2, std::sqrt(0.9988 * 0.9988 - 0.25) - 0.1, 1e-12);
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(pts[i].region, Region::Exact);
    EXPECT_NEAR(std::hypot(0.5 + pts[i].dg1, 0.1 + pts[i].dg2), 0.9988, 1e-12);
  }
  const double rho = 0.9988 - std::hypot(0.5, 0.1);
  for (int i = 16; i < 32; ++i) {
    EXPECT_EQ(pts[i].region, Region::Conservative);
    EXPECT_NEAR(std::hypot(pts[i].dg1, pts[i].dg2), rho, 1e-12);
  }
}

TEST(Robust, BoundaryEdgeCases) {
  EXPECT_TRUE(region_boundary(budget(1, 1, 0.5, Region::Exact), 8).empty());
  const auto two = region_boundary(budget(0.5, 0, 1, Region::Exact), 2);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_NEAR(two[0].dg1, 0.5, 1e-12);
  EXPECT_NEAR(two[1].dg2, std::sqrt(0.75), 1e-12);
  EXPECT_THROW(region_boundary(budget(0.5, 0, 1, Region::Exact), 1), Error);
}

TEST(Robust, BoundaryCsv) {
  std::ostringstream os;
  write_boundary_csv(os, region_boundary(budget(0, 0, 1, Region::Exact), 2));
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("dg1,dg2,region_tag\n", 0), 0u);
  EXPECT_NE(s.find(",exact\n"), std::string::npos);
  EXPECT_NE(s.find(",conservative\n"), std::string::npos);
}
