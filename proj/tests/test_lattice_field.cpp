#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "ising/error.hpp"
#include "ising/field.hpp"
#include "ising/lattice.hpp"

using namespace ising;

TEST(Box, SingleSite) {
  Region r = make_box({0, 0}, 1);
  EXPECT_EQ(r.sites(), (std::vector<Site>{Site{0, 0}}));
  auto boundary = r.boundary();
  std::set<Site> b(boundary.begin(), boundary.end());
  EXPECT_EQ(b, (std::set<Site>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}));
}

TEST(Box, Counts) {
  Region two = make_box({0, 0}, 2);
  EXPECT_EQ(two.sites().size(), 4u);
  EXPECT_EQ(two.boundary().size(), 8u);
  EXPECT_EQ(make_box({0, 0}, 3).dual_sites().size(), 16u);
  for (int side = 1; side <= 7; ++side) {
    Region r = make_box({2, -1}, side);
    EXPECT_EQ(r.sites().size(), static_cast<std::size_t>(side * side));
    EXPECT_EQ(r.boundary().size(), static_cast<std::size_t>(4 * side));
    EXPECT_EQ(r.dual_sites().size(), static_cast<std::size_t>((side + 1) * (side + 1)));
  }
}

TEST(Box, RejectsEmpty) { EXPECT_THROW(make_box({0, 0}, 0), InvalidRegion); }

TEST(Box, BoundaryInvariants) {
  for (int side = 1; side <= 6; ++side) {
    Region r = make_box({0, 0}, side);
    auto sites = r.sites();
    std::set<Site> inside(sites.begin(), sites.end());
    for (Site b : r.boundary()) {
      EXPECT_FALSE(inside.count(b));
      EXPECT_TRUE(r.on_boundary(b));
      int neighbours_inside = 0;
      for (Site d : kNeighborOffsets) neighbours_inside += inside.count(b + d);
      EXPECT_EQ(neighbours_inside, 1);
    }
    // Diagonal corners are at graph distance 2.
    EXPECT_FALSE(r.on_boundary({r.x_lo() - 1, r.y_lo() - 1}));
  }
}

TEST(Box, NestedAroundCenter) {
  for (int side = 1; side < 12; ++side) {
    Region small = make_box({0, 0}, side);
    Region big = small.resized(side + 1);
    for (Site s : small.sites()) EXPECT_TRUE(big.contains(s));
    EXPECT_TRUE(small.contains({0, 0}));
  }
}

TEST(Box, DualSitesArePlaquetteCorners) {
  Region r = make_box({1, 1}, 3);
  std::set<DualVertex> corners;
  for (Site s : r.sites())
    for (auto v : plaquette_corners(s)) corners.insert(v);
  auto dual_list = r.dual_sites();
  std::set<DualVertex> dual(dual_list.begin(), dual_list.end());
  EXPECT_EQ(corners, dual);
}

TEST(FieldNorms, Table) {
  auto f = FieldSpec::table({{{0, 0}, 0.5}, {{1, 0}, -0.25}});
  auto n = field_norms(f);
  EXPECT_TRUE(n.l1_finite);
  EXPECT_EQ(n.l1, 0.75);
  EXPECT_EQ(n.sup, 0.5);
  EXPECT_EQ(n.inf_outside_every_box, 0.0);
  EXPECT_EQ(f.at({5, 5}), 0.0);
}

TEST(FieldNorms, Uniform) {
  auto n = field_norms(FieldSpec::uniform(0.3));
  EXPECT_FALSE(n.l1_finite);
  EXPECT_TRUE(std::isinf(n.l1));
  EXPECT_EQ(n.inf_outside_every_box, 0.3);
  auto zero = field_norms(FieldSpec::zero());
  EXPECT_TRUE(zero.l1_finite);
  EXPECT_EQ(zero.l1, 0.0);
}

TEST(FieldNorms, ShiftedIsNotSummable) {
  auto n = field_norms(FieldSpec::shifted(0.5, 0.1, 3));
  EXPECT_FALSE(n.l1_finite);
  EXPECT_EQ(n.inf_outside_every_box, 0.5);
  EXPECT_NEAR(n.sup, 0.6, 1e-15);
}

TEST(FieldNorms, PowerLawBelowTwoDiverges) {
  EXPECT_FALSE(field_norms(FieldSpec::power_law(0.02, 2.0)).l1_finite);
  EXPECT_FALSE(field_norms(FieldSpec::power_law(0.02, 1.5)).l1_finite);
}

// Brute-force oracle: direct summation over the radius-10^4 ball plus an
// integral tail bound computed independently of the library.
TEST(FieldNorms, PowerLawAgainstWideSummation) {
  const double A = 0.02;
  const int R = 10000;
  long double ball = 0.0L;
  for (int dx = -R; dx <= R; ++dx) {
    const int rest = R - std::abs(dx);
    for (int dy = -rest; dy <= rest; ++dy) {
      const long double t = 1.0L + std::abs(dx) + std::abs(dy);
      ball += 1.0L / (t * t * t);
    }
  }
  const double brute = static_cast<double>(A * ball);
  // Outside the ball: sum_{r > R} 4 r / (1+r)^3 <= 4 / (1+R).
  const double tail_cap = 4.0 * A / (1.0 + R);

  for (double tol : {1e-6, 1e-9, 1e-12}) {
    auto n = field_norms(FieldSpec::power_law(A, 3.0), tol);
    ASSERT_TRUE(n.l1_finite);
    EXPECT_GE(n.l1, brute);
    EXPECT_LE(n.l1, brute + tail_cap + tol);
    EXPECT_LE(n.l1 - n.l1_lower, tol * (1.0 + 1e-6));
    EXPECT_LE(n.l1_lower, n.l1);
  }
  // Closed form: A (1 + 4 (zeta(2) - zeta(3))).
  const double zeta2 = M_PI * M_PI / 6.0;
  const double zeta3 = 1.2020569031595942854;
  const double exact = A * (1.0 + 4.0 * (zeta2 - zeta3));
  auto n = field_norms(FieldSpec::power_law(A, 3.0), 1e-12);
  EXPECT_GE(n.l1, exact);
  EXPECT_LE(n.l1 - exact, 1e-12);
  EXPECT_LE(exact - n.l1_lower, 1e-12 + 1e-16);
  EXPECT_GE(exact, n.l1_lower);
}

TEST(FieldNorms, PowerLawMonotoneInExponent) {
  const double tol = 1e-10;
  double previous = INFINITY;
  for (double p = 2.5; p <= 6.0; p += 0.25) {
    auto n = field_norms(FieldSpec::power_law(0.1, p), tol);
    EXPECT_LE(n.l1, previous + tol);
    previous = n.l1;
  }
}

TEST(FieldNorms, TableWithTail) {
  auto tail = FieldSpec::power_law(0.02, 3.0);
  auto window = FieldSpec::parse("window:n=3,v=0.2;powerlaw:A=0.02,p=3");
  auto nt = field_norms(tail);
  auto nw = field_norms(window);
  double covered = 0.0;
  for (Site s : make_box({0, 0}, 3).sites()) covered += tail.at(s);
  EXPECT_NEAR(nw.l1, nt.l1 - covered + 9 * 0.2, 1e-14);
  EXPECT_EQ(window.at({0, 0}), 0.2);
  EXPECT_EQ(window.at({2, 0}), tail.at({2, 0}));
  EXPECT_NEAR(nw.sup, 0.2, 1e-15);

  auto zeroed = window.with_zeroed(make_box({0, 0}, 3));
  auto nz = field_norms(zeroed);
  EXPECT_NEAR(nz.l1, nt.l1 - covered, 1e-14);
  EXPECT_EQ(zeroed.at({1, 1}), 0.0);
  EXPECT_EQ(zeroed.at({3, 0}), tail.at({3, 0}));
  // Largest uncovered value sits at graph distance 2 (e.g. (2, 0)).
  EXPECT_NEAR(nz.sup, tail.at({2, 0}), 1e-15);
}

TEST(FieldSpecParse, Families) {
  EXPECT_EQ(FieldSpec::parse("uniform:h=0.3").at({7, -2}), 0.3);
  auto p = FieldSpec::parse("powerlaw:A=0.02,p=3");
  EXPECT_DOUBLE_EQ(p.at({0, 0}), 0.02);
  EXPECT_DOUBLE_EQ(p.at({1, 0}), 0.02 / 8.0);
  EXPECT_DOUBLE_EQ(p.at({1, -1}), 0.02 / 27.0);
  auto neg = FieldSpec::parse("powerlaw:A=0.02,p=3,sign=-1");
  EXPECT_DOUBLE_EQ(neg.at({0, 0}), -0.02);
  auto s = FieldSpec::parse("shifted:c=0.5,A=0.1,p=3");
  EXPECT_DOUBLE_EQ(s.at({0, 0}), 0.6);
  EXPECT_DOUBLE_EQ(s.at({0, 1}), 0.5 + 0.1 / 8.0);
}

TEST(FieldSpecParse, TableFile) {
  const std::string path = ::testing::TempDir() + "field_table.json";
  {
    std::ofstream out(path);
    out << R"({"0,0": 0.5, "1,0": -0.25})";
  }
  auto f = FieldSpec::parse("table:@" + path);
  EXPECT_EQ(f.at({0, 0}), 0.5);
  EXPECT_EQ(f.at({1, 0}), -0.25);
  EXPECT_EQ(f.at({0, 1}), 0.0);
  {
    std::ofstream out(path);
    out << R"({"values": {"0,0": 0.2}, "tail": "powerlaw:A=0.02,p=3"})";
  }
  auto g = FieldSpec::parse("table:@" + path);
  EXPECT_EQ(g.at({0, 0}), 0.2);
  EXPECT_DOUBLE_EQ(g.at({1, 0}), 0.02 / 8.0);
  std::remove(path.c_str());
}

TEST(FieldSpecParse, Errors) {
  EXPECT_THROW(FieldSpec::parse("uniform"), ParseError);
  EXPECT_THROW(FieldSpec::parse("uniform:x=1"), ParseError);
  EXPECT_THROW(FieldSpec::parse("powerlaw:A=0.02"), ParseError);
  EXPECT_THROW(FieldSpec::parse("gaussian:s=1"), ParseError);
  EXPECT_THROW(FieldSpec::parse("uniform:h=abc"), ParseError);
  EXPECT_THROW(FieldSpec::parse("table:@/nonexistent/file.json"), ParseError);
  EXPECT_THROW(FieldSpec::parse("uniform:h=1;powerlaw:A=1,p=3"), ParseError);
}

TEST(ModelParams, RejectsAntiferromagnet) {
  EXPECT_THROW(ModelParams(0.0, 1.0, FieldSpec::zero()), DomainError);
  EXPECT_THROW(ModelParams(-1.0, 1.0, FieldSpec::zero()), DomainError);
  EXPECT_THROW(ModelParams(1.0, -0.1, FieldSpec::zero()), DomainError);
}
