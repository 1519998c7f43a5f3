#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ising/error.hpp"
#include "ising/gibbs.hpp"
#include "oracle.hpp"

using namespace ising;

namespace {

const auto kPlus = BoundaryCondition::plus();
const auto kMinus = BoundaryCondition::minus();

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Energy, AllAlignedTwoByTwo) {
  Region box = make_box({0, 0}, 2);
  ModelParams p(1.0, 1.0, FieldSpec::zero());
  EXPECT_EQ(energy(SpinConfiguration(box, kPlus, 1), p), -12.0);
  EXPECT_EQ(energy(SpinConfiguration(box, kPlus, -1), p), 4.0);
}

TEST(Energy, SingleSite) {
  Region box = make_box({0, 0}, 1);
  ModelParams p(1.0, 1.0, FieldSpec::table({{{0, 0}, 0.5}}));
  EXPECT_EQ(energy(SpinConfiguration(box, kPlus, 1), p), -4.5);
}

TEST(EnergyNormalizedMinus, Examples) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.3, 1.0, FieldSpec::zero());
  EXPECT_EQ(energy_normalized_minus(SpinConfiguration(box, kMinus, -1), p), 0.0);
  SpinConfiguration one(box, kMinus, -1);
  one.set({1, 0}, 1);
  EXPECT_DOUBLE_EQ(energy_normalized_minus(one, p), 8.0 * 1.3);
  ModelParams q(1.3, 1.0, FieldSpec::table({{{1, 0}, 0.4}, {{0, 0}, -0.7}}));
  EXPECT_DOUBLE_EQ(energy_normalized_minus(one, q), 8.0 * 1.3 - 2.0 * 0.4);
  EXPECT_THROW(energy_normalized_minus(SpinConfiguration(box, kPlus, -1), p), ContractViolation);
}

TEST(EnergyNormalizedMinus, SameMeasure) {
  Region box = make_box({0, 0}, 3);
  std::mt19937_64 rng(7);
  ModelParams p(1.0, 0.7, oracle::random_table(box, rng, -0.5, 0.5));
  const double shift = energy(SpinConfiguration(box, kMinus, -1), p);
  const double log_z = oracle::log_partition(box, kMinus, p);
  const double log_z_norm = log_partition_normalized_minus(box, p, Method::brute);
  for (std::uint64_t c = 0; c < 512; ++c) {
    auto cfg = SpinConfiguration::from_bits(box, kMinus, c);
    EXPECT_NEAR(energy_normalized_minus(cfg, p), energy(cfg, p) - shift, 1e-12);
    const double a = std::exp(-p.beta * energy(cfg, p) - log_z);
    const double b = std::exp(-p.beta * energy_normalized_minus(cfg, p) - log_z_norm);
    EXPECT_NEAR(a, b, 1e-14);
  }
}

TEST(LogPartition, InfiniteTemperature) {
  for (int side = 1; side <= 4; ++side) {
    Region box = make_box({0, 0}, side);
    ModelParams p(1.0, 0.0, FieldSpec::uniform(0.7));
    const double expected = box.size() * std::log(2.0);
    EXPECT_NEAR(log_partition_brute(box, kPlus, p), expected, 1e-12);
    EXPECT_NEAR(log_partition_transfer(box, kMinus, p), expected, 1e-12);
  }
}

TEST(LogPartition, SingleSiteClosedForm) {
  Region box = make_box({0, 0}, 1);
  for (double beta : {0.1, 0.5, 2.0, 10.0}) {
    ModelParams p(1.0, beta, FieldSpec::zero());
    const double expected = std::log(std::exp(4 * beta) + std::exp(-4 * beta));
    EXPECT_NEAR(log_partition_brute(box, kPlus, p), expected, 1e-12 * expected);
    EXPECT_NEAR(log_partition_transfer(box, kPlus, p), expected, 1e-12 * expected);
  }
}

TEST(LogPartition, BruteMatchesOracle) {
  std::mt19937_64 rng(11);
  for (int side = 1; side <= 3; ++side) {
    Region box = make_box({1, -1}, side);
    ModelParams p(0.8, 0.9, oracle::random_table(box, rng, -1.0, 1.0));
    auto bc = oracle::random_boundary(box, rng);
    EXPECT_LT(rel_err(log_partition_brute(box, bc, p), static_cast<double>(oracle::log_partition(box, bc, p))),
              1e-13);
  }
}

TEST(LogPartition, PowerLawThreeByThreeTransferAgreement) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 0.5, FieldSpec::power_law(0.02, 3));
  EXPECT_LT(rel_err(log_partition_brute(box, kMinus, p), log_partition_transfer(box, kMinus, p)), 1e-12);
}

TEST(LogPartition, TransferMatchesBruteRandomFields) {
  std::mt19937_64 rng(2024);
  for (int side = 2; side <= 4; ++side) {
    for (int rep = 0; rep < 5; ++rep) {
      Region box = make_box({0, 0}, side);
      std::uniform_real_distribution<double> beta(0.0, 2.0);
      ModelParams p(1.0, beta(rng), oracle::random_table(box, rng, -0.5, 0.5));
      for (const auto& bc : {kPlus, kMinus, oracle::random_boundary(box, rng)}) {
        EXPECT_LT(rel_err(log_partition_transfer(box, bc, p), log_partition_brute(box, bc, p)), 1e-12);
      }
    }
  }
}

TEST(LogPartition, FlipSymmetryWithoutField) {
  for (int side : {2, 5, 8}) {
    Region box = make_box({0, 0}, side);
    ModelParams p(1.0, 0.8, FieldSpec::zero());
    EXPECT_NEAR(log_partition_transfer(box, kPlus, p), log_partition_transfer(box, kMinus, p), 1e-10);
  }
}

TEST(LogPartition, LargeBetaStaysFinite) {
  Region box = make_box({0, 0}, 6);
  ModelParams p(1.0, 50.0, FieldSpec::uniform(0.3));
  const double lz = log_partition_transfer(box, kMinus, p);
  EXPECT_TRUE(std::isfinite(lz));
  Region small = make_box({0, 0}, 4);
  EXPECT_LT(rel_err(log_partition_transfer(small, kMinus, p), log_partition_brute(small, kMinus, p)), 1e-12);
}

TEST(LogPartition, CapacityErrors) {
  ModelParams p(1.0, 0.5, FieldSpec::zero());
  EXPECT_THROW(log_partition_brute(make_box({0, 0}, 6), kPlus, p), CapacityError);
  EXPECT_THROW(log_partition_transfer(make_box({0, 0}, 21), kPlus, p), CapacityError);
  ExactLimits tight{4, 3};
  EXPECT_THROW(log_partition_brute(make_box({0, 0}, 3), kPlus, p, tight), CapacityError);
  EXPECT_THROW(log_partition_transfer(make_box({0, 0}, 4), kPlus, p, tight), CapacityError);
  try {
    log_partition_brute(make_box({0, 0}, 6), kPlus, p);
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("transfer"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("sampler"), std::string::npos);
  }
}

TEST(BoundaryConditionTable, Validation) {
  Region box = make_box({0, 0}, 2);
  std::map<Site, int> partial{{{0, -1}, 1}};
  ModelParams p(1.0, 0.5, FieldSpec::zero());
  EXPECT_THROW(log_partition_brute(box, BoundaryCondition::explicit_table(partial), p), ContractViolation);
  std::map<Site, int> bad;
  for (Site s : box.boundary()) bad[s] = 1;
  bad[{5, 5}] = 1;
  EXPECT_THROW(log_partition_brute(box, BoundaryCondition::explicit_table(bad), p), ContractViolation);
  EXPECT_THROW(BoundaryCondition::explicit_table({{{0, 0}, 2}}), ContractViolation);
}

TEST(Magnetization, SingleSiteClosedForm) {
  Region box = make_box({0, 0}, 1);
  ModelParams p(1.0, 0.5, FieldSpec::zero());
  EXPECT_NEAR(magnetization(box, kPlus, p, {0, 0}), 0.9640275800758169, 1e-15);
  EXPECT_NEAR(magnetization(box, kPlus, p, {0, 0}, Method::brute), std::tanh(2.0), 1e-15);
  ModelParams q(1.0, 0.7, FieldSpec::table({{{0, 0}, -0.3}}));
  EXPECT_NEAR(magnetization(box, kPlus, q, {0, 0}), std::tanh(0.7 * (4.0 - 0.3)), 1e-15);
}

TEST(Magnetization, FlipSymmetry) {
  Region box = make_box({0, 0}, 4);
  ModelParams p(1.0, 0.6, FieldSpec::zero());
  for (Site s : box.sites())
    EXPECT_NEAR(magnetization(box, kMinus, p, s), -magnetization(box, kPlus, p, s), 1e-13);
}

TEST(Magnetization, MatchesOracle) {
  std::mt19937_64 rng(5);
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 0.8, oracle::random_table(box, rng, -0.4, 0.4));
  auto bc = oracle::random_boundary(box, rng);
  for (Site s : box.sites()) {
    const double expected = oracle::magnetization(box, bc, p, s);
    EXPECT_NEAR(magnetization(box, bc, p, s, Method::brute), expected, 1e-13);
    EXPECT_NEAR(magnetization(box, bc, p, s, Method::transfer), expected, 1e-13);
  }
}

// Oracle: enumeration of all 2^16 configurations for each boundary condition.
TEST(Magnetization, LowTemperatureGapFourByFour) {
  Region box = make_box({0, 0}, 4);
  std::map<Site, double> t;
  for (Site s : box.sites()) t[s] = 0.01;
  ModelParams p(1.0, 2.0, FieldSpec::table(t));
  const double up = oracle::magnetization(box, kPlus, p, {0, 0});
  const double down = oracle::magnetization(box, kMinus, p, {0, 0});
  EXPECT_GT(up - down, 1.8);
  EXPECT_NEAR(magnetization_gap(box, p, {0, 0}), up - down, 1e-12);
  EXPECT_NEAR(magnetization_gap(box, p, {0, 0}, Method::brute), up - down, 1e-12);
}

TEST(Magnetization, OutsideBox) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 0.5, FieldSpec::zero());
  EXPECT_THROW(magnetization(box, kPlus, p, {2, 0}), DomainError);
  EXPECT_THROW(truncated_correlation(box, kPlus, p, {0, 0}, {0, 5}), DomainError);
}

TEST(TruncatedCorrelation, Examples) {
  Region box = make_box({0, 0}, 3);
  ModelParams free(1.0, 0.0, FieldSpec::uniform(0.3));
  EXPECT_NEAR(truncated_correlation(box, kPlus, free, {0, 0}, {1, 0}), 0.0, 1e-15);
  ModelParams p(1.0, 0.4, FieldSpec::uniform(0.1));
  const double m = magnetization(box, kPlus, p, {1, 1});
  EXPECT_NEAR(truncated_correlation(box, kPlus, p, {1, 1}, {1, 1}), 1.0 - m * m, 1e-15);
}

// Oracle: brute-force sum over all 512 configurations.
TEST(TruncatedCorrelation, ThreeByThreeAgainstEnumeration) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 1.0, FieldSpec::zero());
  Site i{0, 0};
  Site j{1, 0};
  const long double sij = oracle::expectation(box, kPlus, p, [&](const SpinConfiguration& c) {
    return static_cast<double>(c.spin(i) * c.spin(j));
  });
  const long double si = oracle::magnetization(box, kPlus, p, i);
  const long double sj = oracle::magnetization(box, kPlus, p, j);
  const double expected = static_cast<double>(sij - si * sj);
  EXPECT_GT(expected, 0.0);
  EXPECT_NEAR(truncated_correlation(box, kPlus, p, i, j, Method::brute), expected, 1e-13);
  EXPECT_NEAR(truncated_correlation(box, kPlus, p, i, j, Method::transfer), expected, 1e-13);
}

TEST(Gap, Examples) {
  Region box = make_box({0, 0}, 4);
  EXPECT_NEAR(magnetization_gap(box, ModelParams(1.0, 0.0, FieldSpec::uniform(0.4)), {0, 0}), 0.0, 1e-15);
  ModelParams p(1.0, 0.7, FieldSpec::zero());
  EXPECT_NEAR(magnetization_gap(box, p, {0, 0}), 2.0 * magnetization(box, kPlus, p, {0, 0}), 1e-13);
}

// Oracle: transfer matrix on nested boxes.
TEST(Gap, UniformFieldDecaysWithVolume) {
  ModelParams p(1.0, 1.0, FieldSpec::uniform(0.5));
  const double g4 = magnetization_gap(make_box({0, 0}, 4), p, {0, 0});
  const double g6 = magnetization_gap(make_box({0, 0}, 6), p, {0, 0});
  const double g10 = magnetization_gap(make_box({0, 0}, 10), p, {0, 0});
  EXPECT_LT(g10, g6);
  EXPECT_LT(g6, g4);
}

TEST(EventProbability, MatchesOracle) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 0.6, FieldSpec::power_law(0.1, 3));
  std::map<Site, int> event{{{0, 0}, 1}, {{1, 0}, -1}};
  const double expected = static_cast<double>(oracle::expectation(box, kMinus, p, [](const SpinConfiguration& c) {
    return (c.spin({0, 0}) == 1 && c.spin({1, 0}) == -1) ? 1.0 : 0.0;
  }));
  EXPECT_NEAR(event_probability(box, kMinus, p, event, Method::brute), expected, 1e-14);
  EXPECT_NEAR(event_probability(box, kMinus, p, event, Method::transfer), expected, 1e-14);
  EXPECT_NEAR((1.0 + magnetization(box, kMinus, p, {0, 0})) / 2.0,
              event_probability(box, kMinus, p, {{{0, 0}, 1}}), 1e-14);
}

TEST(PinnedRatio, NoOverrideIsExact) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 1.0, FieldSpec::uniform(0.3));
  EXPECT_LE(pinned_ratio_check(box, kPlus, p, {0, 0}, 0.3), 1e-14);
}

TEST(PinnedRatio, IdentityHoldsForAnyBoundary) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 1.0, FieldSpec::uniform(0.3));
  std::mt19937_64 rng(3);
  for (const auto& bc : {kPlus, kMinus, oracle::random_boundary(box, rng)}) {
    EXPECT_LE(pinned_ratio_check(box, bc, p, {0, 0}, 1.0), 1e-12);
    EXPECT_LE(pinned_ratio_check(box, bc, p, {1, -1}, -0.8, Method::transfer), 1e-12);
  }
  EXPECT_THROW(pinned_ratio_check(box, kPlus, p.with_field(FieldSpec::power_law(0.1, 3)), {0, 0}, 1.0),
               ContractViolation);
}

// Correlation-inequality properties on randomized 3x3 instances, checked
// exactly.
class Correlation : public ::testing::TestWithParam<int> {};

TEST_P(Correlation, FkgAndGriffiths) {
  std::mt19937_64 rng(1000 + GetParam());
  Region box = make_box({0, 0}, 3);
  std::uniform_real_distribution<double> beta_dist(0.05, 1.5);
  const double beta = beta_dist(rng);
  ModelParams p(1.0, beta, oracle::random_table(box, rng, -0.5, 0.5));
  auto omega = oracle::random_boundary(box, rng);
  const auto sites = box.sites();
  Site j = sites[rng() % sites.size()];
  const double bump = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
  ModelParams bumped = p.with_field(p.field.with_override(j, p.field.at(j) + bump));
  ModelParams nonneg(1.0, beta, oracle::random_table(box, rng, 0.0, 0.5));
  ModelParams zero(1.0, beta, FieldSpec::zero());

  for (Site i : sites) {
    for (const auto& bc : {kPlus, kMinus, omega}) {
      EXPECT_GE(magnetization(box, bc, bumped, i, Method::brute) - magnetization(box, bc, p, i, Method::brute),
                -1e-12);
    }
    const double lo = magnetization(box, kMinus, p, i, Method::brute);
    const double mid = magnetization(box, omega, p, i, Method::brute);
    const double hi = magnetization(box, kPlus, p, i, Method::brute);
    EXPECT_LE(lo, mid + 1e-12);
    EXPECT_LE(mid, hi + 1e-12);
    EXPECT_GE(magnetization(box, kPlus, nonneg, i, Method::brute),
              magnetization(box, kPlus, zero, i, Method::brute) - 1e-12);
    for (Site k : sites) EXPECT_GE(truncated_correlation(box, kPlus, p, i, k, Method::brute), -1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, Correlation, ::testing::Range(0, 12));

TEST(VolumeMonotonicity, NestedBoxes) {
  std::mt19937_64 rng(99);
  ModelParams p(1.0, 0.9, FieldSpec::power_law(0.3, 2.5));
  for (int side = 1; side < 8; ++side) {
    Region small = make_box({0, 0}, side);
    Region big = small.resized(side + 1);
    for (Site i : {Site{0, 0}, small.site(0)}) {
      EXPECT_LE(magnetization(big, kPlus, p, i), magnetization(small, kPlus, p, i) + 1e-12);
      EXPECT_GE(magnetization(big, kMinus, p, i), magnetization(small, kMinus, p, i) - 1e-12);
    }
  }
}

TEST(Summary, CollectsEverySite) {
  Region box = make_box({0, 0}, 3);
  ModelParams p(1.0, 0.5, FieldSpec::uniform(0.2));
  auto s = summarize(box, kPlus, p, Method::brute);
  EXPECT_EQ(s.magnetizations.size(), 9u);
  EXPECT_NEAR(s.log_Z, log_partition_transfer(box, kPlus, p), 1e-12);
  for (const auto& [site, m] : s.magnetizations) {
    EXPECT_GE(m, -1.0);
    EXPECT_LE(m, 1.0);
  }
}
