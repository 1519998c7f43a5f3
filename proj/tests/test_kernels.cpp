#include <cmath>
#include <cstring>
#include <random>

#include <gtest/gtest.h>
#include <omp.h>

#include "ising/kernels.hpp"
#include "oracle.hpp"

using namespace ising;
using namespace ising::kernels;

namespace {

CompiledModel random_model(int side, std::uint64_t seed, int pins = 0) {
  std::mt19937_64 rng(seed);
  Region box = make_box({0, 0}, side);
  ModelParams p(1.0, std::uniform_real_distribution<double>(0.1, 1.5)(rng),
                oracle::random_table(box, rng, -0.6, 0.6));
  auto bc = oracle::random_boundary(box, rng);
  const auto sites = box.sites();
  for (int k = 0; k < pins; ++k) bc = bc.with_pin(sites[rng() % sites.size()], (rng() & 1) ? 1 : -1);
  return compile(box, bc, p);
}

std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

}  // namespace

TEST(Compile, FoldsBoundaryIntoLinearTerm) {
  Region box = make_box({0, 0}, 2);
  ModelParams p(1.5, 1.0, FieldSpec::uniform(0.25));
  auto m = compile(box, BoundaryCondition::plus(), p);
  ASSERT_EQ(m.size(), 4u);
  // Each corner site of a 2x2 box touches two boundary sites.
  for (double l : m.linear) EXPECT_DOUBLE_EQ(l, 0.25 + 2 * 1.5);
  EXPECT_EQ(m.free_count(), 4u);
}

TEST(Compile, EnergyMatchesHamiltonian) {
  std::mt19937_64 rng(4);
  Region box = make_box({2, 1}, 3);
  ModelParams p(0.7, 1.0, oracle::random_table(box, rng, -1, 1));
  auto bc = oracle::random_boundary(box, rng);
  auto m = compile(box, bc, p);
  const double shift = energy(SpinConfiguration(box, bc, -1), p) - energy_of_bits(m, 0);
  for (std::uint64_t c = 0; c < 512; ++c)
    EXPECT_NEAR(energy_of_bits(m, c) + shift, energy(SpinConfiguration::from_bits(box, bc, c), p), 1e-12);
}

TEST(Kernels, EnumerationSerialMatchesOmp) {
  for (int side = 1; side <= 4; ++side) {
    for (int pins : {0, 2}) {
      auto m = random_model(side, 100 + side, pins);
      const double a = log_partition_enumerate_serial(m);
      const double b = log_partition_enumerate_omp(m);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(Kernels, TransferSerialMatchesOmp) {
  for (int side = 1; side <= 9; ++side) {
    auto m = random_model(side, 200 + side, side > 2 ? 3 : 0);
    const double a = log_partition_transfer_serial(m);
    const double b = log_partition_transfer_omp(m);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Kernels, TransferMatchesEnumeration) {
  for (int side = 1; side <= 4; ++side) {
    auto m = random_model(side, 300 + side, 1);
    const double a = log_partition_enumerate_omp(m);
    const double b = log_partition_transfer_omp(m);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Kernels, AllPinned) {
  Region box = make_box({0, 0}, 2);
  ModelParams p(1.0, 0.5, FieldSpec::zero());
  auto bc = BoundaryCondition::plus();
  for (Site s : box.sites()) bc = bc.with_pin(s, 1);
  auto m = compile(box, bc, p);
  EXPECT_EQ(m.free_count(), 0u);
  const double expected = -0.5 * energy(SpinConfiguration(box, bc, 1), p);
  EXPECT_NEAR(log_partition_enumerate_omp(m), log_partition_enumerate_serial(m), 1e-14);
  EXPECT_NEAR(log_partition_transfer_omp(m), log_partition_transfer_serial(m), 1e-14);
  EXPECT_NEAR(log_partition_brute(box, bc, p), expected, 1e-12);
  EXPECT_NEAR(log_partition_transfer(box, bc, p), expected, 1e-12);
}

TEST(Kernels, BitStableAcrossThreadCounts) {
  auto m5 = random_model(5, 77, 0);
  auto m12 = random_model(12, 78, 4);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double e1 = log_partition_enumerate_omp(m5);
  const double t1 = log_partition_transfer_omp(m12);
  for (int threads : {2, 3, 4, 8}) {
    omp_set_num_threads(threads);
    EXPECT_EQ(bits_of(log_partition_enumerate_omp(m5)), bits_of(e1)) << threads;
    EXPECT_EQ(bits_of(log_partition_transfer_omp(m12)), bits_of(t1)) << threads;
  }
  omp_set_num_threads(saved);
}
