#pragma once

// Enumeration and transfer-matrix kernels for log Z. Each kernel has a plain
// serial reference and an OpenMP version; both return bit-identical results
// for any thread count.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ising/gibbs.hpp"

namespace ising::kernels {

// Box Hamiltonian reduced to interior spins:
//   H(s) = -J sum_{bonds inside box} s_i s_j - sum_i linear_i s_i
// with boundary couplings folded into `linear`. Sites are row-major.
struct CompiledModel {
  int side = 0;
  double J = 1.0;
  double beta = 0.0;
  std::vector<double> linear;
  // 0 for free sites, +-1 for pinned ones.
  std::vector<std::int8_t> pin;

  std::size_t size() const { return linear.size(); }
  std::size_t free_count() const;
};

CompiledModel compile(const Region& region, const BoundaryCondition& bc, const ModelParams& params);

// Energy of a full assignment (bit k set -> site k is +1).
double energy_of_bits(const CompiledModel& m, std::uint64_t bits);

double log_partition_enumerate_serial(const CompiledModel& m);
double log_partition_enumerate_omp(const CompiledModel& m);

double log_partition_transfer_serial(const CompiledModel& m);
double log_partition_transfer_omp(const CompiledModel& m);

}  // namespace ising::kernels
