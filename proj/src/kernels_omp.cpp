// OpenMP kernels. Work is split into a fixed number of blocks independent of
// the thread count and partial results are merged in a fixed tree, so the
// output is bit-identical for any number of threads.

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "ising/kernels.hpp"
#include "ising/logsum.hpp"

namespace ising::kernels {

namespace {

constexpr std::uint64_t kMaxBlocks = 1024;

// Sum of linear_k over the set bits of a word, split into two lookup halves.
struct HalfTables {
  int low_bits = 0;
  std::vector<double> low;
  std::vector<double> high;

  HalfTables(const std::vector<double>& coeff) {
    const int n = static_cast<int>(coeff.size());
    low_bits = n / 2;
    low = build(coeff, 0, low_bits);
    high = build(coeff, low_bits, n);
  }

  static std::vector<double> build(const std::vector<double>& coeff, int from, int to) {
    std::vector<double> t(std::size_t{1} << (to - from), 0.0);
    for (std::size_t x = 1; x < t.size(); ++x) {
      int b = std::countr_zero(x);
      t[x] = t[x & (x - 1)] + coeff[from + b];
    }
    return t;
  }

  double operator()(std::uint64_t w) const {
    return low[w & ((std::uint64_t{1} << low_bits) - 1)] + high[w >> low_bits];
  }
};

// Scatters the bits of a free-site counter onto their site positions.
struct Deposit {
  int low_bits = 0;
  std::vector<std::uint64_t> low;
  std::vector<std::uint64_t> high;

  explicit Deposit(const std::vector<int>& positions) {
    const int m = static_cast<int>(positions.size());
    low_bits = m / 2;
    low = build(positions, 0, low_bits);
    high = build(positions, low_bits, m);
  }

  static std::vector<std::uint64_t> build(const std::vector<int>& pos, int from, int to) {
    std::vector<std::uint64_t> t(std::size_t{1} << (to - from), 0);
    for (std::size_t x = 1; x < t.size(); ++x) {
      int b = std::countr_zero(x);
      t[x] = t[x & (x - 1)] | (std::uint64_t{1} << pos[from + b]);
    }
    return t;
  }

  std::uint64_t operator()(std::uint64_t c) const {
    return low[c & ((std::uint64_t{1} << low_bits) - 1)] | high[c >> low_bits];
  }
};

}  // namespace

double log_partition_enumerate_omp(const CompiledModel& m) {
  const int L = m.side;
  const int n = static_cast<int>(m.size());
  std::vector<int> free_sites;
  std::uint64_t fixed = 0;
  for (int k = 0; k < n; ++k) {
    if (m.pin[k] == 0) free_sites.push_back(k);
    if (m.pin[k] > 0) fixed |= std::uint64_t{1} << k;
  }
  std::uint64_t mask_h = 0;
  std::uint64_t mask_v = 0;
  for (int r = 0; r < L; ++r) {
    for (int c = 0; c < L; ++c) {
      if (c + 1 < L) mask_h |= std::uint64_t{1} << (r * L + c);
      if (r + 1 < L) mask_v |= std::uint64_t{1} << (r * L + c);
    }
  }
  const double bonds = 2.0 * L * (L - 1);
  double total_linear = 0.0;
  for (double x : m.linear) total_linear += x;

  const HalfTables plus_sum(m.linear);
  const Deposit deposit(free_sites);
  const std::uint64_t count = std::uint64_t{1} << free_sites.size();
  const std::uint64_t blocks = std::min(count, kMaxBlocks);
  const std::uint64_t per_block = count / blocks;
  const double J = m.J;
  const double beta = m.beta;

  std::vector<LogSum> parts(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    LogSum acc;
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * per_block;
    for (std::uint64_t c = begin; c < begin + per_block; ++c) {
      const std::uint64_t w = deposit(c) | fixed;
      const int broken = std::popcount((w ^ (w >> 1)) & mask_h) + std::popcount((w ^ (w >> L)) & mask_v);
      const double e = -J * (bonds - 2.0 * broken) - (2.0 * plus_sum(w) - total_linear);
      acc.add(-beta * e);
    }
    parts[b] = acc;
  }
  return tree_merge(std::move(parts)).value();
}

double log_partition_transfer_omp(const CompiledModel& m) {
  const int L = m.side;
  const std::size_t states = std::size_t{1} << L;
  const std::int64_t pairs = static_cast<std::int64_t>(states / 2);
  std::vector<double> w(states, 0.0);
  w[0] = 1.0;
  double log_scale = 0.0;

  for (int c = 0; c < L; ++c) {
    for (int r = 0; r < L; ++r) {
      const std::size_t k = static_cast<std::size_t>(r) * L + c;
      const std::size_t bit = std::size_t{1} << r;
      const std::size_t below_bit = bit >> 1;
      // boltz[v][left][below], spins encoded 0 -> -1, 1 -> +1.
      double boltz[2][2][2];
      for (int v = 0; v < 2; ++v)
        for (int l = 0; l < 2; ++l)
          for (int d = 0; d < 2; ++d) {
            const double sv = v ? 1.0 : -1.0;
            const double left = (c > 0) ? (l ? 1.0 : -1.0) : 0.0;
            const double below = (r > 0) ? (d ? 1.0 : -1.0) : 0.0;
            const bool allowed = m.pin[k] == 0 || m.pin[k] == (v ? 1 : -1);
            boltz[v][l][d] = allowed ? std::exp(m.beta * sv * (m.linear[k] + m.J * (left + below))) : 0.0;
          }

      double mx = 0.0;
#pragma omp parallel for schedule(static) reduction(max : mx)
      for (std::int64_t p = 0; p < pairs; ++p) {
        const std::size_t up = static_cast<std::size_t>(p);
        const std::size_t s0 = ((up >> r) << (r + 1)) | (up & (bit - 1));
        const std::size_t s1 = s0 | bit;
        const int d = (r > 0 && (s0 & below_bit)) ? 1 : 0;
        const double w0 = w[s0];
        const double w1 = w[s1];
        const double n0 = w0 * boltz[0][0][d] + w1 * boltz[0][1][d];
        const double n1 = w0 * boltz[1][0][d] + w1 * boltz[1][1][d];
        w[s0] = n0;
        w[s1] = n1;
        mx = std::max(mx, std::max(n0, n1));
      }
      const double inv = 1.0 / mx;
#pragma omp parallel for schedule(static)
      for (std::int64_t s = 0; s < static_cast<std::int64_t>(states); ++s) w[s] *= inv;
      log_scale += std::log(mx);
    }
  }

  const std::size_t blocks = std::min<std::size_t>(states, kMaxBlocks);
  const std::size_t per_block = states / blocks;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    double s = 0.0;
    for (std::size_t j = b * per_block; j < (b + 1) * per_block; ++j) s += w[j];
    partial[b] = s;
  }
  for (std::size_t stride = 1; stride < blocks; stride *= 2)
    for (std::size_t j = 0; j + stride < blocks; j += 2 * stride) partial[j] += partial[j + stride];
  return log_scale + std::log(partial[0]);
}

}  // namespace ising::kernels
