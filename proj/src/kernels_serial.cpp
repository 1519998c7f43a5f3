// Reference kernels: straightforward loops, kept as oracles for the OpenMP
// versions.

#include <cmath>
#include <vector>

#include "ising/kernels.hpp"
#include "ising/logsum.hpp"

namespace ising::kernels {

double log_partition_enumerate_serial(const CompiledModel& m) {
  std::vector<int> free_sites;
  std::uint64_t fixed = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m.pin[k] == 0) free_sites.push_back(static_cast<int>(k));
    if (m.pin[k] > 0) fixed |= std::uint64_t{1} << k;
  }
  LogSum acc;
  const std::uint64_t count = std::uint64_t{1} << free_sites.size();
  for (std::uint64_t c = 0; c < count; ++c) {
    std::uint64_t bits = fixed;
    for (std::size_t f = 0; f < free_sites.size(); ++f)
      if ((c >> f) & 1U) bits |= std::uint64_t{1} << free_sites[f];
    acc.add(-m.beta * energy_of_bits(m, bits));
  }
  return acc.value();
}

double log_partition_transfer_serial(const CompiledModel& m) {
  const int L = m.side;
  const std::size_t states = std::size_t{1} << L;
  std::vector<double> w(states, 0.0);
  w[0] = 1.0;
  double log_scale = 0.0;
  for (int c = 0; c < L; ++c) {
    for (int r = 0; r < L; ++r) {
      const std::size_t k = static_cast<std::size_t>(r) * L + c;
      const std::size_t bit = std::size_t{1} << r;
      std::vector<double> next(states, 0.0);
      for (std::size_t s = 0; s < states; ++s) {
        if (w[s] == 0.0) continue;
        const double left = (c > 0) ? ((s & bit) ? 1.0 : -1.0) : 0.0;
        const double below = (r > 0) ? ((s & (bit >> 1)) ? 1.0 : -1.0) : 0.0;
        for (int v : {-1, 1}) {
          if (m.pin[k] != 0 && m.pin[k] != v) continue;
          const double local = v * (m.linear[k] + m.J * (left + below));
          const std::size_t t = (v > 0) ? (s | bit) : (s & ~bit);
          next[t] += w[s] * std::exp(m.beta * local);
        }
      }
      double mx = 0.0;
      for (double x : next) mx = std::max(mx, x);
      for (double& x : next) x /= mx;
      log_scale += std::log(mx);
      w.swap(next);
    }
  }
  double total = 0.0;
  for (double x : w) total += x;
  return log_scale + std::log(total);
}

}  // namespace ising::kernels
