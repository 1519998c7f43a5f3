#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace ising {

// Streaming log-sum-exp with max shift: represents max + log(sum).
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double x) {
    if (x <= max) {
      sum += std::exp(x - max);
    } else if (max == -std::numeric_limits<double>::infinity()) {
      max = x;
      sum = 1.0;
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }

  void merge(const LogSum& o) {
    if (o.sum == 0.0) return;
    if (sum == 0.0) {
      *this = o;
      return;
    }
    if (o.max <= max) {
      sum += o.sum * std::exp(o.max - max);
    } else {
      sum = sum * std::exp(max - o.max) + o.sum;
      max = o.max;
    }
  }

  double value() const {
    return sum == 0.0 ? -std::numeric_limits<double>::infinity() : max + std::log(sum);
  }
};

inline double log_sum_exp(std::span<const double> xs) {
  LogSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

inline double log_add_exp(double a, double b) {
  LogSum acc;
  acc.add(a);
  acc.add(b);
  return acc.value();
}

// Merges partial sums pairwise in a fixed binary tree over their index order,
// so the result does not depend on how the partials were produced.
inline LogSum tree_merge(std::vector<LogSum> parts) {
  if (parts.empty()) return {};
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2)
    for (std::size_t k = 0; k + stride < parts.size(); k += 2 * stride) parts[k].merge(parts[k + stride]);
  return parts[0];
}

}  // namespace ising
