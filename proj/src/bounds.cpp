#include "ising/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "ising/contour.hpp"
#include "ising/error.hpp"

namespace ising {

namespace {

double checked_ratio(double beta, double J) {
  const double x = peierls_ratio(beta, J);
  if (!(x < 1.0))
    throw RegimeError("series diverges: 3 exp(-2 beta J) = " + std::to_string(x) + " >= 1 (margin " +
                      std::to_string(1.0 - x) + ")");
  return x;
}

// Sums (a n + b) x^n for 4 <= n <= terms, smallest terms first. The rest is
// bounded by its exact value
//   sum_{n>=M} (a n + b) x^n = x^M ((a M + b) / (1 - x) + a x / (1 - x)^2)
// with M = terms + 1, rounded up.
SeriesValue truncated(double x, std::int64_t terms, long double a, long double b) {
  if (terms < 4) throw DomainError("truncation needs at least the n = 4 term");
  std::vector<long double> t;
  t.reserve(static_cast<std::size_t>(std::min<std::int64_t>(terms, 1 << 20)));
  long double power = std::pow(static_cast<long double>(x), 4.0L);
  for (std::int64_t n = 4; n <= terms && power != 0.0L; ++n) {
    t.push_back((a * n + b) * power);
    power *= x;
  }
  long double sum = 0.0L;
  for (auto it = t.rbegin(); it != t.rend(); ++it) sum += *it;
  SeriesValue out;
  out.value = static_cast<double>(sum);
  const long double M = static_cast<long double>(terms + 1);
  const long double lx = x;
  const long double tail =
      std::pow(lx, M) * ((a * M + b) / (1.0L - lx) + a * lx / ((1.0L - lx) * (1.0L - lx)));
  out.truncation_error_bound =
      std::nextafter(static_cast<double>(tail * (1.0L + 1e-15L)), std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace

double peierls_ratio(double beta, double J) { return 3.0 * std::exp(-2.0 * beta * J); }

SeriesValue c_beta(double beta, double J) {
  const double x = checked_ratio(beta, J);
  // (1/3) sum_{n>=4} (2n + 3) x^n = x^4 (11 - 9x) / (3 (1 - x)^2)
  const double x4 = (x * x) * (x * x);
  return {x4 * (11.0 - 9.0 * x) / (3.0 * (1.0 - x) * (1.0 - x)), 0.0, true};
}

SeriesValue c_beta_truncated(double beta, double J, std::int64_t terms) {
  const double x = checked_ratio(beta, J);
  return truncated(x, terms, 2.0L / 3.0L, 1.0L);
}

SeriesValue peierls_bound(double beta, double J, double l1_norm) {
  const double x = checked_ratio(beta, J);
  if (!(l1_norm >= 0.0)) throw DomainError("l1 norm must be non-negative");
  // sum_{n>=4} n x^n = x^4 (4 - 3x) / (1 - x)^2
  const double x4 = (x * x) * (x * x);
  const double series = x4 * (4.0 - 3.0 * x) / ((1.0 - x) * (1.0 - x));
  return {std::exp(6.0 * beta * l1_norm) * series, 0.0, true};
}

SeriesValue peierls_bound_truncated(double beta, double J, double l1_norm, std::int64_t terms) {
  const double x = checked_ratio(beta, J);
  SeriesValue s = truncated(x, terms, 1.0L, 0.0L);
  const double factor = std::exp(6.0 * beta * l1_norm);
  s.value *= factor;
  s.truncation_error_bound *= factor;
  return s;
}

double plus_bc_lower_bound(double beta, double J) { return 1.0 - 2.0 * c_beta(beta, J).value; }

std::int64_t count_surrounding_contours(const Region& region, Site i, int n) {
  if (n % 2 != 0) throw DomainError("contours have even length; got n = " + std::to_string(n));
  if (n < 4 || n > 10) throw DomainError("surrounding-loop counts are supported for n in {4, 6, 8, 10}");
  if (!region.contains(i)) throw GeometryError("site " + to_string(i) + " is outside the box");
  const int reach = n / 2;
  if (i.x - region.x_lo() < reach || region.x_hi() - i.x < reach || i.y - region.y_lo() < reach ||
      region.y_hi() - i.y < reach)
    throw GeometryError("box too small: loops of length " + std::to_string(n) + " around " + to_string(i) +
                        " would reach the dual boundary");

  // Every loop enclosing i crosses the horizontal ray to the right of i
  // through a vertical edge at a = i.x + 1 + k, k < n / 2. Walk from each such
  // edge and keep the distinct loops that enclose i.
  std::set<std::vector<DualEdge>> loops;
  std::vector<DualVertex> path;
  std::set<DualVertex> on_path;
  constexpr DualVertex kSteps[4] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};

  auto record = [&]() {
    std::vector<DualEdge> edges;
    int crossings = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      DualEdge e(path[k], path[(k + 1) % path.size()]);
      if (e.vertical() && e.from.b == i.y && e.from.a >= i.x + 1) ++crossings;
      edges.push_back(e);
    }
    if (crossings % 2 == 1) {
      std::sort(edges.begin(), edges.end());
      loops.insert(std::move(edges));
    }
  };

  auto walk = [&](auto&& self, DualVertex at, int steps) -> void {
    for (DualVertex d : kSteps) {
      DualVertex next{at.a + d.a, at.b + d.b};
      if (steps + 1 == n) {
        if (next == path.front()) record();
        continue;
      }
      if (on_path.count(next)) continue;
      // Prune walks that can no longer return in time.
      const int back = std::abs(next.a - path.front().a) + std::abs(next.b - path.front().b);
      if (back > n - steps - 1) continue;
      path.push_back(next);
      on_path.insert(next);
      self(self, next, steps + 1);
      on_path.erase(next);
      path.pop_back();
    }
  };

  for (int k = 0; k < reach; ++k) {
    DualVertex start{i.x + 1 + k, i.y};
    DualVertex up{start.a, start.b + 1};
    path = {start, up};
    on_path = {start, up};
    walk(walk, up, 1);
  }
  return static_cast<std::int64_t>(loops.size());
}

}  // namespace ising
