#pragma once

#include <cstdint>

#include "ising/lattice.hpp"

namespace ising {

// A series value together with a certified bound on the neglected tail.
struct SeriesValue {
  double value = 0.0;
  double truncation_error_bound = 0.0;
  bool closed_form_used = false;
};

// x = 3 exp(-2 beta J), the ratio governing every series below.
double peierls_ratio(double beta, double J);

// c(beta) = sum_{n>=4} (2n+3) 3^(n-1) exp(-2 beta J n).
SeriesValue c_beta(double beta, double J);
SeriesValue c_beta_truncated(double beta, double J, std::int64_t terms);

// sum_{n>=4} exp(-2 beta (J n - 3 l1)) n 3^n.
SeriesValue peierls_bound(double beta, double J, double l1_norm);
SeriesValue peierls_bound_truncated(double beta, double J, double l1_norm, std::int64_t terms);

// 1 - 2 c(beta): lower bound on <s_i>^+ for non-negative fields.
double plus_bc_lower_bound(double beta, double J);

// Number of closed self-avoiding dual loops of length n enclosing site i.
std::int64_t count_surrounding_contours(const Region& region, Site i, int n);

}  // namespace ising
