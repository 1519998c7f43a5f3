#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ising/field.hpp"
#include "ising/lattice.hpp"

namespace ising {

// Frozen spins outside the box, plus optional pinned sites inside it.
class BoundaryCondition {
 public:
  enum class Kind { plus, minus, explicit_table };

  static BoundaryCondition plus() { return BoundaryCondition(Kind::plus, {}); }
  static BoundaryCondition minus() { return BoundaryCondition(Kind::minus, {}); }
  // The table must cover the boundary of the box it is used with; entries
  // inside the box act as pinned sites.
  static BoundaryCondition explicit_table(std::map<Site, int> spins) {
    return BoundaryCondition(Kind::explicit_table, std::move(spins));
  }

  Kind kind() const { return kind_; }
  const std::map<Site, int>& table() const { return table_; }
  const std::map<Site, int>& pins() const { return pins_; }

  // Spin at a boundary site.
  int spin_at(Site s) const;

  // Pins plus explicit-table entries that fall inside the region.
  std::map<Site, int> interior_pins(const Region& region) const;

  BoundaryCondition with_pin(Site s, int spin) const;
  BoundaryCondition with_pins(const std::map<Site, int>& pins) const;

  // Throws ContractViolation unless the table covers exactly the boundary of
  // the region (plus pins inside it) and every spin is +-1.
  void validate(const Region& region) const;

  std::string describe() const;

 private:
  BoundaryCondition(Kind kind, std::map<Site, int> table);

  Kind kind_;
  std::map<Site, int> table_;
  std::map<Site, int> pins_;
};

class SpinConfiguration {
 public:
  // All interior spins equal to `fill`.
  SpinConfiguration(Region region, BoundaryCondition bc, int fill = -1);
  // Interior spins from bit k of `bits` (1 -> +1) for the k-th site in
  // row-major order.
  static SpinConfiguration from_bits(Region region, BoundaryCondition bc, std::uint64_t bits);

  const Region& region() const { return region_; }
  const BoundaryCondition& bc() const { return bc_; }

  // Spin at any site of the box or its boundary.
  int spin(Site s) const;
  void set(Site s, int spin);
  const std::vector<std::int8_t>& interior() const { return values_; }
  std::uint64_t bits() const;

  friend bool operator==(const SpinConfiguration& a, const SpinConfiguration& b) {
    return a.region_ == b.region_ && a.values_ == b.values_;
  }

 private:
  Region region_;
  BoundaryCondition bc_;
  std::vector<std::int8_t> values_;
};

enum class Method { brute, transfer };

const char* to_string(Method m);

struct ExactLimits {
  std::size_t brute_max_sites = 25;
  int transfer_max_side = 20;
};

// H = -J sum over unordered bonds with at least one endpoint in the box of
// s_i s_j - sum_{i in box} h_i s_i. Bonds between two boundary sites are
// constant in the interior spins and omitted.
double energy(const SpinConfiguration& config, const ModelParams& params);

// The same Hamiltonian shifted to vanish on the all-minus configuration:
// J sum (1 - s_i s_j) - sum h_i (s_i + 1). Requires minus boundary spins.
double energy_normalized_minus(const SpinConfiguration& config, const ModelParams& params);

double log_partition_brute(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                           const ExactLimits& limits = {});
double log_partition_transfer(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                              const ExactLimits& limits = {});
double log_partition(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                     Method method, const ExactLimits& limits = {});

// log of the partition function of energy_normalized_minus.
double log_partition_normalized_minus(const Region& region, const ModelParams& params, Method method,
                                      const ExactLimits& limits = {});

// Probability that every site in `event` carries the given spin.
double event_probability(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                         const std::map<Site, int>& event, Method method = Method::transfer,
                         const ExactLimits& limits = {});

double magnetization(const Region& region, const BoundaryCondition& bc, const ModelParams& params, Site i,
                     Method method = Method::transfer, const ExactLimits& limits = {});

// <s_i s_j> - <s_i><s_j>.
double truncated_correlation(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                             Site i, Site j, Method method = Method::transfer, const ExactLimits& limits = {});

// <s_i>^+ - <s_i>^-.
double magnetization_gap(const Region& region, const ModelParams& params, Site i,
                         Method method = Method::transfer, const ExactLimits& limits = {});

// Checks <s_i>_{h'} = <s_i exp(beta (h_k - h) s_k)>_h Z_h / Z_{h'} for every
// i in the box, where h is the uniform field of `base` and h' equals h
// except h'_k = h_k. Returns the largest absolute residual.
double pinned_ratio_check(const Region& region, const BoundaryCondition& bc, const ModelParams& base, Site k,
                          double h_k, Method method = Method::brute, const ExactLimits& limits = {});

struct GibbsSummary {
  double log_Z = 0.0;
  std::map<Site, double> magnetizations;
  Method method = Method::transfer;
};

GibbsSummary summarize(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                       Method method = Method::transfer, const ExactLimits& limits = {});

}  // namespace ising
