#include "ising/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ising/error.hpp"
#include "ising/kernels.hpp"
#include "ising/logsum.hpp"

namespace ising {

// ---- BoundaryCondition ----

BoundaryCondition::BoundaryCondition(Kind kind, std::map<Site, int> table) : kind_(kind) {
  for (const auto& [s, v] : table)
    if (v != 1 && v != -1) throw ContractViolation("boundary spin at " + to_string(s) + " must be +-1");
  table_ = std::move(table);
}

int BoundaryCondition::spin_at(Site s) const {
  switch (kind_) {
    case Kind::plus:
      return 1;
    case Kind::minus:
      return -1;
    case Kind::explicit_table: {
      auto it = table_.find(s);
      if (it == table_.end()) throw ContractViolation("explicit boundary has no spin at " + to_string(s));
      return it->second;
    }
  }
  return 0;
}

BoundaryCondition BoundaryCondition::with_pin(Site s, int spin) const {
  if (spin != 1 && spin != -1) throw ContractViolation("pinned spin must be +-1");
  BoundaryCondition out = *this;
  out.pins_[s] = spin;
  return out;
}

BoundaryCondition BoundaryCondition::with_pins(const std::map<Site, int>& pins) const {
  BoundaryCondition out = *this;
  for (const auto& [s, v] : pins) out = out.with_pin(s, v);
  return out;
}

void BoundaryCondition::validate(const Region& region) const {
  for (const auto& [s, v] : pins_)
    if (!region.contains(s)) throw ContractViolation("pinned site " + to_string(s) + " is outside the box");
  if (kind_ != Kind::explicit_table) return;
  std::size_t on_boundary = 0;
  for (const auto& [s, v] : table_) {
    if (region.contains(s)) continue;
    if (!region.on_boundary(s))
      throw ContractViolation("explicit boundary entry " + to_string(s) + " is not on the box boundary");
    ++on_boundary;
  }
  if (on_boundary != 4 * static_cast<std::size_t>(region.side()))
    throw ContractViolation("explicit boundary does not cover the whole box boundary");
}

std::map<Site, int> BoundaryCondition::interior_pins(const Region& region) const {
  std::map<Site, int> out;
  if (kind_ == Kind::explicit_table)
    for (const auto& [s, v] : table_)
      if (region.contains(s)) out[s] = v;
  for (const auto& [s, v] : pins_) out[s] = v;
  return out;
}

std::string BoundaryCondition::describe() const {
  std::string s = kind_ == Kind::plus ? "plus" : kind_ == Kind::minus ? "minus" : "explicit";
  if (!pins_.empty()) s += "+" + std::to_string(pins_.size()) + "pins";
  return s;
}

// ---- SpinConfiguration ----

SpinConfiguration::SpinConfiguration(Region region, BoundaryCondition bc, int fill)
    : region_(region), bc_(std::move(bc)), values_(region.size(), static_cast<std::int8_t>(fill)) {
  if (fill != 1 && fill != -1) throw ContractViolation("spins must be +-1");
  // Table entries inside the box pin those sites.
  for (const auto& [s, v] : bc_.interior_pins(region_)) values_[region_.index(s)] = static_cast<std::int8_t>(v);
}

SpinConfiguration SpinConfiguration::from_bits(Region region, BoundaryCondition bc, std::uint64_t bits) {
  SpinConfiguration c(region, std::move(bc), -1);
  for (std::size_t k = 0; k < c.values_.size(); ++k) c.values_[k] = ((bits >> k) & 1U) ? 1 : -1;
  return c;
}

int SpinConfiguration::spin(Site s) const {
  if (region_.contains(s)) return values_[region_.index(s)];
  return bc_.spin_at(s);
}

void SpinConfiguration::set(Site s, int spin) {
  if (!region_.contains(s)) throw DomainError("site " + to_string(s) + " is outside the box");
  if (spin != 1 && spin != -1) throw ContractViolation("spins must be +-1");
  values_[region_.index(s)] = static_cast<std::int8_t>(spin);
}

std::uint64_t SpinConfiguration::bits() const {
  std::uint64_t b = 0;
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (values_[k] > 0) b |= std::uint64_t{1} << k;
  return b;
}

const char* to_string(Method m) { return m == Method::brute ? "brute" : "transfer"; }

// ---- energies ----

namespace {

// Visits every unordered bond with at least one endpoint in the box once.
template <class F>
void for_each_bond(const Region& region, F&& f) {
  for (Site s : region.sites()) {
    for (Site d : kNeighborOffsets) {
      Site nb = s + d;
      // Interior pairs are visited from their lower-index end only.
      if (region.contains(nb) && region.index(nb) < region.index(s)) continue;
      f(s, nb);
    }
  }
}

}  // namespace

double energy(const SpinConfiguration& config, const ModelParams& params) {
  const Region& region = config.region();
  double bonds = 0.0;
  for_each_bond(region, [&](Site a, Site b) { bonds += config.spin(a) * config.spin(b); });
  double field = 0.0;
  for (Site s : region.sites()) field += params.field.at(s) * config.spin(s);
  return -params.J * bonds - field;
}

double energy_normalized_minus(const SpinConfiguration& config, const ModelParams& params) {
  if (config.bc().kind() != BoundaryCondition::Kind::minus)
    throw ContractViolation("the normalized Hamiltonian requires minus boundary condition");
  const Region& region = config.region();
  double broken = 0.0;
  for_each_bond(region, [&](Site a, Site b) { broken += 1.0 - config.spin(a) * config.spin(b); });
  double field = 0.0;
  for (Site s : region.sites()) field += params.field.at(s) * (config.spin(s) + 1);
  return params.J * broken - field;
}

// ---- partition functions ----

double log_partition_brute(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                           const ExactLimits& limits) {
  if (region.size() > limits.brute_max_sites)
    throw CapacityError("brute-force enumeration is capped at " + std::to_string(limits.brute_max_sites) +
                        " sites (box has " + std::to_string(region.size()) +
                        "); use the transfer method (side <= " + std::to_string(limits.transfer_max_side) +
                        ") or the Metropolis sampler");
  return kernels::log_partition_enumerate_omp(kernels::compile(region, bc, params));
}

double log_partition_transfer(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                              const ExactLimits& limits) {
  if (region.side() > limits.transfer_max_side)
    throw CapacityError("transfer matrix is capped at side " + std::to_string(limits.transfer_max_side) +
                        " (box side " + std::to_string(region.side()) + "); use the Metropolis sampler");
  return kernels::log_partition_transfer_omp(kernels::compile(region, bc, params));
}

double log_partition(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                     Method method, const ExactLimits& limits) {
  return method == Method::brute ? log_partition_brute(region, bc, params, limits)
                                 : log_partition_transfer(region, bc, params, limits);
}

double log_partition_normalized_minus(const Region& region, const ModelParams& params, Method method,
                                      const ExactLimits& limits) {
  const auto minus = BoundaryCondition::minus();
  // H_norm = H - H(all minus), a configuration-independent shift.
  const double ground = energy(SpinConfiguration(region, minus, -1), params);
  return log_partition(region, minus, params, method, limits) + params.beta * ground;
}

double event_probability(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                         const std::map<Site, int>& event, Method method, const ExactLimits& limits) {
  for (const auto& [s, v] : event)
    if (!region.contains(s)) throw DomainError("event site " + to_string(s) + " is outside the box");
  const auto existing = bc.interior_pins(region);
  for (const auto& [s, v] : event) {
    auto it = existing.find(s);
    if (it != existing.end() && it->second != v) return 0.0;
  }
  const double all = log_partition(region, bc, params, method, limits);
  const double constrained = log_partition(region, bc.with_pins(event), params, method, limits);
  return std::exp(constrained - all);
}

namespace {

void require_inside(const Region& region, Site i) {
  if (!region.contains(i)) throw DomainError("site " + to_string(i) + " is outside the box");
}

// log Z with the given site pinned, or -inf if it contradicts an existing pin.
double pinned_log_z(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                    const std::map<Site, int>& pins, Method method, const ExactLimits& limits) {
  const auto existing = bc.interior_pins(region);
  for (const auto& [s, v] : pins) {
    auto it = existing.find(s);
    if (it != existing.end() && it->second != v) return -std::numeric_limits<double>::infinity();
  }
  return log_partition(region, bc.with_pins(pins), params, method, limits);
}

}  // namespace

double magnetization(const Region& region, const BoundaryCondition& bc, const ModelParams& params, Site i,
                     Method method, const ExactLimits& limits) {
  require_inside(region, i);
  bc.validate(region);
  const double up = pinned_log_z(region, bc, params, {{i, 1}}, method, limits);
  const double down = pinned_log_z(region, bc, params, {{i, -1}}, method, limits);
  if (std::isinf(up)) return -1.0;
  if (std::isinf(down)) return 1.0;
  return std::tanh(0.5 * (up - down));
}

double truncated_correlation(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                             Site i, Site j, Method method, const ExactLimits& limits) {
  require_inside(region, i);
  require_inside(region, j);
  if (i == j) {
    const double m = magnetization(region, bc, params, i, method, limits);
    return 1.0 - m * m;
  }
  double lz[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      lz[a][b] = pinned_log_z(region, bc, params, {{i, a ? 1 : -1}, {j, b ? 1 : -1}}, method, limits);
  double top = -std::numeric_limits<double>::infinity();
  for (auto& row : lz)
    for (double x : row) top = std::max(top, x);
  double p[2][2];
  double norm = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) norm += (p[a][b] = std::exp(lz[a][b] - top));
  for (auto& row : p)
    for (double& x : row) x /= norm;
  // <s_i s_j> - <s_i><s_j> for two +-1 variables.
  return 4.0 * (p[1][1] * p[0][0] - p[1][0] * p[0][1]);
}

double magnetization_gap(const Region& region, const ModelParams& params, Site i, Method method,
                         const ExactLimits& limits) {
  return magnetization(region, BoundaryCondition::plus(), params, i, method, limits) -
         magnetization(region, BoundaryCondition::minus(), params, i, method, limits);
}

double pinned_ratio_check(const Region& region, const BoundaryCondition& bc, const ModelParams& base, Site k,
                          double h_k, Method method, const ExactLimits& limits) {
  require_inside(region, k);
  const auto* uniform = std::get_if<UniformField>(&base.field.family());
  if (!uniform) throw ContractViolation("pinned ratio check needs a uniform base field");
  const double h = uniform->h;
  const ModelParams overridden = base.with_field(base.field.with_override(k, h_k));
  const double c = base.beta * (h_k - h);

  const double log_z_base = log_partition(region, bc, base, method, limits);
  const double log_z_over = log_partition(region, bc, overridden, method, limits);
  const double ratio = std::exp(log_z_base - log_z_over);

  double worst = 0.0;
  for (Site i : region.sites()) {
    const double lhs = magnetization(region, bc, overridden, i, method, limits);
    // <s_i exp(c s_k)>_h from the joint law of (s_i, s_k) under h.
    double tilted = 0.0;
    if (i == k) {
      for (int v : {-1, 1})
        tilted += v * std::exp(c * v + pinned_log_z(region, bc, base, {{k, v}}, method, limits) - log_z_base);
    } else {
      for (int a : {-1, 1})
        for (int b : {-1, 1})
          tilted += a * std::exp(c * b + pinned_log_z(region, bc, base, {{i, a}, {k, b}}, method, limits) -
                                 log_z_base);
    }
    worst = std::max(worst, std::abs(lhs - tilted * ratio));
  }
  return worst;
}

GibbsSummary summarize(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                       Method method, const ExactLimits& limits) {
  GibbsSummary out;
  out.method = method;
  out.log_Z = log_partition(region, bc, params, method, limits);
  for (Site s : region.sites()) out.magnetizations[s] = magnetization(region, bc, params, s, method, limits);
  return out;
}

}  // namespace ising
