#include "ising/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ising/bounds.hpp"
#include "ising/error.hpp"
#include "ising/logsum.hpp"

namespace ising {

DualEdge dual_of_bond(Site a, Site b) {
  if (distance(a, b) != 1) throw DomainError("sites " + to_string(a) + " and " + to_string(b) + " are not neighbours");
  Site lo = std::min(a, b, [](Site p, Site q) { return p.x + p.y < q.x + q.y; });
  if (a.y == b.y) {
    // Horizontal bond: vertical dual edge at x = lo.x + 1/2.
    return {{lo.x + 1, lo.y}, {lo.x + 1, lo.y + 1}};
  }
  return {{lo.x, lo.y + 1}, {lo.x + 1, lo.y + 1}};
}

namespace {

// Sites on either side of a dual edge.
std::pair<Site, Site> sides(const DualEdge& e) {
  if (e.vertical()) return {{e.from.a - 1, e.from.b}, {e.from.a, e.from.b}};
  return {{e.from.a, e.from.b - 1}, {e.from.a, e.from.b}};
}

// Sites enclosed by a set of edges: a horizontal ray to the right of a site
// crosses an odd number of vertical edges exactly when the site is enclosed.
std::vector<Site> enclosed_sites(const std::vector<DualEdge>& edges) {
  std::map<int, std::vector<int>> rows;
  for (const auto& e : edges)
    if (e.vertical()) rows[e.from.b].push_back(e.from.a);
  std::vector<Site> out;
  for (auto& [y, xs] : rows) {
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
      for (int x = xs[k]; x < xs[k + 1]; ++x) out.push_back({x, y});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool contains_sorted(const std::vector<Site>& sorted, Site s) {
  return std::binary_search(sorted.begin(), sorted.end(), s);
}

enum Arm : std::uint8_t { kNorth = 1, kEast = 2, kSouth = 4, kWest = 8 };

Arm opposite(Arm a) {
  switch (a) {
    case kNorth: return kSouth;
    case kSouth: return kNorth;
    case kEast: return kWest;
    default: return kEast;
  }
}

// Corner rule at a vertex of degree four.
Arm paired(Arm a) {
  switch (a) {
    case kNorth: return kEast;
    case kEast: return kNorth;
    case kSouth: return kWest;
    default: return kSouth;
  }
}

DualVertex step(DualVertex v, Arm a) {
  switch (a) {
    case kNorth: return {v.a, v.b + 1};
    case kSouth: return {v.a, v.b - 1};
    case kEast: return {v.a + 1, v.b};
    default: return {v.a - 1, v.b};
  }
}

Arm arm_between(DualVertex from, DualVertex to) {
  if (to.a == from.a && to.b == from.b + 1) return kNorth;
  if (to.a == from.a && to.b == from.b - 1) return kSouth;
  if (to.b == from.b && to.a == from.a + 1) return kEast;
  if (to.b == from.b && to.a == from.a - 1) return kWest;
  throw InvalidFamily("contour path has a non-unit step");
}

// Dual vertices of a box as a dense grid of arm masks.
class DualGrid {
 public:
  explicit DualGrid(const Region& region)
      : a0_(region.x_lo()), b0_(region.y_lo()), width_(region.side() + 1), arms_(width_ * width_, 0) {}

  bool inside(DualVertex v) const {
    return v.a >= a0_ && v.a < a0_ + width_ && v.b >= b0_ && v.b < b0_ + width_;
  }
  std::uint8_t& arms(DualVertex v) { return arms_[(v.b - b0_) * width_ + (v.a - a0_)]; }
  std::uint8_t arms(DualVertex v) const { return arms_[(v.b - b0_) * width_ + (v.a - a0_)]; }
  DualVertex vertex(int k) const { return {a0_ + k % width_, b0_ + k / width_}; }
  int count() const { return width_ * width_; }

  void add(const DualEdge& e) {
    Arm a = arm_between(e.from, e.to);
    arms(e.from) |= a;
    arms(e.to) |= opposite(a);
  }

 private:
  int a0_;
  int b0_;
  int width_;
  std::vector<std::uint8_t> arms_;
};

Arm leave_by(std::uint8_t arms_here, Arm entered_through) {
  if (std::popcount(arms_here) == 4) return paired(entered_through);
  return static_cast<Arm>(arms_here & ~entered_through);
}

ContourSign sign_from_inner_sites(const Contour& gamma, const SpinConfiguration& config) {
  int sign = 0;
  for (Site s : gamma.inner_edge_sites()) {
    const int v = config.spin(s);
    if (sign != 0 && v != sign) throw Error("internal: contour separates sites of both signs on its inner side");
    sign = v;
  }
  return sign > 0 ? ContourSign::plus : ContourSign::minus;
}

}  // namespace

Contour::Contour(std::vector<DualVertex> path, ContourSign sign) : path_(std::move(path)), sign_(sign) {
  if (path_.size() < 4) throw InvalidFamily("a contour needs at least four edges");
  edges_.reserve(path_.size());
  for (std::size_t k = 0; k < path_.size(); ++k) {
    DualVertex a = path_[k];
    DualVertex b = path_[(k + 1) % path_.size()];
    arm_between(a, b);
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw InvalidFamily("contour path reuses an edge");
  closure_ = enclosed_sites(edges_);
  if (closure_.empty()) throw InvalidFamily("contour encloses no site");
  std::set<Site> near;
  for (DualVertex v : path_)
    for (Site s : {Site{v.a - 1, v.b - 1}, Site{v.a, v.b - 1}, Site{v.a - 1, v.b}, Site{v.a, v.b}}) near.insert(s);
  for (Site s : closure_)
    if (!near.count(s)) interior_.push_back(s);
}

std::vector<Site> Contour::inner_edge_sites() const {
  std::vector<Site> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) {
    auto [p, q] = sides(e);
    out.push_back(contains_sorted(closure_, p) ? p : q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ContourFamily extract_contours(const SpinConfiguration& config) {
  if (config.bc().kind() != BoundaryCondition::Kind::minus)
    throw ContractViolation("contour extraction requires minus boundary condition");
  const Region& region = config.region();
  DualGrid grid(region);
  for (Site s : region.sites()) {
    const int v = config.spin(s);
    for (Site d : kNeighborOffsets) {
      Site nb = s + d;
      // Interior bonds once, from their left or lower end.
      if (region.contains(nb) && (d.x < 0 || d.y < 0)) continue;
      if (config.spin(nb) != v) grid.add(dual_of_bond(s, nb));
    }
  }

  std::vector<std::uint8_t> used(grid.count(), 0);
  auto used_at = [&](DualVertex v) -> std::uint8_t& {
    return used[(v.b - region.y_lo()) * (region.side() + 1) + (v.a - region.x_lo())];
  };

  ContourFamily family{region, {}};
  for (int k = 0; k < grid.count(); ++k) {
    const DualVertex start = grid.vertex(k);
    for (Arm first : {kNorth, kEast, kSouth, kWest}) {
      if (!(grid.arms(start) & first) || (used_at(start) & first)) continue;
      std::vector<DualVertex> path{start};
      DualVertex at = start;
      Arm out = first;
      for (;;) {
        used_at(at) |= out;
        DualVertex next = step(at, out);
        Arm in = opposite(out);
        used_at(next) |= in;
        Arm leave = leave_by(grid.arms(next), in);
        if (next == start && leave == first) break;
        path.push_back(next);
        at = next;
        out = leave;
      }
      Contour gamma(std::move(path), ContourSign::plus);
      if (sign_from_inner_sites(gamma, config) == ContourSign::minus)
        gamma = Contour(gamma.path(), ContourSign::minus);
      family.contours.push_back(std::move(gamma));
    }
  }
  std::sort(family.contours.begin(), family.contours.end(),
            [](const Contour& a, const Contour& b) { return a.edges().front() < b.edges().front(); });
  return family;
}

SpinConfiguration reconstruct_configuration(const ContourFamily& family) {
  const Region& region = family.region;
  std::vector<DualEdge> all;
  for (const auto& gamma : family.contours) {
    for (DualVertex v : gamma.path())
      if (!region.contains_dual(v)) throw InvalidFamily("contour leaves the dual box");
    all.insert(all.end(), gamma.edges().begin(), gamma.edges().end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw InvalidFamily("contours overlap");

  SpinConfiguration config(region, BoundaryCondition::minus(), -1);
  std::vector<int> depth(region.size(), 0);
  for (const auto& gamma : family.contours)
    for (Site s : gamma.interior_closure()) ++depth[region.index(s)];
  for (std::size_t k = 0; k < region.size(); ++k)
    if (depth[k] % 2 == 1) config.set(region.site(k), 1);

  if (!(extract_contours(config) == family))
    throw InvalidFamily("family is not compatible: signs or corner pairing disagree with its configuration");
  return config;
}

double contour_weight_log(const Contour& gamma, const ModelParams& params) {
  double field = 0.0;
  for (Site s : gamma.interior_closure()) field += params.field.at(s);
  const double sign = gamma.sign() == ContourSign::plus ? 1.0 : -1.0;
  return -2.0 * params.beta * params.J * gamma.length() + sign * 2.0 * params.beta * field;
}

double family_weight_log(const ContourFamily& family, const ModelParams& params) {
  double total = 0.0;
  for (const auto& gamma : family.contours) total += contour_weight_log(gamma, params);
  return total;
}

double log_partition_contour(const Region& region, const ModelParams& params, const ExactLimits& limits) {
  if (region.size() > limits.brute_max_sites)
    throw CapacityError("contour enumeration is capped at " + std::to_string(limits.brute_max_sites) +
                        " sites; use the transfer method or the Metropolis sampler");
  const std::uint64_t count = std::uint64_t{1} << region.size();
  const std::uint64_t blocks = std::min<std::uint64_t>(count, 256);
  const std::uint64_t per_block = count / blocks;
  std::vector<LogSum> parts(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    LogSum acc;
    for (std::uint64_t c = b * per_block; c < (b + 1) * per_block; ++c) {
      auto config = SpinConfiguration::from_bits(region, BoundaryCondition::minus(), c);
      acc.add(family_weight_log(extract_contours(config), params));
    }
    parts[b] = acc;
  }
  return tree_merge(std::move(parts)).value();
}

bool involves(const Contour& gamma, Site i) { return contains_sorted(gamma.interior_closure(), i); }

bool involves(const Contour& gamma, const Contour& other) {
  return std::includes(gamma.interior_closure().begin(), gamma.interior_closure().end(),
                       other.interior_closure().begin(), other.interior_closure().end());
}

int NestingForest::depth(int node) const {
  int d = 0;
  for (int p = parent.at(node); p >= 0; p = parent[p]) ++d;
  return d;
}

NestingForest nesting_forest(const ContourFamily& family) {
  const int n = static_cast<int>(family.contours.size());
  NestingForest forest;
  forest.parent.assign(n, -1);
  forest.children.assign(n, {});
  for (int k = 0; k < n; ++k) {
    const auto& gamma = family.contours[k];
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const auto& other = family.contours[j];
      if (!involves(other, gamma)) continue;
      if (other.volume() == gamma.volume())
        throw InvalidFamily("two contours of the family enclose the same sites");
      if (forest.parent[k] < 0 || other.volume() < family.contours[forest.parent[k]].volume())
        forest.parent[k] = j;
    }
  }
  for (int k = 0; k < n; ++k) {
    if (forest.parent[k] < 0)
      forest.roots.push_back(k);
    else
      forest.children[forest.parent[k]].push_back(k);
  }
  return forest;
}

std::vector<int> ambiguous_type_contours(const ContourFamily& family, const SpinConfiguration& config) {
  std::vector<int> out;
  for (std::size_t k = 0; k < family.contours.size(); ++k) {
    const auto& gamma = family.contours[k];
    int seen = 0;
    bool mixed = false;
    for (Site s : gamma.interior_closure()) {
      if (std::binary_search(gamma.interior().begin(), gamma.interior().end(), s)) continue;
      const int v = config.spin(s);
      if (seen != 0 && v != seen) mixed = true;
      seen = v;
    }
    if (mixed) out.push_back(static_cast<int>(k));
  }
  return out;
}

SandwichCheck sandwich_check(const ContourFamily& family, const ModelParams& params,
                                    double tail_tolerance) {
  const FieldNorms norms = field_norms(params.field, tail_tolerance);
  if (!norms.l1_finite)
    throw RegimeError("the contour sandwich bound needs a summable field; ||h||_1 is infinite");
  double energy_part = 0.0;
  for (const auto& gamma : family.contours) energy_part += -2.0 * params.beta * params.J * gamma.length();
  const double weight = family_weight_log(family, params);
  const double margin = 2.0 * params.beta * norms.l1;
  SandwichCheck out;
  out.slack_low = weight - (energy_part - margin);
  out.slack_high = (energy_part + margin) - weight;
  const double eps = 1e-12 * (1.0 + std::abs(energy_part));
  out.holds = out.slack_low >= -eps && out.slack_high >= -eps;
  return out;
}

PeierlsComparison minus_bc_plus_probability_bound(const Region& region, const ModelParams& params, Site i,
                                                  Method method, const ExactLimits& limits) {
  const FieldNorms norms = field_norms(params.field);
  if (!norms.l1_finite) throw RegimeError("Peierls bound needs a summable field; ||h||_1 is infinite");
  if (!(params.J > 3.0 * norms.l1))
    throw RegimeError("Peierls regime fails: J = " + std::to_string(params.J) + " is not > 3 ||h||_1 = " +
                      std::to_string(3.0 * norms.l1));
  PeierlsComparison out;
  out.l1 = norms.l1;
  out.bound = peierls_bound(params.beta, params.J, norms.l1).value;
  out.exact = event_probability(region, BoundaryCondition::minus(), params, {{i, 1}}, method, limits);
  out.holds = out.exact <= out.bound;
  return out;
}

nlohmann::json to_json(const Contour& gamma) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : gamma.edges())
    edges.push_back({{e.from.a - 0.5, e.from.b - 0.5}, {e.to.a - 0.5, e.to.b - 0.5}});
  nlohmann::json closure = nlohmann::json::array();
  for (Site s : gamma.interior_closure()) closure.push_back({s.x, s.y});
  return {{"sign", gamma.sign() == ContourSign::plus ? "+" : "-"},
          {"length", gamma.length()},
          {"volume", gamma.volume()},
          {"edges", edges},
          {"interior_closure", closure}};
}

nlohmann::json to_json(const ContourFamily& family) {
  nlohmann::json contours = nlohmann::json::array();
  for (const auto& gamma : family.contours) contours.push_back(to_json(gamma));
  return {{"box", {{"center", {family.region.center().x, family.region.center().y}}, {"side", family.region.side()}}},
          {"contours", contours}};
}

}  // namespace ising
