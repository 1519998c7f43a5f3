#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ising/gibbs.hpp"
#include "ising/lattice.hpp"

namespace ising {

// Unit segment of the dual lattice; endpoints stored in increasing order.
struct DualEdge {
  DualVertex from;
  DualVertex to;

  DualEdge() = default;
  DualEdge(DualVertex a, DualVertex b) : from(std::min(a, b)), to(std::max(a, b)) {}

  bool vertical() const { return from.a == to.a; }
  friend auto operator<=>(const DualEdge&, const DualEdge&) = default;
};

// Dual edge crossing the bond between neighbouring sites a and b.
DualEdge dual_of_bond(Site a, Site b);

enum class ContourSign : std::int8_t { minus = -1, plus = 1 };

// Closed dual loop separating opposite spins. Sites of interior_closure are
// the ones enclosed by the loop; interior drops those within Euclidean
// distance 1 of it.
class Contour {
 public:
  Contour(std::vector<DualVertex> path, ContourSign sign);

  const std::vector<DualVertex>& path() const { return path_; }
  // Sorted; identifies the contour.
  const std::vector<DualEdge>& edges() const { return edges_; }
  int length() const { return static_cast<int>(edges_.size()); }
  ContourSign sign() const { return sign_; }
  const std::vector<Site>& interior_closure() const { return closure_; }
  const std::vector<Site>& interior() const { return interior_; }
  std::size_t volume() const { return closure_.size(); }

  // Sites just inside the loop, one per edge (with repeats removed).
  std::vector<Site> inner_edge_sites() const;

  friend bool operator==(const Contour& a, const Contour& b) {
    return a.sign_ == b.sign_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<DualVertex> path_;
  std::vector<DualEdge> edges_;
  ContourSign sign_;
  std::vector<Site> closure_;
  std::vector<Site> interior_;
};

struct ContourFamily {
  Region region;
  // Ordered by smallest edge.
  std::vector<Contour> contours;

  friend bool operator==(const ContourFamily& a, const ContourFamily& b) {
    return a.region == b.region && a.contours == b.contours;
  }
};

// Contours of a configuration with minus boundary spins. At a dual vertex
// where four edges meet, north pairs with east and south with west.
ContourFamily extract_contours(const SpinConfiguration& config);

// Inverse of extract_contours. Throws InvalidFamily when contours overlap,
// leave the dual box, disagree with the corner rule, or carry the wrong sign.
SpinConfiguration reconstruct_configuration(const ContourFamily& family);

// log xi(gamma) = -2 beta J |gamma| -+ 2 beta sum_{closure} h for minus/plus
// contours.
double contour_weight_log(const Contour& gamma, const ModelParams& params);

// Sum of log xi over a family, i.e. -beta times the normalized minus energy.
double family_weight_log(const ContourFamily& family, const ModelParams& params);

// log(1 + sum over non-empty compatible families of prod xi), enumerated
// through the configuration bijection.
double log_partition_contour(const Region& region, const ModelParams& params, const ExactLimits& limits = {});

// gamma involves i when i lies in the closure of its interior.
bool involves(const Contour& gamma, Site i);
// gamma involves other when every site other involves is involved by gamma.
bool involves(const Contour& gamma, const Contour& other);

struct NestingForest {
  // Index of the smallest contour strictly enclosing each contour, or -1.
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<int> roots;

  int depth(int node) const;
};

NestingForest nesting_forest(const ContourFamily& family);

// Whether the spins on closure \ interior of every contour are single
// valued in the given configuration. Returns the indices of contours where
// they are not.
std::vector<int> ambiguous_type_contours(const ContourFamily& family, const SpinConfiguration& config);

struct SandwichCheck {
  bool holds = false;
  double slack_low = 0.0;
  double slack_high = 0.0;
};

// Checks exp(-2 beta l1) prod e^{-2 beta J |g|} <= prod xi <= exp(2 beta l1)
// prod e^{-2 beta J |g|} in log form. Throws RegimeError for fields that
// are not summable.
SandwichCheck sandwich_check(const ContourFamily& family, const ModelParams& params,
                                    double tail_tolerance = 1e-12);

struct PeierlsComparison {
  double exact = 0.0;
  double bound = 0.0;
  double l1 = 0.0;
  bool holds = false;
};

// Exact mu^-(s_i = +1) against the Peierls series bound. Requires
// J > 3 ||h||_1 and 3 exp(-2 beta J) < 1.
PeierlsComparison minus_bc_plus_probability_bound(const Region& region, const ModelParams& params, Site i,
                                                  Method method = Method::transfer,
                                                  const ExactLimits& limits = {});

nlohmann::json to_json(const Contour& gamma);
nlohmann::json to_json(const ContourFamily& family);

}  // namespace ising
