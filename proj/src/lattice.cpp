#include "ising/lattice.hpp"

#include <algorithm>

#include "ising/error.hpp"

namespace ising {

std::string to_string(Site s) { return std::to_string(s.x) + "," + std::to_string(s.y); }

Region::Region(Site center, int side) : center_(center), side_(side) {
  if (side < 1) throw InvalidRegion("box side must be at least 1, got " + std::to_string(side));
  // Even sides put the center in the upper-right quadrant of the middle.
  x_lo_ = center.x - (side - 1) / 2;
  y_lo_ = center.y - (side - 1) / 2;
}

int Region::boundary_distance(Site s) const {
  int dx = std::max({x_lo_ - s.x, s.x - x_hi(), 0});
  int dy = std::max({y_lo_ - s.y, s.y - y_hi(), 0});
  return dx + dy;
}

std::vector<Site> Region::sites() const {
  std::vector<Site> out;
  out.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) out.push_back(site(k));
  return out;
}

std::vector<Site> Region::boundary() const {
  std::vector<Site> out;
  out.reserve(4 * static_cast<std::size_t>(side_));
  for (int x = x_lo_; x <= x_hi(); ++x) out.push_back({x, y_lo_ - 1});
  for (int x = x_lo_; x <= x_hi(); ++x) out.push_back({x, y_hi() + 1});
  for (int y = y_lo_; y <= y_hi(); ++y) out.push_back({x_lo_ - 1, y});
  for (int y = y_lo_; y <= y_hi(); ++y) out.push_back({x_hi() + 1, y});
  return out;
}

std::vector<DualVertex> Region::dual_sites() const {
  std::vector<DualVertex> out;
  out.reserve(static_cast<std::size_t>(side_ + 1) * (side_ + 1));
  for (int b = y_lo_; b <= y_hi() + 1; ++b)
    for (int a = x_lo_; a <= x_hi() + 1; ++a) out.push_back({a, b});
  return out;
}

Region make_box(Site center, int side) { return Region(center, side); }

}  // namespace ising
