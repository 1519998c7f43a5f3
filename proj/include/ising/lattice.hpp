#pragma once

#include <compare>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace ising {

struct Site {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Site&, const Site&) = default;
  friend constexpr Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
};

// Graph metric on Z^2.
inline int distance(Site a, Site b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

std::string to_string(Site s);

inline std::ostream& operator<<(std::ostream& os, Site s) { return os << '(' << s.x << ',' << s.y << ')'; }

inline constexpr Site kNeighborOffsets[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

// A point of the dual lattice Z^2 + (1/2, 1/2). Vertex (a, b) sits at
// (a - 1/2, b - 1/2), i.e. the lower-left corner of the plaquette of site (a, b).
struct DualVertex {
  int a = 0;
  int b = 0;

  friend constexpr auto operator<=>(const DualVertex&, const DualVertex&) = default;
};

inline std::ostream& operator<<(std::ostream& os, DualVertex v) {
  return os << '(' << v.a - 0.5 << ',' << v.b - 0.5 << ')';
}

// Square box of sites together with its graph-distance-1 boundary and the
// corners of its dual plaquettes. Sites are indexed row-major from the
// lower-left corner.
class Region {
 public:
  Region(Site center, int side);

  Site center() const { return center_; }
  int side() const { return side_; }
  int x_lo() const { return x_lo_; }
  int y_lo() const { return y_lo_; }
  int x_hi() const { return x_lo_ + side_ - 1; }
  int y_hi() const { return y_lo_ + side_ - 1; }
  std::size_t size() const { return static_cast<std::size_t>(side_) * side_; }

  bool contains(Site s) const {
    return s.x >= x_lo_ && s.x <= x_hi() && s.y >= y_lo_ && s.y <= y_hi();
  }
  bool on_boundary(Site s) const { return !contains(s) && boundary_distance(s) == 1; }

  std::size_t index(Site s) const {
    return static_cast<std::size_t>(s.y - y_lo_) * side_ + (s.x - x_lo_);
  }
  Site site(std::size_t index) const {
    return {x_lo_ + static_cast<int>(index % side_), y_lo_ + static_cast<int>(index / side_)};
  }

  std::vector<Site> sites() const;
  // Ordered bottom row, top row, left column, right column.
  std::vector<Site> boundary() const;
  std::vector<DualVertex> dual_sites() const;
  // Whether the dual vertex is a plaquette corner of some site of the box.
  bool contains_dual(DualVertex v) const {
    return v.a >= x_lo_ && v.a <= x_hi() + 1 && v.b >= y_lo_ && v.b <= y_hi() + 1;
  }

  // Nested box of the given side sharing this box's center.
  Region resized(int side) const { return Region(center_, side); }

  friend bool operator==(const Region& a, const Region& b) {
    return a.center_ == b.center_ && a.side_ == b.side_;
  }

 private:
  int boundary_distance(Site s) const;

  Site center_;
  int side_;
  int x_lo_;
  int y_lo_;
};

Region make_box(Site center, int side);

// Corners of the dual plaquette p*(i).
inline std::vector<DualVertex> plaquette_corners(Site s) {
  return {{s.x, s.y}, {s.x + 1, s.y}, {s.x, s.y + 1}, {s.x + 1, s.y + 1}};
}

}  // namespace ising

template <>
struct std::hash<ising::Site> {
  std::size_t operator()(const ising::Site& s) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(s.x) << 32) ^ static_cast<unsigned>(s.y));
  }
};
