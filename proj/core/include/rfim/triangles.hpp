#pragma once

// Geometric description of configurations with + boundary: every sign change
// (interface) sits at a perturbed half-integer point, each point grows a
// V-line, and the first pair of facing lines to meet freezes into a triangle.
// Repeating until no free point is left maps a configuration one-to-one onto a
// family of non-crossing triangles.

#include <boost/rational.hpp>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "rfim/model.hpp"

namespace rfim {

using Rational = boost::rational<std::int64_t>;
__extension__ typedef __int128 Int128;

/// Interface offsets for one volume. Bond x sits between sites x and x+1;
/// the bonds of volume [lo, hi] are lo-1 .. hi. Offsets are
///
///   s_x = -(x - c)^2 / (100 M),  c = lo - 1,  M = N^2,
///
/// so |s_x| <= 1/100 and the distance between bonds a < b is
/// (b - a)(100 M - (a + b - 2c)) / (100 M). Distances of distinct pairs never
/// coincide; pairs with equal integer gap are ordered by a + b, the same way in
/// every volume.
class OffsetTable {
 public:
  explicit OffsetTable(const Volume& volume);

  [[nodiscard]] std::int64_t first_bond() const { return center_; }
  [[nodiscard]] std::int64_t last_bond() const { return center_ + span_; }
  [[nodiscard]] bool has_bond(std::int64_t bond) const {
    return bond >= first_bond() && bond <= last_bond();
  }

  [[nodiscard]] Rational offset(std::int64_t bond) const;
  [[nodiscard]] Rational position(std::int64_t bond) const;

  /// |position(b) - position(a)| scaled by 100 M. Exact.
  [[nodiscard]] Int128 scaled_distance(std::int64_t a, std::int64_t b) const;

  /// Three-way comparison of |p(a) - p(b)| against |p(c) - p(d)|.
  [[nodiscard]] std::strong_ordering compare_distance(std::int64_t a, std::int64_t b,
                                                      std::int64_t c, std::int64_t d) const;

 private:
  std::int64_t center_;
  std::int64_t span_;
  Int128 scale_;  // 100 M
};

OffsetTable assign_offsets(const Volume& volume);

struct InterfacePoint {
  std::int64_t bond = 0;
  Rational offset;

  [[nodiscard]] Rational position() const { return Rational(2 * bond + 1, 2) + offset; }
};

/// A coupled pair of interface bonds. The basis covers the integer sites
/// left+1 .. right, so the mass is right - left.
struct Triangle {
  std::int64_t left = 0;
  std::int64_t right = 0;

  [[nodiscard]] std::int64_t mass() const { return right - left; }
  [[nodiscard]] std::int64_t first_site() const { return left + 1; }
  [[nodiscard]] std::int64_t last_site() const { return right; }
  [[nodiscard]] bool covers(std::int64_t site) const { return site > left && site <= right; }
  /// Basis of `other` lies inside this basis.
  [[nodiscard]] bool encloses(const Triangle& other) const {
    return left <= other.left && other.right <= right;
  }
  [[nodiscard]] bool disjoint(const Triangle& other) const {
    return right <= other.left || other.right <= left;
  }
  [[nodiscard]] Triangle shifted(std::int64_t k) const { return {left + k, right + k}; }

  friend auto operator<=>(const Triangle&, const Triangle&) = default;
};

/// min |bond difference| over the four endpoint pairs.
std::int64_t triangle_distance(const Triangle& a, const Triangle& b);

/// Finite set of triangles, kept sorted by (left, right).
class TriangleFamily {
 public:
  TriangleFamily() = default;
  TriangleFamily(std::initializer_list<Triangle> triangles);
  explicit TriangleFamily(std::vector<Triangle> triangles);

  [[nodiscard]] std::size_t size() const { return triangles_.size(); }
  [[nodiscard]] bool empty() const { return triangles_.empty(); }
  [[nodiscard]] auto begin() const { return triangles_.begin(); }
  [[nodiscard]] auto end() const { return triangles_.end(); }
  [[nodiscard]] const Triangle& operator[](std::size_t i) const { return triangles_[i]; }
  [[nodiscard]] std::span<const Triangle> triangles() const { return triangles_; }

  [[nodiscard]] bool contains(const Triangle& t) const;
  [[nodiscard]] bool includes(const TriangleFamily& other) const;
  [[nodiscard]] std::int64_t total_mass() const;

  void insert(const Triangle& t);
  [[nodiscard]] TriangleFamily united(const TriangleFamily& other) const;
  [[nodiscard]] TriangleFamily without(const TriangleFamily& other) const;
  [[nodiscard]] TriangleFamily shifted(std::int64_t k) const;

  /// Triangles ordered by increasing mass, ties by position.
  [[nodiscard]] std::vector<Triangle> by_mass() const;

  friend bool operator==(const TriangleFamily&, const TriangleFamily&) = default;
  friend auto operator<=>(const TriangleFamily&, const TriangleFamily&) = default;

 private:
  std::vector<Triangle> triangles_;
};

/// Sign changes of a + boundary configuration, left to right.
std::vector<InterfacePoint> interfaces(const SpinConfiguration& sigma);

/// Collision construction on sorted interface bonds. Throws std::logic_error
/// for an odd number of bonds.
TriangleFamily pair_interfaces(std::span<const std::int64_t> bonds, const OffsetTable& table);

/// Throws std::domain_error unless the boundary is +1.
TriangleFamily spins_to_triangles(const SpinConfiguration& sigma);

/// sigma_i = (-1)^(number of triangles covering i) on a + background.
/// Throws std::domain_error if a triangle leaves the volume.
SpinConfiguration triangles_to_spins(const TriangleFamily& family, const Volume& volume);

/// Smallest volume containing every basis; the family must be non-empty.
Volume bounding_volume(const TriangleFamily& family);

/// True if the family is exactly what the construction produces from its own
/// spin image.
bool is_realizable(const TriangleFamily& family, const Volume& volume);
bool is_realizable(const TriangleFamily& family);

/// a and b can coexist: their union is realizable.
bool is_compatible(const TriangleFamily& a, const TriangleFamily& b, const Volume& volume);
bool is_compatible(const TriangleFamily& a, const TriangleFamily& b);

/// Pairwise rule dist(T, T') >= min(|T|, |T'|).
bool satisfies_separation_rule(const TriangleFamily& family);

/// Necessary conditions for membership in a realizable family: distinct
/// endpoints, bases nested or disjoint, and the pairwise separation rule.
bool pairwise_admissible(const Triangle& a, const Triangle& b);

/// H(s u rest) - H(rest) on the spin images. Throws std::domain_error when s
/// and rest are not compatible in the model's volume.
double energy_difference(const EnergyModel& model, const TriangleFamily& s,
                         const TriangleFamily& rest, const DisorderField& h, double theta);
double energy_difference(const CouplingSpec& spec, const Volume& volume, const TriangleFamily& s,
                         const TriangleFamily& rest, const DisorderField& h, double theta);

/// Spin image written into a caller-provided buffer (no allocation).
void paint_spins(const TriangleFamily& family, const Volume& volume, std::span<Spin> out);

}  // namespace rfim
