#pragma once

// Contours: clusters of triangles that are far from every other cluster
// relative to the cube of their mass. Built by merging singleton clusters
// until every pair satisfies the separation alternatives.

#include <cstdint>
#include <span>
#include <vector>

#include "rfim/triangles.hpp"

namespace rfim {

/// All triangles of one mass inside a contour.
struct MassClass {
  std::int64_t mass = 0;
  std::vector<Triangle> members;

  [[nodiscard]] std::size_t count() const { return members.size(); }
  friend bool operator==(const MassClass&, const MassClass&) = default;
};

class Contour {
 public:
  Contour() = default;
  explicit Contour(TriangleFamily triangles);

  [[nodiscard]] const TriangleFamily& triangles() const { return triangles_; }
  /// Smallest triangle whose basis contains every member.
  [[nodiscard]] const Triangle& enclosing() const { return enclosing_; }
  [[nodiscard]] std::int64_t x_minus() const { return enclosing_.first_site(); }
  [[nodiscard]] std::int64_t x_plus() const { return enclosing_.last_site(); }
  [[nodiscard]] std::int64_t mass() const { return mass_; }
  /// Mass classes in strictly increasing mass order.
  [[nodiscard]] const std::vector<MassClass>& classes() const { return classes_; }
  /// Index of the largest class (k in the level numbering 0..k).
  [[nodiscard]] int top_level() const { return static_cast<int>(classes_.size()) - 1; }
  /// Some member's basis contains the site.
  [[nodiscard]] bool covers(std::int64_t site) const;
  [[nodiscard]] Contour shifted(std::int64_t k) const { return Contour(triangles_.shifted(k)); }

  friend bool operator==(const Contour& a, const Contour& b) { return a.triangles_ == b.triangles_; }
  friend auto operator<=>(const Contour& a, const Contour& b) { return a.triangles_ <=> b.triangles_; }

 private:
  TriangleFamily triangles_;
  Triangle enclosing_;
  std::int64_t mass_ = 0;
  std::vector<MassClass> classes_;
};

struct SeparationConstant {
  double value = 3.0;
};

/// sum_{m>=1} 4m / [C m]^3 evaluated to `terms` terms plus an integral bound
/// on the rest.
struct SeparationSeries {
  double constant = 0.0;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  std::int64_t terms = 0;

  [[nodiscard]] double upper() const { return partial_sum + tail_bound; }
  /// Certified: partial + tail <= 1/2.
  [[nodiscard]] bool satisfied() const { return upper() <= 0.5; }
  /// Certified: partial alone > 1/2.
  [[nodiscard]] bool violated() const { return partial_sum > 0.5; }
};

SeparationSeries separation_series(double c, std::int64_t terms = 1'000'000);

/// Smallest integer C whose series is certified <= 1/2.
SeparationConstant choose_C();

/// min over member pairs of triangle_distance.
std::int64_t contour_distance(const Contour& a, const Contour& b);

/// The separation alternatives for one pair of distinct contours:
///  - disjoint enclosures: dist > C min(|a|^3, |b|^3);
///  - nested enclosures: every triangle of the outer contour contains or
///    misses the inner enclosure, and dist > C |inner|^3;
///  - anything else violates.
bool well_separated(const Contour& a, const Contour& b, SeparationConstant c);

/// Merge to fixed point, always merging the violating pair with the smallest
/// (left endpoint, mass) key. Output sorted by left endpoint.
std::vector<Contour> contours(const TriangleFamily& family, SeparationConstant c = {});

/// Same fixed point reached by merging a uniformly chosen violating pair at
/// every step.
std::vector<Contour> contours_random_schedule(const TriangleFamily& family, SeparationConstant c,
                                              std::uint64_t seed);

/// Every pair of distinct contours is well separated.
bool verify_separation(std::span<const Contour> contours, SeparationConstant c);

/// Decomposing the union of mutually separated families gives the union of
/// their decompositions. Throws std::domain_error when some pair of contours
/// from different families is not well separated.
bool verify_independence(std::span<const TriangleFamily> families, SeparationConstant c);

/// sum_l n_l Delta_l^rho.
double contour_power_mass(const Contour& g, double rho);

}  // namespace rfim
