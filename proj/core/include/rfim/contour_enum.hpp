#pragma once

// Enumeration of contours of fixed mass through the origin, and the desk-scale
// entropy certificate
//   sum_{0 in Gamma, |Gamma| = m} prod_{T in Gamma} e^{-b |T|^gamma} <= 2m e^{-b m^gamma}.
//
// Shapes are built bottom-up: the last merge that produced a contour joined
// two clusters that are themselves single contours of their own triangles, so
// every contour of mass m is a union A u (B + t) of smaller shapes that fail
// the separation test. Candidates only need the pairwise admissibility rules
// while growing; realizability is checked at the end.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rfim/contours.hpp"
#include "rfim/triangles.hpp"

namespace rfim {

struct WeightSpec {
  double b = 1.0;
  double gamma = 0.1;

  /// Throws std::domain_error unless both are finite and positive.
  void validate() const;
};

inline constexpr int kEnumerationCap = 6;

/// C m^3 (m + 1): no triangle of a mass-m contour through 0 reaches further.
std::int64_t enumeration_window(std::int64_t m, SeparationConstant c);

class ContourEnumerator {
 public:
  explicit ContourEnumerator(SeparationConstant c = {}, int cap = kEnumerationCap,
                             unsigned jobs = 1);

  [[nodiscard]] SeparationConstant separation() const { return c_; }
  [[nodiscard]] int cap() const { return cap_; }

  /// Single contours of mass m built from pairwise admissible triangles,
  /// translated so the leftmost bond is 0. Memoized.
  const std::vector<TriangleFamily>& admissible_shapes(int m);

  /// The realizable subset of admissible_shapes(m).
  std::vector<TriangleFamily> shapes(int m);

  /// Every realizable single contour of mass m with a triangle covering 0,
  /// restricted to the window [-W(m), W(m)]. Sorted, no duplicates.
  std::vector<Contour> origin_contours(int m);

 private:
  void check_cap(int m) const;

  SeparationConstant c_;
  int cap_;
  unsigned jobs_;
  std::map<int, std::vector<TriangleFamily>> admissible_;
};

/// Throws CapacityError when m exceeds the cap.
std::vector<Contour> enumerate_origin_contours(int m, SeparationConstant c = {},
                                               int cap = kEnumerationCap, unsigned jobs = 1);

/// sum_{T in Gamma} |T|^gamma
double power_mass(const TriangleFamily& family, double gamma);

/// prod_{T in Gamma} e^{-b |T|^gamma}
double contour_weight(const Contour& g, const WeightSpec& w);

double weight_sum(std::span<const Contour> contours, const WeightSpec& w);
double weight_sum(int m, const WeightSpec& w, SeparationConstant c = {},
                  int cap = kEnumerationCap);

/// 2m e^{-b m^gamma}
double entropy_bound(int m, const WeightSpec& w);

struct CertificateRow {
  int m = 0;
  double b = 0.0;
  double gamma = 0.0;
  double weight_sum = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct C0Certificate {
  double gamma = 0.0;
  int m_max = 0;
  double c = 0.0;
  std::vector<double> b_grid;
  std::vector<std::size_t> contour_counts;  // index m - 1
  std::vector<CertificateRow> rows;         // ordered by (m, b)
  /// Smallest grid b from which the bound holds for every larger grid b and
  /// every m <= m_max; empty when it fails at the largest grid value.
  std::optional<double> b_star;
};

/// {1, 2, ..., 50}
std::vector<double> default_b_grid();

C0Certificate certify_C0(double gamma, int m_max, std::span<const double> b_grid,
                         SeparationConstant c = {}, int cap = kEnumerationCap, unsigned jobs = 1);

/// Columns m,b,gamma,weight_sum,bound,pass.
void write_certificate_csv(std::ostream& out, const C0Certificate& cert);

}  // namespace rfim
