#pragma once

// Brute-force checks of the deterministic erasure bounds:
//   erase the smallest triangle:   H_0(T_1 | T \ T_1)          >= zeta |T_1|^alpha
//   erase the i smallest:          H_0(T_1..T_i | rest)        >= zeta sum_{l<=i} |T_l|^alpha
//   erase one contour:             H_0(Gamma | T \ Gamma)      >= zeta/2 sum_{T in Gamma} |T|^alpha
// with zeta(alpha) = 1 - 2(2^alpha - 1).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rfim/contours.hpp"
#include "rfim/model.hpp"
#include "rfim/triangles.hpp"

namespace rfim {

/// ln 3 / ln 2 - 1, where zeta vanishes.
double alpha_critical();

/// 1 - 2(2^alpha - 1). Throws std::domain_error outside [0, alpha_critical].
double zeta(double alpha);

inline constexpr double kBoundTolerance = 1e-9;

struct BoundReport {
  double alpha = 0.0;
  double j1 = 0.0;
  double c = 0.0;
  std::size_t n = 0;
  std::uint64_t instance = 0;
  std::string check;  // erase_smallest | erase_prefix | contour
  std::size_t level = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

/// Erase the lightest triangle. Requires a non-empty family.
BoundReport check_erase_smallest(const EnergyModel& model, const TriangleFamily& family,
                                 std::uint64_t instance = 0);

/// Erase the i lightest triangles, 1 <= i <= size.
BoundReport check_erase_prefix(const EnergyModel& model, const TriangleFamily& family,
                               std::size_t i, std::uint64_t instance = 0);

/// One report per contour of the family.
std::vector<BoundReport> check_contour_bound(const EnergyModel& model,
                                             const TriangleFamily& family, SeparationConstant c,
                                             std::uint64_t instance = 0);

/// |sum_i H_0(T_i | T_{i+1..n}) - H_0(T)| for sequential erasure in mass order.
double telescoping_residual(const EnergyModel& model, const TriangleFamily& family);

struct EnergySweep {
  CouplingSpec spec;
  std::size_t n = 0;
  double c = 0.0;
  std::size_t configurations = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double min_margin_smallest = 0.0;
  double min_margin_prefix = 0.0;
  double min_margin_contour = 0.0;
  double max_telescoping_residual = 0.0;
  std::vector<BoundReport> reports;  // filled when requested

  [[nodiscard]] bool all_pass() const { return failures == 0; }
};

/// Every configuration of an n-site volume with + boundary (n <= 24).
EnergySweep verify_energy_exhaustive(const CouplingSpec& spec, std::size_t n, SeparationConstant c,
                                     bool keep_reports = false, unsigned jobs = 1);

/// Smallest j1 in the grid for which the exhaustive sweep passes, or a
/// negative value if none does.
double empirical_j1_threshold(double alpha, std::size_t n, std::span<const double> j1_grid,
                              SeparationConstant c, unsigned jobs = 1);

void write_bound_csv(std::ostream& out, std::span<const BoundReport> reports);

}  // namespace rfim
