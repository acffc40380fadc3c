#pragma once

// Random part of the contour estimate. For a contour Gamma with mass classes
// T^(0) < ... < T^(k) and E_j = T^(0) u ... u T^(j),
//
//   F_j[h] = (1/beta) ln  sum_{Tbar} exp(-beta H_0(Tbar u Gamma \ E_j) - beta theta G(sigma(Tbar u Gamma)))
//                       / sum_{Tbar} exp(-beta H_0(Tbar u Gamma \ E_j) - beta theta G(sigma(Tbar u Gamma \ E_j)))
//
// summed over the triangle families Tbar that coexist with Gamma. Removing E_j
// flips exactly the sites D_j covered an odd number of times by E_j, so the
// denominator is the numerator evaluated at the field negated on D_j and F_j
// is odd under that sign flip.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rfim/contours.hpp"
#include "rfim/model.hpp"
#include "rfim/triangles.hpp"

namespace rfim {

/// Sorted set of sites.
class FlipSet {
 public:
  FlipSet() = default;
  explicit FlipSet(std::vector<std::int64_t> sites);

  [[nodiscard]] std::span<const std::int64_t> sites() const { return sites_; }
  [[nodiscard]] std::size_t size() const { return sites_.size(); }
  [[nodiscard]] bool empty() const { return sites_.empty(); }
  [[nodiscard]] bool contains(std::int64_t site) const;

  /// Sites of the union of the bases.
  static FlipSet support(const TriangleFamily& family);

  friend bool operator==(const FlipSet&, const FlipSet&) = default;

 private:
  std::vector<std::int64_t> sites_;
};

/// Symmetric difference: S_a S_b = S_{compose(a, b)}.
FlipSet compose(const FlipSet& a, const FlipSet& b);

/// (S_A h)_i = -h_i for i in A. Throws std::domain_error if A leaves the volume.
DisorderField flip_field(const DisorderField& h, const FlipSet& a);

/// D_j: sites covered an odd number of times by the classes 0..j.
/// Throws std::domain_error unless 0 <= j <= top_level.
FlipSet flip_composition(const Contour& g, int j);

/// A_i = (zeta/4) sum_{l<=i} n_l Delta_l^alpha.
struct PeierlsThresholds {
  double zeta = 0.0;
  std::vector<double> a;

  static PeierlsThresholds of(const Contour& g, double alpha);
  [[nodiscard]] std::size_t levels() const { return a.size(); }
};

/// Every configuration of a small volume whose triangles include Gamma, with
/// the deterministic energies and spin images needed by F_j precomputed.
class ConstrainedEnsemble {
 public:
  ConstrainedEnsemble(const CouplingSpec& spec, const Contour& gamma, Volume volume,
                      std::size_t max_sites = 12);

  [[nodiscard]] const Contour& contour() const { return gamma_; }
  [[nodiscard]] const Volume& volume() const { return volume_; }
  [[nodiscard]] const CouplingSpec& spec() const { return spec_; }
  [[nodiscard]] int levels() const { return static_cast<int>(flips_.size()); }
  [[nodiscard]] std::size_t size() const { return members_; }
  [[nodiscard]] const FlipSet& flips(int j) const { return flips_.at(static_cast<std::size_t>(j)); }

  /// Spin image of member k with and without E_j.
  [[nodiscard]] std::span<const Spin> full_spins(std::size_t k) const;
  [[nodiscard]] std::span<const Spin> reduced_spins(std::size_t k, int j) const;
  [[nodiscard]] double reduced_energy(std::size_t k, int j) const;

  /// Requires beta > 0. theta = 0 gives exactly 0.
  [[nodiscard]] double F(int j, std::span<const double> h, double theta, double beta) const;
  [[nodiscard]] std::vector<double> F_all(std::span<const double> h, double theta,
                                          double beta) const;

 private:
  CouplingSpec spec_;
  Contour gamma_;
  Volume volume_;
  std::size_t members_ = 0;
  std::vector<FlipSet> flips_;
  std::vector<Spin> full_;                  // members x N
  std::vector<Spin> reduced_;               // levels x members x N
  std::vector<double> energy_;              // levels x members
};

double F_j(const CouplingSpec& spec, const Contour& gamma, int j, Volume volume,
           const DisorderField& h, double theta, double beta);

struct AntisymmetryReport {
  int level = 0;
  std::size_t realizations = 0;
  double max_abs_sum = 0.0;  // max |F_j[h] + F_j[S_{D_j} h]|
  double mean = 0.0;         // average of F_j over the realizations
  bool pass = false;
};

inline constexpr double kAntisymmetryTolerance = 1e-9;

/// All 2^N Bernoulli fields.
AntisymmetryReport check_antisymmetry(const ConstrainedEnsemble& ens, int j, double theta,
                                      double beta);

/// Antithetic pairs (h, S_{D_j} h) with h drawn from `distribution`.
AntisymmetryReport check_antisymmetry_antithetic(const ConstrainedEnsemble& ens, int j,
                                                 double theta, double beta,
                                                 FieldDistribution distribution,
                                                 std::size_t pairs, std::uint64_t seed);

/// min(beta zeta / 4, zeta^2 / (2^10 theta^2)); theta = 0 keeps the first term.
double b_bar(double beta, double theta, double alpha);

/// Indicators of B_{-1}, B_0, ..., B_k (index j + 1), each evaluated from its
/// own definition.
std::vector<bool> event_indicators(std::span<const double> f, const PeierlsThresholds& a);

/// exp(-zeta^2 / (2^10 theta^2) sum_{l=j+1}^{k} n_l Delta_l^(2 alpha - 1)).
double event_bound(const Contour& g, int j, double alpha, double theta);

struct EventEstimate {
  int j = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  bool pass = false;  // estimate <= bound, within 3 standard errors for sampling
};

struct EventReport {
  std::vector<EventEstimate> events;  // j = -1 .. k
  std::size_t realizations = 0;
  bool exhaustive = false;
  std::size_t partition_failures = 0;  // fields whose indicators do not sum to 1
  double total_probability = 0.0;
};

/// Exhaustive over Bernoulli fields when `samples` is 0 and 2^N <= 2^20;
/// otherwise `samples` draws (default 10^5) from `distribution`.
EventReport estimate_event_probabilities(const ConstrainedEnsemble& ens, double theta,
                                         double beta, std::size_t samples = 0,
                                         FieldDistribution distribution =
                                             FieldDistribution::bernoulli,
                                         std::uint64_t seed = 0);

/// Columns instance,j,estimate,stderr,bound,pass.
void write_event_csv(std::ostream& out, std::span<const EventReport> reports);

/// Two nested classes on the 10-site centred volume: a mass-5 triangle over
/// sites -2..2 around a mass-1 triangle at 0.
TriangleFamily nested_two_class_example();

}  // namespace rfim
