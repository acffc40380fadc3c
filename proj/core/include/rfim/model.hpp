#pragma once

// Long-range 1D random-field Ising model on a finite interval with a
// homogeneous boundary condition.
//
//   H^tau(sigma) = H_0^tau(sigma) + theta * G(sigma)
//   H_0^tau      = 1/2 sum_{i,j in L} J(|i-j|)(1 - s_i s_j)
//                  + sum_{i in L} B_i (1 - tau s_i),   B_i = sum_{j notin L} J(|i-j|)
//   G            = -sum_i h_i s_i
//
// with J(1) = j1 and J(n) = n^(alpha-2) for n >= 2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfim {

/// Raised when an exhaustive computation would exceed its configured size cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CouplingSpec {
  double alpha = 0.55;
  double j1 = 10.0;
  double tail_tolerance = 1e-10;

  /// Throws std::domain_error unless alpha in [0,1), j1 > 1 and tolerance > 0.
  void validate() const;
};

/// J(n). Requires n >= 1.
double coupling(const CouplingSpec& spec, std::int64_t n);

/// Value of a tail sum together with a certified bound on its truncation error.
struct TailSum {
  double value = 0.0;
  double error_bound = 0.0;
  std::int64_t radius = 0;
};

/// sum_{n >= d} J(n) for d >= 1. Terms below `radius` are summed directly, the
/// rest by Euler-Maclaurin; the radius is doubled until the remainder bound
/// drops below spec.tail_tolerance.
TailSum coupling_tail(const CouplingSpec& spec, std::int64_t d, std::int64_t radius = 64);

/// Inclusive integer interval [lo, hi].
struct Volume {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  Volume() = default;
  Volume(std::int64_t lo_, std::int64_t hi_);

  /// N sites with the origin inside: [-(N/2), N - 1 - N/2].
  static Volume centered(std::size_t n);

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  [[nodiscard]] bool contains(std::int64_t site) const { return site >= lo && site <= hi; }
  [[nodiscard]] std::size_t index(std::int64_t site) const {
    return static_cast<std::size_t>(site - lo);
  }
  friend bool operator==(const Volume&, const Volume&) = default;
};

using Spin = std::int8_t;

class SpinConfiguration {
 public:
  /// All spins equal to the boundary value.
  SpinConfiguration(Volume volume, int boundary = +1);
  SpinConfiguration(Volume volume, std::vector<Spin> spins, int boundary = +1);

  /// Bit k of `bits` set means site lo + k is -1.
  static SpinConfiguration from_bits(Volume volume, std::uint64_t bits, int boundary = +1);

  [[nodiscard]] const Volume& volume() const { return volume_; }
  [[nodiscard]] int boundary() const { return boundary_; }
  [[nodiscard]] std::span<const Spin> spins() const { return spins_; }
  [[nodiscard]] std::size_t size() const { return spins_.size(); }

  /// Spin at an integer site; sites outside the volume take the boundary value.
  [[nodiscard]] int at(std::int64_t site) const;
  void set(std::int64_t site, int value);
  void flip(std::int64_t site);

  /// Global flip of all spins and of the boundary condition.
  [[nodiscard]] SpinConfiguration flipped() const;

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

 private:
  Volume volume_;
  std::vector<Spin> spins_;
  int boundary_ = +1;
};

enum class FieldDistribution { bernoulli, gaussian, subgaussian };

std::string_view to_string(FieldDistribution d);
FieldDistribution parse_field_distribution(std::string_view name);

/// One quenched realization h of the random field.
struct DisorderField {
  Volume volume;
  std::vector<double> values;
  double theta = 0.0;
  FieldDistribution distribution = FieldDistribution::bernoulli;
  std::uint64_t seed = 0;

  /// h_i is a pure function of (seed, i): realizations do not depend on the
  /// order in which sites are generated.
  static DisorderField generate(Volume volume, double theta, FieldDistribution distribution,
                                std::uint64_t seed);

  /// Bernoulli field whose bit k gives the sign at site lo + k (1 means -1).
  static DisorderField from_bits(Volume volume, std::uint64_t bits, double theta = 0.0);

  static DisorderField zeros(Volume volume);

  [[nodiscard]] double at(std::int64_t site) const { return values[volume.index(site)]; }
};

/// sum_{j notin vol} J(|i-j|). Throws std::domain_error if i is outside vol.
double boundary_field(const CouplingSpec& spec, std::int64_t i, const Volume& vol);

/// Coupling and boundary-field tables for one (spec, volume) pair. Every
/// energy evaluation in the library goes through one of these.
class EnergyModel {
 public:
  EnergyModel(const CouplingSpec& spec, Volume volume);

  [[nodiscard]] const CouplingSpec& spec() const { return spec_; }
  [[nodiscard]] const Volume& volume() const { return volume_; }

  /// J(d) for 1 <= d < N.
  [[nodiscard]] double coupling_at(std::size_t d) const { return couplings_[d]; }
  [[nodiscard]] double boundary_at(std::size_t index) const { return boundary_[index]; }
  [[nodiscard]] std::span<const double> boundary_fields() const { return boundary_; }

  [[nodiscard]] double deterministic(std::span<const Spin> spins, int boundary) const;
  [[nodiscard]] double deterministic(const SpinConfiguration& sigma) const;

  /// Energy change of flipping site `index` in the full Hamiltonian.
  [[nodiscard]] double flip_cost(std::span<const Spin> spins, int boundary, std::size_t index,
                                 std::span<const double> field, double theta) const;

 private:
  CouplingSpec spec_;
  Volume volume_;
  std::vector<double> couplings_;
  std::vector<double> boundary_;
};

double hamiltonian_deterministic(const CouplingSpec& spec, const SpinConfiguration& sigma);

/// G(sigma) = -sum_i h_i sigma_i. Throws std::domain_error on volume mismatch.
double field_energy(const SpinConfiguration& sigma, const DisorderField& h);
double field_energy(std::span<const Spin> spins, std::span<const double> h);

double hamiltonian(const CouplingSpec& spec, const SpinConfiguration& sigma,
                   const DisorderField& h, double theta);

/// mu_L^tau(sigma_site = -1) by enumerating all 2^N configurations with
/// log-sum-exp accumulation. Throws CapacityError when N > max_sites.
double exact_gibbs_marginal(const CouplingSpec& spec, const Volume& vol, const DisorderField& h,
                            double theta, double beta, std::int64_t site, int boundary = +1,
                            std::size_t max_sites = 20);

/// log(exp(a) + exp(b)) without overflow; -inf is the neutral element.
double log_add_exp(double a, double b);

}  // namespace rfim
