#pragma once

// Single-site Metropolis sampling of the finite-volume Gibbs measure with
// long-range couplings. Each site keeps its local sum
//   L_i = sum_{j != i} J(|i - j|) sigma_j + tau B_i,
// so a proposal costs O(1) and an accepted flip O(N).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rfim/contours.hpp"
#include "rfim/model.hpp"
#include "rfim/rng.hpp"

namespace rfim {

struct RunConfig {
  double alpha = 0.55;
  double beta = 1.0;
  double theta = 0.05;
  double j1 = 10.0;
  std::size_t size = 512;
  std::size_t sweeps = 10'000;
  std::size_t burnin = 1'000;
  std::uint64_t seed = 0;
  int boundary = +1;
  std::size_t realizations = 64;
  FieldDistribution distribution = FieldDistribution::bernoulli;
  double c = 3.0;  // separation constant for the contour statistics
  unsigned jobs = 1;

  [[nodiscard]] CouplingSpec spec() const { return {alpha, j1, 1e-10}; }
  [[nodiscard]] Volume volume() const { return Volume::centered(size); }
  /// Throws std::domain_error on an invalid combination.
  void validate() const;
};

/// Proposals between two full energy recomputations.
inline constexpr std::size_t kDriftInterval = 10'000;
inline constexpr double kDriftTolerance = 1e-6;

class MetropolisChain {
 public:
  MetropolisChain(const EnergyModel& model, std::span<const double> field, double theta,
                  double beta, int boundary, std::uint64_t seed);

  /// Start from an arbitrary configuration instead of the boundary state.
  void reset(std::span<const Spin> spins);

  /// Energy change of flipping site index i.
  [[nodiscard]] double flip_cost(std::size_t i) const;
  /// One proposal at site index i; returns whether it was accepted.
  bool propose(std::size_t i);
  /// N proposals at uniformly drawn sites. Drawing with replacement keeps the
  /// chain aperiodic at beta = 0, where an ordered pass would flip every spin.
  void sweep();

  [[nodiscard]] std::span<const Spin> spins() const { return spins_; }
  [[nodiscard]] double energy() const { return energy_; }
  [[nodiscard]] double recomputed_energy() const;
  /// Largest |incremental - recomputed| seen by the drift guard.
  [[nodiscard]] double max_drift() const { return max_drift_; }
  [[nodiscard]] std::size_t drift_checks() const { return drift_checks_; }
  [[nodiscard]] std::size_t accepted() const { return accepted_; }
  [[nodiscard]] std::size_t proposals() const { return proposals_; }
  [[nodiscard]] std::size_t minus_count() const { return minus_; }

 private:
  void rebuild();
  void guard();

  const EnergyModel* model_;
  std::vector<double> field_;
  double theta_;
  double beta_;
  int boundary_;
  SplitMix64 rng_;
  std::vector<Spin> spins_;
  std::vector<double> local_;
  double energy_ = 0.0;
  double max_drift_ = 0.0;
  std::size_t drift_checks_ = 0;
  std::size_t accepted_ = 0;
  std::size_t proposals_ = 0;
  std::size_t since_check_ = 0;
  std::size_t minus_ = 0;
};

struct ChainEstimate {
  std::uint64_t field_seed = 0;
  std::uint64_t chain_seed = 0;
  double estimate = 0.0;        // occupation fraction of sigma_0 = -1
  double standard_error = 0.0;  // batch means
  std::size_t samples = 0;
  std::size_t minus_at_origin = 0;
  std::size_t contour_at_origin = 0;
  std::size_t basic1_violations = 0;  // sigma_0 = -1 with no contour through 0
  double acceptance = 0.0;
  double max_drift = 0.0;
  std::size_t drift_checks = 0;
};

/// Batch-means standard error of the mean of a 0/1 series (32 batches).
double batch_means_error(std::span<const std::uint8_t> series);

/// Some contour of the configuration contains a triangle covering the site.
/// Runs the contour decomposition for families up to `contour_limit`
/// triangles; larger families use the equivalent triangle test.
bool contour_covers(const TriangleFamily& family, std::int64_t site, SeparationConstant c,
                    std::size_t contour_limit = 32);

ChainEstimate metropolis_run(const RunConfig& config, const DisorderField& h,
                             std::uint64_t chain_seed);

struct RunReport {
  RunConfig config;
  std::vector<ChainEstimate> realizations;
  double mean = 0.0;
  double standard_error = 0.0;
  double contour_fraction = 0.0;
  std::size_t basic1_violations = 0;
  double max_drift = 0.0;
  double b_bar = 0.0;
  double reference_100 = 0.0;  // e^{-b_bar/100}
  double reference_200 = 0.0;  // e^{-b_bar/200}
};

/// Field seed hash_combine(seed, 2r), chain seed hash_combine(seed, 2r + 1)
/// for realization r. theta = 0 runs one chain on the zero field and repeats it.
RunReport disorder_sweep(const RunConfig& config);

struct DecompositionCheck {
  std::size_t samples = 0;
  std::size_t minus_at_origin = 0;
  std::size_t contour_at_origin = 0;
  std::size_t violations = 0;

  [[nodiscard]] bool holds() const { return violations == 0; }
  [[nodiscard]] double minus_frequency() const;
  [[nodiscard]] double contour_frequency() const;
};

DecompositionCheck peierls_decomposition_check(const RunConfig& config,
                                               std::span<const SpinConfiguration> samples);

/// One row per realization plus a final average row.
void write_run_csv(std::ostream& out, const RunReport& report);

}  // namespace rfim
