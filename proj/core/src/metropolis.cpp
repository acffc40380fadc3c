#include "rfim/metropolis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rfim/csv.hpp"
#include "rfim/disorder.hpp"
#include "rfim/energy_bounds.hpp"
#include "rfim/parallel.hpp"
#include "rfim/triangles.hpp"

namespace rfim {

void RunConfig::validate() const {
  spec().validate();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::domain_error("beta must be >= 0");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::domain_error("theta must be >= 0");
  if (size < 1) throw std::domain_error("size must be >= 1");
  if (!(sweeps > burnin)) throw std::domain_error("sweeps must exceed burn-in");
  if (realizations < 1) throw std::domain_error("realizations must be >= 1");
  if (boundary != 1 && boundary != -1) throw std::domain_error("boundary must be +1 or -1");
  if (!(c > 0.0)) throw std::domain_error("separation constant must be positive");
}

MetropolisChain::MetropolisChain(const EnergyModel& model, std::span<const double> field,
                                 double theta, double beta, int boundary, std::uint64_t seed)
    : model_(&model),
      field_(field.begin(), field.end()),
      theta_(theta),
      beta_(beta),
      boundary_(boundary),
      rng_(seed),
      spins_(model.volume().size(), static_cast<Spin>(boundary)),
      local_(spins_.size()) {
  if (field_.empty()) field_.assign(spins_.size(), 0.0);
  if (field_.size() != spins_.size()) throw std::domain_error("MetropolisChain: field size");
  rebuild();
}

void MetropolisChain::reset(std::span<const Spin> spins) {
  if (spins.size() != spins_.size()) throw std::domain_error("MetropolisChain: size mismatch");
  spins_.assign(spins.begin(), spins.end());
  rebuild();
}

void MetropolisChain::rebuild() {
  const std::size_t n = spins_.size();
  minus_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = boundary_ * model_->boundary_at(i);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += model_->coupling_at(i > j ? i - j : j - i) * spins_[j];
    local_[i] = s;
    minus_ += spins_[i] < 0 ? 1 : 0;
  }
  energy_ = recomputed_energy();
}

double MetropolisChain::recomputed_energy() const {
  return model_->deterministic(spins_, boundary_) + theta_ * field_energy(spins_, field_);
}

double MetropolisChain::flip_cost(std::size_t i) const {
  return 2.0 * spins_[i] * (local_[i] + theta_ * field_[i]);
}

void MetropolisChain::guard() {
  const double exact = recomputed_energy();
  max_drift_ = std::max(max_drift_, std::abs(exact - energy_));
  ++drift_checks_;
  if (std::abs(exact - energy_) > kDriftTolerance) {
    rebuild();
  } else {
    energy_ = exact;
  }
  since_check_ = 0;
}

bool MetropolisChain::propose(std::size_t i) {
  ++proposals_;
  const double delta = flip_cost(i);
  const bool accept = delta <= 0.0 || rng_.uniform() < std::exp(-beta_ * delta);
  if (accept) {
    const Spin now = static_cast<Spin>(-spins_[i]);
    spins_[i] = now;
    minus_ = now < 0 ? minus_ + 1 : minus_ - 1;
    const double step = 2.0 * now;
    const std::size_t n = spins_.size();
    for (std::size_t j = 0; j < i; ++j) local_[j] += step * model_->coupling_at(i - j);
    for (std::size_t j = i + 1; j < n; ++j) local_[j] += step * model_->coupling_at(j - i);
    energy_ += delta;
    ++accepted_;
  }
  if (++since_check_ >= kDriftInterval) guard();
  return accept;
}

void MetropolisChain::sweep() {
  const std::size_t n = spins_.size();
  for (std::size_t k = 0; k < n; ++k) propose(rng_.below(n));
}

double batch_means_error(std::span<const std::uint8_t> series) {
  const std::size_t n = series.size();
  constexpr std::size_t batches = 32;
  if (n < 2 * batches) {
    if (n < 2) return 0.0;
    const double p = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n - 1));
  }
  const std::size_t len = n / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(b * len);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) /
               static_cast<double>(len);
  }
  const double mu = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  return std::sqrt(ss / (batches - 1) / batches);
}

bool contour_covers(const TriangleFamily& family, std::int64_t site, SeparationConstant c,
                    std::size_t contour_limit) {
  if (family.empty()) return false;
  if (family.size() > contour_limit)
    return std::any_of(family.begin(), family.end(),
                       [site](const Triangle& t) { return t.covers(site); });
  const auto parts = contours(family, c);
  return std::any_of(parts.begin(), parts.end(),
                     [site](const Contour& g) { return g.covers(site); });
}

ChainEstimate metropolis_run(const RunConfig& config, const DisorderField& h,
                             std::uint64_t chain_seed) {
  config.validate();
  const Volume vol = config.volume();
  if (h.volume != vol) throw std::domain_error("metropolis_run: field volume mismatch");
  const EnergyModel model(config.spec(), vol);
  MetropolisChain chain(model, h.values, config.theta, config.beta, config.boundary, chain_seed);

  const std::size_t origin = vol.index(0);
  const SeparationConstant c{config.c};
  ChainEstimate est;
  est.field_seed = h.seed;
  est.chain_seed = chain_seed;
  std::vector<std::uint8_t> series;
  series.reserve(config.sweeps - config.burnin);
  for (std::size_t s = 0; s < config.sweeps; ++s) {
    chain.sweep();
    if (s < config.burnin) continue;
    const bool minus = chain.spins()[origin] < 0;
    series.push_back(minus ? 1 : 0);
    // Contours need a + boundary and at least one - spin.
    bool through_origin = false;
    if (config.boundary == 1 && chain.minus_count() > 0) {
      const auto family = spins_to_triangles(
          SpinConfiguration(vol, {chain.spins().begin(), chain.spins().end()}, 1));
      through_origin = contour_covers(family, 0, c);
    }
    est.minus_at_origin += minus ? 1 : 0;
    est.contour_at_origin += through_origin ? 1 : 0;
    if (config.boundary == 1 && minus && !through_origin) ++est.basic1_violations;
  }
  est.samples = series.size();
  est.estimate = static_cast<double>(est.minus_at_origin) / static_cast<double>(est.samples);
  est.standard_error = batch_means_error(series);
  est.acceptance =
      static_cast<double>(chain.accepted()) / static_cast<double>(std::max<std::size_t>(1, chain.proposals()));
  est.max_drift = chain.max_drift();
  est.drift_checks = chain.drift_checks();
  return est;
}

RunReport disorder_sweep(const RunConfig& config) {
  config.validate();
  RunReport rep;
  rep.config = config;
  const Volume vol = config.volume();
  const std::size_t r_count = config.realizations;
  const bool quenched = config.theta != 0.0;
  const std::size_t distinct = quenched ? r_count : 1;

  std::vector<ChainEstimate> runs(distinct);
  parallel_for(distinct, config.jobs, [&](std::size_t r) {
    const std::uint64_t field_seed = hash_combine(config.seed, 2 * r);
    const std::uint64_t chain_seed = hash_combine(config.seed, 2 * r + 1);
    auto h = quenched ? DisorderField::generate(vol, config.theta, config.distribution, field_seed)
                      : DisorderField::zeros(vol);
    if (!quenched) h.seed = field_seed;
    runs[r] = metropolis_run(config, h, chain_seed);
  });
  for (std::size_t r = 0; r < r_count; ++r) rep.realizations.push_back(runs[quenched ? r : 0]);

  double sum = 0.0, occupancy = 0.0;
  for (const auto& e : rep.realizations) {
    sum += e.estimate;
    occupancy += static_cast<double>(e.contour_at_origin) / static_cast<double>(e.samples);
    rep.basic1_violations += e.basic1_violations;
    rep.max_drift = std::max(rep.max_drift, e.max_drift);
  }
  const auto n = static_cast<double>(r_count);
  rep.mean = sum / n;
  rep.contour_fraction = occupancy / n;
  if (quenched && r_count > 1) {
    double ss = 0.0;
    for (const auto& e : rep.realizations) ss += (e.estimate - rep.mean) * (e.estimate - rep.mean);
    rep.standard_error = std::sqrt(ss / (n - 1) / n);
  } else {
    rep.standard_error = rep.realizations.front().standard_error;
  }
  if (config.alpha < alpha_critical()) {
    rep.b_bar = b_bar(config.beta, config.theta, config.alpha);
    rep.reference_100 = std::exp(-rep.b_bar / 100.0);
    rep.reference_200 = std::exp(-rep.b_bar / 200.0);
  }
  return rep;
}

double DecompositionCheck::minus_frequency() const {
  return samples ? static_cast<double>(minus_at_origin) / static_cast<double>(samples) : 0.0;
}

double DecompositionCheck::contour_frequency() const {
  return samples ? static_cast<double>(contour_at_origin) / static_cast<double>(samples) : 0.0;
}

DecompositionCheck peierls_decomposition_check(const RunConfig& config,
                                               std::span<const SpinConfiguration> samples) {
  DecompositionCheck out;
  const SeparationConstant c{config.c};
  for (const auto& sigma : samples) {
    const bool minus = sigma.at(0) < 0;
    const bool through = contour_covers(spins_to_triangles(sigma), 0, c);
    ++out.samples;
    out.minus_at_origin += minus ? 1 : 0;
    out.contour_at_origin += through ? 1 : 0;
    if (minus && !through) ++out.violations;
  }
  return out;
}

void write_run_csv(std::ostream& out, const RunReport& rep) {
  csv::header(out,
              "row,field_seed,chain_seed,estimate,stderr,samples,contour_fraction,"
              "basic1_violations,max_drift");
  for (std::size_t r = 0; r < rep.realizations.size(); ++r) {
    const auto& e = rep.realizations[r];
    out << r << ',' << e.field_seed << ',' << e.chain_seed << ',' << csv::number(e.estimate)
        << ',' << csv::number(e.standard_error) << ',' << e.samples << ','
        << csv::number(static_cast<double>(e.contour_at_origin) / static_cast<double>(e.samples))
        << ',' << e.basic1_violations << ',' << csv::number(e.max_drift) << '\n';
  }
  out << "average,,," << csv::number(rep.mean) << ',' << csv::number(rep.standard_error) << ','
      << ',' << csv::number(rep.contour_fraction) << ',' << rep.basic1_violations << ','
      << csv::number(rep.max_drift) << '\n';
}

}  // namespace rfim
