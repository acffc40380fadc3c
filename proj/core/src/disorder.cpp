#include "rfim/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rfim/csv.hpp"
#include "rfim/energy_bounds.hpp"
#include "rfim/rng.hpp"

namespace rfim {

FlipSet::FlipSet(std::vector<std::int64_t> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool FlipSet::contains(std::int64_t site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

FlipSet FlipSet::support(const TriangleFamily& family) {
  std::vector<std::int64_t> s;
  for (const auto& t : family)
    for (std::int64_t x = t.first_site(); x <= t.last_site(); ++x) s.push_back(x);
  return FlipSet(std::move(s));
}

FlipSet compose(const FlipSet& a, const FlipSet& b) {
  std::vector<std::int64_t> out;
  std::set_symmetric_difference(a.sites().begin(), a.sites().end(), b.sites().begin(),
                                b.sites().end(), std::back_inserter(out));
  return FlipSet(std::move(out));
}

DisorderField flip_field(const DisorderField& h, const FlipSet& a) {
  DisorderField out = h;
  for (std::int64_t x : a.sites()) {
    if (!h.volume.contains(x)) throw std::domain_error("flip_field: site outside the volume");
    out.values[h.volume.index(x)] = -out.values[h.volume.index(x)];
  }
  return out;
}

FlipSet flip_composition(const Contour& g, int j) {
  if (j < 0 || j > g.top_level()) throw std::domain_error("flip_composition: level out of range");
  std::map<std::int64_t, int> count;
  for (int l = 0; l <= j; ++l)
    for (const auto& t : g.classes()[static_cast<std::size_t>(l)].members)
      for (std::int64_t x = t.first_site(); x <= t.last_site(); ++x) ++count[x];
  std::vector<std::int64_t> odd;
  for (auto [x, n] : count)
    if (n % 2 == 1) odd.push_back(x);
  return FlipSet(std::move(odd));
}

PeierlsThresholds PeierlsThresholds::of(const Contour& g, double alpha) {
  PeierlsThresholds p;
  p.zeta = rfim::zeta(alpha);
  double s = 0.0;
  for (const auto& cls : g.classes()) {
    s += static_cast<double>(cls.count()) * std::pow(static_cast<double>(cls.mass), alpha);
    p.a.push_back(p.zeta / 4.0 * s);
  }
  return p;
}

namespace {

TriangleFamily prefix_classes(const Contour& g, int j) {
  TriangleFamily e;
  for (int l = 0; l <= j; ++l)
    for (const auto& t : g.classes()[static_cast<std::size_t>(l)].members) e.insert(t);
  return e;
}

double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

ConstrainedEnsemble::ConstrainedEnsemble(const CouplingSpec& spec, const Contour& gamma,
                                         Volume volume, std::size_t max_sites)
    : spec_(spec), gamma_(gamma), volume_(volume) {
  const std::size_t n = volume.size();
  if (n > max_sites || n > 24)
    throw CapacityError("ConstrainedEnsemble: volume of " + std::to_string(n) +
                        " sites exceeds the exhaustive limit of " + std::to_string(max_sites));
  for (const auto& t : gamma.triangles())
    if (t.first_site() < volume.lo || t.last_site() > volume.hi)
      throw std::domain_error("ConstrainedEnsemble: contour leaves the volume");

  const EnergyModel model(spec, volume);
  const int levels = gamma.top_level() + 1;
  std::vector<TriangleFamily> prefixes;
  for (int j = 0; j < levels; ++j) {
    flips_.push_back(flip_composition(gamma, j));
    prefixes.push_back(prefix_classes(gamma, j));
  }

  std::vector<TriangleFamily> families;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const auto sigma = SpinConfiguration::from_bits(volume, bits);
    auto family = spins_to_triangles(sigma);
    if (!family.includes(gamma.triangles())) continue;
    full_.insert(full_.end(), sigma.spins().begin(), sigma.spins().end());
    families.push_back(std::move(family));
  }
  members_ = families.size();
  if (members_ == 0) throw std::domain_error("ConstrainedEnsemble: contour is not realizable");

  reduced_.resize(static_cast<std::size_t>(levels) * members_ * n);
  energy_.resize(static_cast<std::size_t>(levels) * members_);
  for (int j = 0; j < levels; ++j) {
    for (std::size_t k = 0; k < members_; ++k) {
      const std::size_t slot = static_cast<std::size_t>(j) * members_ + k;
      std::span<Spin> out(reduced_.data() + slot * n, n);
      paint_spins(families[k].without(prefixes[static_cast<std::size_t>(j)]), volume, out);
      energy_[slot] = model.deterministic(out, 1);
    }
  }
}

std::span<const Spin> ConstrainedEnsemble::full_spins(std::size_t k) const {
  const std::size_t n = volume_.size();
  return {full_.data() + k * n, n};
}

std::span<const Spin> ConstrainedEnsemble::reduced_spins(std::size_t k, int j) const {
  const std::size_t n = volume_.size();
  return {reduced_.data() + (static_cast<std::size_t>(j) * members_ + k) * n, n};
}

double ConstrainedEnsemble::reduced_energy(std::size_t k, int j) const {
  return energy_[static_cast<std::size_t>(j) * members_ + k];
}

double ConstrainedEnsemble::F(int j, std::span<const double> h, double theta, double beta) const {
  if (!(beta > 0.0)) throw std::domain_error("F_j: beta must be positive");
  if (j < 0 || j >= levels()) throw std::domain_error("F_j: level out of range");
  if (h.size() != volume_.size()) throw std::domain_error("F_j: field size mismatch");
  std::vector<double> num(members_), den(members_);
  for (std::size_t k = 0; k < members_; ++k) {
    const double e = -beta * reduced_energy(k, j);
    num[k] = e - beta * theta * field_energy(full_spins(k), h);
    den[k] = e - beta * theta * field_energy(reduced_spins(k, j), h);
  }
  return (log_sum_exp(num) - log_sum_exp(den)) / beta;
}

std::vector<double> ConstrainedEnsemble::F_all(std::span<const double> h, double theta,
                                               double beta) const {
  std::vector<double> f;
  for (int j = 0; j < levels(); ++j) f.push_back(F(j, h, theta, beta));
  return f;
}

double F_j(const CouplingSpec& spec, const Contour& gamma, int j, Volume volume,
           const DisorderField& h, double theta, double beta) {
  if (h.volume != volume) throw std::domain_error("F_j: field volume mismatch");
  return ConstrainedEnsemble(spec, gamma, volume).F(j, h.values, theta, beta);
}

namespace {

std::uint64_t site_mask(const FlipSet& d, const Volume& vol) {
  std::uint64_t mask = 0;
  for (std::int64_t x : d.sites()) mask |= std::uint64_t{1} << vol.index(x);
  return mask;
}

}  // namespace

AntisymmetryReport check_antisymmetry(const ConstrainedEnsemble& ens, int j, double theta,
                                      double beta) {
  const Volume& vol = ens.volume();
  const std::uint64_t mask = site_mask(ens.flips(j), vol);
  const std::uint64_t count = std::uint64_t{1} << vol.size();
  AntisymmetryReport r{j, static_cast<std::size_t>(count), 0.0, 0.0, false};
  double sum = 0.0;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    const double f = ens.F(j, DisorderField::from_bits(vol, bits).values, theta, beta);
    const double g = ens.F(j, DisorderField::from_bits(vol, bits ^ mask).values, theta, beta);
    r.max_abs_sum = std::max(r.max_abs_sum, std::abs(f + g));
    sum += f;
  }
  r.mean = sum / static_cast<double>(count);
  r.pass = r.max_abs_sum <= kAntisymmetryTolerance && std::abs(r.mean) <= kAntisymmetryTolerance;
  return r;
}

AntisymmetryReport check_antisymmetry_antithetic(const ConstrainedEnsemble& ens, int j,
                                                 double theta, double beta,
                                                 FieldDistribution distribution,
                                                 std::size_t pairs, std::uint64_t seed) {
  AntisymmetryReport r{j, 2 * pairs, 0.0, 0.0, false};
  double sum = 0.0;
  for (std::size_t s = 0; s < pairs; ++s) {
    const auto h = DisorderField::generate(ens.volume(), theta, distribution, hash_combine(seed, s));
    const double f = ens.F(j, h.values, theta, beta);
    const double g = ens.F(j, flip_field(h, ens.flips(j)).values, theta, beta);
    r.max_abs_sum = std::max(r.max_abs_sum, std::abs(f + g));
    sum += f + g;
  }
  r.mean = pairs ? sum / static_cast<double>(2 * pairs) : 0.0;
  r.pass = r.max_abs_sum <= kAntisymmetryTolerance && std::abs(r.mean) <= kAntisymmetryTolerance;
  return r;
}

double b_bar(double beta, double theta, double alpha) {
  const double z = zeta(alpha);
  const double first = beta * z / 4.0;
  if (theta == 0.0) return first;
  return std::min(first, z * z / (1024.0 * theta * theta));
}

std::vector<bool> event_indicators(std::span<const double> f, const PeierlsThresholds& a) {
  const std::size_t levels = a.levels();
  if (f.size() != levels) throw std::domain_error("event_indicators: size mismatch");
  auto above_from = [&](std::size_t start) {
    for (std::size_t i = start; i < levels; ++i)
      if (!(f[i] > a.a[i])) return false;
    return true;
  };
  std::vector<bool> ind(levels + 1);
  ind[0] = above_from(0);
  for (std::size_t j = 0; j + 1 < levels; ++j) ind[j + 1] = f[j] <= a.a[j] && above_from(j + 1);
  ind[levels] = f[levels - 1] <= a.a[levels - 1];
  return ind;
}

double event_bound(const Contour& g, int j, double alpha, double theta) {
  const double z = zeta(alpha);
  double s = 0.0;
  for (int l = j + 1; l <= g.top_level(); ++l) {
    const auto& cls = g.classes()[static_cast<std::size_t>(l)];
    s += static_cast<double>(cls.count()) * std::pow(static_cast<double>(cls.mass), 2 * alpha - 1);
  }
  if (s == 0.0) return 1.0;
  if (theta == 0.0) return 0.0;
  return std::exp(-z * z / (1024.0 * theta * theta) * s);
}

EventReport estimate_event_probabilities(const ConstrainedEnsemble& ens, double theta,
                                         double beta, std::size_t samples,
                                         FieldDistribution distribution, std::uint64_t seed) {
  const Volume& vol = ens.volume();
  const double alpha = ens.spec().alpha;
  const auto thresholds = PeierlsThresholds::of(ens.contour(), alpha);
  const int levels = ens.levels();

  EventReport rep;
  rep.exhaustive =
      samples == 0 && distribution == FieldDistribution::bernoulli && vol.size() <= 20;
  if (samples == 0) samples = 100'000;
  rep.realizations = rep.exhaustive ? std::size_t{1} << vol.size() : samples;

  std::vector<std::size_t> hits(static_cast<std::size_t>(levels) + 1, 0);
  for (std::size_t s = 0; s < rep.realizations; ++s) {
    const auto h = rep.exhaustive
                       ? DisorderField::from_bits(vol, s)
                       : DisorderField::generate(vol, theta, distribution, hash_combine(seed, s));
    const auto ind = event_indicators(ens.F_all(h.values, theta, beta), thresholds);
    const auto on = static_cast<std::size_t>(std::count(ind.begin(), ind.end(), true));
    if (on != 1) ++rep.partition_failures;
    for (std::size_t i = 0; i < ind.size(); ++i) hits[i] += ind[i] ? 1 : 0;
  }

  const auto n = static_cast<double>(rep.realizations);
  for (int j = -1; j < levels; ++j) {
    EventEstimate e;
    e.j = j;
    e.estimate = static_cast<double>(hits[static_cast<std::size_t>(j + 1)]) / n;
    e.standard_error = rep.exhaustive ? 0.0 : std::sqrt(e.estimate * (1.0 - e.estimate) / n);
    e.bound = event_bound(ens.contour(), j, alpha, theta);
    e.pass = e.estimate - 3.0 * e.standard_error <= e.bound + kAntisymmetryTolerance;
    rep.total_probability += e.estimate;
    rep.events.push_back(e);
  }
  return rep;
}

void write_event_csv(std::ostream& out, std::span<const EventReport> reports) {
  csv::header(out, "instance,j,estimate,stderr,bound,pass");
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (const auto& e : reports[i].events)
      out << i << ',' << e.j << ',' << csv::number(e.estimate) << ','
          << csv::number(e.standard_error) << ',' << csv::number(e.bound) << ','
          << csv::boolean(e.pass) << '\n';
}

TriangleFamily nested_two_class_example() { return TriangleFamily{{-3, 2}, {-1, 0}}; }

}  // namespace rfim
