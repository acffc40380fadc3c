#include "rfim/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "rfim/rng.hpp"

namespace rfim {

void CouplingSpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in [0, 1)");
  if (!(j1 > 1.0)) throw std::domain_error("j1 must be > 1");
  if (!(tail_tolerance > 0.0)) throw std::domain_error("tail_tolerance must be > 0");
}

double coupling(const CouplingSpec& spec, std::int64_t n) {
  if (n < 1) throw std::domain_error("coupling: distance must be >= 1");
  if (n == 1) return spec.j1;
  return std::pow(static_cast<double>(n), spec.alpha - 2.0);
}

namespace {

// Euler-Maclaurin tail of sum_{n >= r} n^{-s}, s > 1, with three Bernoulli
// corrections. The remainder is bounded by |f^(5)(r)| / 30240.
TailSum power_tail(double s, std::int64_t r) {
  const double x = static_cast<double>(r);
  const double f = std::pow(x, -s);
  const double p1 = s;
  const double p3 = s * (s + 1.0) * (s + 2.0);
  const double p5 = p3 * (s + 3.0) * (s + 4.0);
  const double integral = x * f / (s - 1.0);
  const double value = integral + 0.5 * f + p1 * f / x / 12.0 - p3 * f / (x * x * x) / 720.0 +
                       p5 * f / std::pow(x, 5) / 30240.0;
  return {value, p5 * f / std::pow(x, 5) / 30240.0, r};
}

}  // namespace

TailSum coupling_tail(const CouplingSpec& spec, std::int64_t d, std::int64_t radius) {
  if (d < 1) throw std::domain_error("coupling_tail: start must be >= 1");
  const double s = 2.0 - spec.alpha;
  double head = 0.0;
  std::int64_t n = d;
  if (n == 1) {
    head += spec.j1;
    n = 2;
  }
  std::int64_t r = std::max(radius, n);
  TailSum tail = power_tail(s, r);
  while (tail.error_bound > spec.tail_tolerance) {
    r *= 2;
    tail = power_tail(s, r);
  }
  // Sum small terms last-to-first for accuracy.
  double direct = 0.0;
  for (std::int64_t k = r - 1; k >= n; --k) direct += std::pow(static_cast<double>(k), -s);
  return {head + direct + tail.value, tail.error_bound, r};
}

Volume::Volume(std::int64_t lo_, std::int64_t hi_) : lo(lo_), hi(hi_) {
  if (lo > hi) throw std::domain_error("Volume: lo must be <= hi");
}

Volume Volume::centered(std::size_t n) {
  if (n == 0) throw std::domain_error("Volume: need at least one site");
  const auto lo = -static_cast<std::int64_t>(n / 2);
  return {lo, lo + static_cast<std::int64_t>(n) - 1};
}

SpinConfiguration::SpinConfiguration(Volume volume, int boundary)
    : volume_(volume), spins_(volume.size(), static_cast<Spin>(boundary)), boundary_(boundary) {
  if (boundary != 1 && boundary != -1) throw std::domain_error("boundary must be +1 or -1");
}

SpinConfiguration::SpinConfiguration(Volume volume, std::vector<Spin> spins, int boundary)
    : volume_(volume), spins_(std::move(spins)), boundary_(boundary) {
  if (boundary != 1 && boundary != -1) throw std::domain_error("boundary must be +1 or -1");
  if (spins_.size() != volume_.size())
    throw std::domain_error("SpinConfiguration: spin count does not match volume");
  for (Spin s : spins_)
    if (s != 1 && s != -1) throw std::domain_error("SpinConfiguration: spins must be +1 or -1");
}

SpinConfiguration SpinConfiguration::from_bits(Volume volume, std::uint64_t bits, int boundary) {
  if (volume.size() > 64) throw CapacityError("from_bits supports at most 64 sites");
  std::vector<Spin> spins(volume.size());
  for (std::size_t k = 0; k < spins.size(); ++k) spins[k] = ((bits >> k) & 1U) ? -1 : 1;
  return {volume, std::move(spins), boundary};
}

int SpinConfiguration::at(std::int64_t site) const {
  return volume_.contains(site) ? spins_[volume_.index(site)] : boundary_;
}

void SpinConfiguration::set(std::int64_t site, int value) {
  if (!volume_.contains(site)) throw std::domain_error("set: site outside volume");
  if (value != 1 && value != -1) throw std::domain_error("set: spin must be +1 or -1");
  spins_[volume_.index(site)] = static_cast<Spin>(value);
}

void SpinConfiguration::flip(std::int64_t site) {
  if (!volume_.contains(site)) throw std::domain_error("flip: site outside volume");
  auto& s = spins_[volume_.index(site)];
  s = static_cast<Spin>(-s);
}

SpinConfiguration SpinConfiguration::flipped() const {
  std::vector<Spin> out(spins_.size());
  std::transform(spins_.begin(), spins_.end(), out.begin(),
                 [](Spin s) { return static_cast<Spin>(-s); });
  return {volume_, std::move(out), -boundary_};
}

std::string_view to_string(FieldDistribution d) {
  switch (d) {
    case FieldDistribution::bernoulli: return "bernoulli";
    case FieldDistribution::gaussian: return "gaussian";
    case FieldDistribution::subgaussian: return "subgaussian";
  }
  return "unknown";
}

FieldDistribution parse_field_distribution(std::string_view name) {
  if (name == "bernoulli") return FieldDistribution::bernoulli;
  if (name == "gaussian") return FieldDistribution::gaussian;
  if (name == "subgaussian") return FieldDistribution::subgaussian;
  throw std::invalid_argument("unknown field distribution: " + std::string(name));
}

DisorderField DisorderField::generate(Volume volume, double theta, FieldDistribution distribution,
                                      std::uint64_t seed) {
  if (!(theta >= 0.0)) throw std::domain_error("theta must be >= 0");
  DisorderField h{volume, std::vector<double>(volume.size()), theta, distribution, seed};
  for (std::int64_t i = volume.lo; i <= volume.hi; ++i) {
    const std::uint64_t key = hash_combine(seed, static_cast<std::uint64_t>(i));
    double v = 0.0;
    switch (distribution) {
      case FieldDistribution::bernoulli:
        v = (key & 1U) ? -1.0 : 1.0;
        break;
      case FieldDistribution::gaussian: {
        const double u1 = 1.0 - to_unit(mix64(key ^ 1U));
        const double u2 = to_unit(mix64(key ^ 2U));
        v = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        break;
      }
      case FieldDistribution::subgaussian:
        // Uniform on [-sqrt 3, sqrt 3]: bounded, symmetric, unit variance.
        v = std::numbers::sqrt3 * (2.0 * to_unit(key) - 1.0);
        break;
    }
    h.values[volume.index(i)] = v;
  }
  return h;
}

DisorderField DisorderField::from_bits(Volume volume, std::uint64_t bits, double theta) {
  if (volume.size() > 64) throw CapacityError("from_bits supports at most 64 sites");
  DisorderField h{volume, std::vector<double>(volume.size()), theta, FieldDistribution::bernoulli,
                  bits};
  for (std::size_t k = 0; k < h.values.size(); ++k) h.values[k] = ((bits >> k) & 1U) ? -1.0 : 1.0;
  return h;
}

DisorderField DisorderField::zeros(Volume volume) {
  return {volume, std::vector<double>(volume.size(), 0.0), 0.0, FieldDistribution::bernoulli, 0};
}

double boundary_field(const CouplingSpec& spec, std::int64_t i, const Volume& vol) {
  if (!vol.contains(i)) throw std::domain_error("boundary_field: site outside volume");
  return coupling_tail(spec, i - vol.lo + 1).value + coupling_tail(spec, vol.hi - i + 1).value;
}

EnergyModel::EnergyModel(const CouplingSpec& spec, Volume volume)
    : spec_(spec), volume_(volume), couplings_(volume.size(), 0.0), boundary_(volume.size()) {
  spec_.validate();
  for (std::size_t d = 1; d < couplings_.size(); ++d)
    couplings_[d] = coupling(spec_, static_cast<std::int64_t>(d));
  for (std::int64_t i = volume.lo; i <= volume.hi; ++i)
    boundary_[volume.index(i)] = boundary_field(spec_, i, volume);
}

double EnergyModel::deterministic(std::span<const Spin> spins, int boundary) const {
  const std::size_t n = spins.size();
  if (n != volume_.size()) throw std::domain_error("EnergyModel: spin count does not match volume");
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j)
      if (spins[i] != spins[j]) pairs += 2.0 * couplings_[j - i];
  }
  double edge = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (spins[i] != boundary) edge += 2.0 * boundary_[i];
  return pairs + edge;
}

double EnergyModel::deterministic(const SpinConfiguration& sigma) const {
  if (sigma.volume() != volume_) throw std::domain_error("EnergyModel: volume mismatch");
  return deterministic(sigma.spins(), sigma.boundary());
}

double EnergyModel::flip_cost(std::span<const Spin> spins, int boundary, std::size_t index,
                              std::span<const double> field, double theta) const {
  double local = 0.0;
  for (std::size_t j = 0; j < spins.size(); ++j) {
    if (j == index) continue;
    local += couplings_[j > index ? j - index : index - j] * spins[j];
  }
  local += boundary * boundary_[index];
  if (!field.empty()) local += theta * field[index];
  return 2.0 * spins[index] * local;
}

double hamiltonian_deterministic(const CouplingSpec& spec, const SpinConfiguration& sigma) {
  return EnergyModel(spec, sigma.volume()).deterministic(sigma);
}

double field_energy(std::span<const Spin> spins, std::span<const double> h) {
  if (spins.size() != h.size()) throw std::domain_error("field_energy: size mismatch");
  double g = 0.0;
  for (std::size_t i = 0; i < spins.size(); ++i) g -= h[i] * spins[i];
  return g;
}

double field_energy(const SpinConfiguration& sigma, const DisorderField& h) {
  if (sigma.volume() != h.volume) throw std::domain_error("field_energy: volume mismatch");
  return field_energy(sigma.spins(), h.values);
}

double hamiltonian(const CouplingSpec& spec, const SpinConfiguration& sigma,
                   const DisorderField& h, double theta) {
  return hamiltonian_deterministic(spec, sigma) + theta * field_energy(sigma, h);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double exact_gibbs_marginal(const CouplingSpec& spec, const Volume& vol, const DisorderField& h,
                            double theta, double beta, std::int64_t site, int boundary,
                            std::size_t max_sites) {
  if (!vol.contains(site)) throw std::domain_error("exact_gibbs_marginal: site outside volume");
  if (h.volume != vol) throw std::domain_error("exact_gibbs_marginal: field volume mismatch");
  if (vol.size() > max_sites || vol.size() > 62)
    throw CapacityError("exact_gibbs_marginal: volume exceeds exhaustive limit");
  if (beta == 0.0) return 0.5;

  const EnergyModel model(spec, vol);
  const std::size_t n = vol.size();
  const std::size_t target = vol.index(site);
  std::vector<Spin> spins(n, static_cast<Spin>(boundary));

  // Gray-code walk: each step flips one site and updates the energy in O(N).
  double energy = model.deterministic(spins, boundary) + theta * field_energy(spins, h.values);
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double log_z = -beta * energy;
  double log_minus = spins[target] == -1 ? log_z : neg_inf;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < count; ++g) {
    const auto k = static_cast<std::size_t>(std::countr_zero(g));
    energy += model.flip_cost(spins, boundary, k, h.values, theta);
    spins[k] = static_cast<Spin>(-spins[k]);
    const double w = -beta * energy;
    log_z = log_add_exp(log_z, w);
    if (spins[target] == -1) log_minus = log_add_exp(log_minus, w);
  }
  return std::clamp(std::exp(log_minus - log_z), 0.0, 1.0);
}

}  // namespace rfim
