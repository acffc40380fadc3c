#include "rfim/triangles.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace rfim {

OffsetTable::OffsetTable(const Volume& volume)
    : center_(volume.lo - 1),
      span_(static_cast<std::int64_t>(volume.size())),
      scale_(static_cast<Int128>(100) * span_ * span_) {}

Rational OffsetTable::offset(std::int64_t bond) const {
  if (!has_bond(bond)) throw std::domain_error("OffsetTable: bond outside volume");
  const std::int64_t u = bond - center_;
  return Rational(-u * u, static_cast<std::int64_t>(scale_));
}

Rational OffsetTable::position(std::int64_t bond) const {
  return Rational(2 * bond + 1, 2) + offset(bond);
}

Int128 OffsetTable::scaled_distance(std::int64_t a, std::int64_t b) const {
  if (a > b) std::swap(a, b);
  const Int128 gap = b - a;
  return gap * (scale_ - (static_cast<Int128>(a) + b - 2 * static_cast<Int128>(center_)));
}

std::strong_ordering OffsetTable::compare_distance(std::int64_t a, std::int64_t b, std::int64_t c,
                                                   std::int64_t d) const {
  const Int128 x = scaled_distance(a, b);
  const Int128 y = scaled_distance(c, d);
  return x < y ? std::strong_ordering::less
               : (x > y ? std::strong_ordering::greater : std::strong_ordering::equal);
}

OffsetTable assign_offsets(const Volume& volume) { return OffsetTable(volume); }

std::int64_t triangle_distance(const Triangle& a, const Triangle& b) {
  auto gap = [](std::int64_t x, std::int64_t y) { return x > y ? x - y : y - x; };
  return std::min({gap(a.left, b.left), gap(a.left, b.right), gap(a.right, b.left),
                   gap(a.right, b.right)});
}

TriangleFamily::TriangleFamily(std::initializer_list<Triangle> triangles)
    : TriangleFamily(std::vector<Triangle>(triangles)) {}

TriangleFamily::TriangleFamily(std::vector<Triangle> triangles) : triangles_(std::move(triangles)) {
  for (const auto& t : triangles_)
    if (t.left >= t.right) throw std::domain_error("Triangle: left bond must precede right bond");
  std::sort(triangles_.begin(), triangles_.end());
  triangles_.erase(std::unique(triangles_.begin(), triangles_.end()), triangles_.end());
}

bool TriangleFamily::contains(const Triangle& t) const {
  return std::binary_search(triangles_.begin(), triangles_.end(), t);
}

bool TriangleFamily::includes(const TriangleFamily& other) const {
  return std::includes(triangles_.begin(), triangles_.end(), other.triangles_.begin(),
                       other.triangles_.end());
}

std::int64_t TriangleFamily::total_mass() const {
  std::int64_t m = 0;
  for (const auto& t : triangles_) m += t.mass();
  return m;
}

void TriangleFamily::insert(const Triangle& t) {
  if (t.left >= t.right) throw std::domain_error("Triangle: left bond must precede right bond");
  auto it = std::lower_bound(triangles_.begin(), triangles_.end(), t);
  if (it == triangles_.end() || *it != t) triangles_.insert(it, t);
}

TriangleFamily TriangleFamily::united(const TriangleFamily& other) const {
  TriangleFamily out;
  std::set_union(triangles_.begin(), triangles_.end(), other.triangles_.begin(),
                 other.triangles_.end(), std::back_inserter(out.triangles_));
  return out;
}

TriangleFamily TriangleFamily::without(const TriangleFamily& other) const {
  TriangleFamily out;
  std::set_difference(triangles_.begin(), triangles_.end(), other.triangles_.begin(),
                      other.triangles_.end(), std::back_inserter(out.triangles_));
  return out;
}

TriangleFamily TriangleFamily::shifted(std::int64_t k) const {
  TriangleFamily out;
  out.triangles_.reserve(triangles_.size());
  for (const auto& t : triangles_) out.triangles_.push_back(t.shifted(k));
  return out;
}

std::vector<Triangle> TriangleFamily::by_mass() const {
  std::vector<Triangle> out(triangles_);
  std::stable_sort(out.begin(), out.end(),
                   [](const Triangle& a, const Triangle& b) { return a.mass() < b.mass(); });
  return out;
}

std::vector<InterfacePoint> interfaces(const SpinConfiguration& sigma) {
  if (sigma.boundary() != 1) throw std::domain_error("interfaces: requires + boundary");
  const Volume& vol = sigma.volume();
  const OffsetTable table(vol);
  std::vector<InterfacePoint> out;
  for (std::int64_t x = vol.lo - 1; x <= vol.hi; ++x)
    if (sigma.at(x) != sigma.at(x + 1)) out.push_back({x, table.offset(x)});
  return out;
}

TriangleFamily pair_interfaces(std::span<const std::int64_t> bonds, const OffsetTable& table) {
  const std::size_t n = bonds.size();
  if (n % 2 != 0) throw std::logic_error("pair_interfaces: odd number of interfaces");
  if (n == 0) return {};

  // Doubly linked list over the still-growing points; candidate collisions
  // are adjacent pairs keyed by their exact distance.
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev(n), next(n);
  std::vector<bool> paired(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = i == 0 ? none : i - 1;
    next[i] = i + 1 == n ? none : i + 1;
  }
  struct Candidate {
    Int128 distance;
    std::size_t left;
    std::size_t right;
    bool operator>(const Candidate& o) const { return distance > o.distance; }
  };
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;
  for (std::size_t i = 0; i + 1 < n; ++i)
    queue.push({table.scaled_distance(bonds[i], bonds[i + 1]), i, i + 1});

  std::vector<Triangle> out;
  out.reserve(n / 2);
  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    if (paired[c.left] || paired[c.right] || next[c.left] != c.right) continue;
    paired[c.left] = paired[c.right] = true;
    out.push_back({bonds[c.left], bonds[c.right]});
    const std::size_t l = prev[c.left];
    const std::size_t r = next[c.right];
    if (l != none) next[l] = r;
    if (r != none) prev[r] = l;
    if (l != none && r != none) queue.push({table.scaled_distance(bonds[l], bonds[r]), l, r});
  }
  return TriangleFamily(std::move(out));
}

TriangleFamily spins_to_triangles(const SpinConfiguration& sigma) {
  if (sigma.boundary() != 1) throw std::domain_error("spins_to_triangles: requires + boundary");
  const Volume& vol = sigma.volume();
  std::vector<std::int64_t> bonds;
  int left = 1;
  for (std::int64_t x = vol.lo - 1; x <= vol.hi; ++x) {
    const int right = x + 1 <= vol.hi ? sigma.spins()[vol.index(x + 1)] : 1;
    if (left != right) bonds.push_back(x);
    left = right;
  }
  return pair_interfaces(bonds, OffsetTable(vol));
}

void paint_spins(const TriangleFamily& family, const Volume& volume, std::span<Spin> out) {
  if (out.size() != volume.size()) throw std::domain_error("paint_spins: buffer size mismatch");
  std::fill(out.begin(), out.end(), Spin{1});
  for (const auto& t : family) {
    if (t.first_site() < volume.lo || t.last_site() > volume.hi)
      throw std::domain_error("triangles_to_spins: triangle outside volume");
    for (std::int64_t s = t.first_site(); s <= t.last_site(); ++s) {
      auto& v = out[volume.index(s)];
      v = static_cast<Spin>(-v);
    }
  }
}

SpinConfiguration triangles_to_spins(const TriangleFamily& family, const Volume& volume) {
  std::vector<Spin> spins(volume.size());
  paint_spins(family, volume, spins);
  return {volume, std::move(spins), +1};
}

Volume bounding_volume(const TriangleFamily& family) {
  if (family.empty()) throw std::domain_error("bounding_volume: empty family");
  std::int64_t lo = family[0].first_site();
  std::int64_t hi = family[0].last_site();
  for (const auto& t : family) {
    lo = std::min(lo, t.first_site());
    hi = std::max(hi, t.last_site());
  }
  return {lo, hi};
}

bool is_realizable(const TriangleFamily& family, const Volume& volume) {
  for (const auto& t : family)
    if (t.first_site() < volume.lo || t.last_site() > volume.hi) return false;
  return spins_to_triangles(triangles_to_spins(family, volume)) == family;
}

bool is_realizable(const TriangleFamily& family) {
  if (family.empty()) return true;
  return is_realizable(family, bounding_volume(family));
}

bool is_compatible(const TriangleFamily& a, const TriangleFamily& b, const Volume& volume) {
  return is_realizable(a.united(b), volume);
}

bool is_compatible(const TriangleFamily& a, const TriangleFamily& b) {
  return is_realizable(a.united(b));
}

bool satisfies_separation_rule(const TriangleFamily& family) {
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (triangle_distance(family[i], family[j]) <
          std::min(family[i].mass(), family[j].mass()))
        return false;
  return true;
}

bool pairwise_admissible(const Triangle& a, const Triangle& b) {
  if (a.left == b.left || a.left == b.right || a.right == b.left || a.right == b.right)
    return false;
  if (!(a.disjoint(b) || a.encloses(b) || b.encloses(a))) return false;
  return triangle_distance(a, b) >= std::min(a.mass(), b.mass());
}

double energy_difference(const EnergyModel& model, const TriangleFamily& s,
                         const TriangleFamily& rest, const DisorderField& h, double theta) {
  const Volume& vol = model.volume();
  if (!is_compatible(s, rest, vol))
    throw std::domain_error("energy_difference: families are not compatible");
  if (s.empty()) return 0.0;
  std::vector<Spin> with(vol.size()), without(vol.size());
  paint_spins(s.united(rest), vol, with);
  paint_spins(rest, vol, without);
  double d = model.deterministic(with, 1) - model.deterministic(without, 1);
  if (theta != 0.0) d += theta * (field_energy(with, h.values) - field_energy(without, h.values));
  return d;
}

double energy_difference(const CouplingSpec& spec, const Volume& volume, const TriangleFamily& s,
                         const TriangleFamily& rest, const DisorderField& h, double theta) {
  return energy_difference(EnergyModel(spec, volume), s, rest, h, theta);
}

}  // namespace rfim
