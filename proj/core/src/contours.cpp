#include "rfim/contours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rfim/rng.hpp"

namespace rfim {

Contour::Contour(TriangleFamily triangles) : triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw std::domain_error("Contour: needs at least one triangle");
  enclosing_ = triangles_[0];
  for (const auto& t : triangles_) {
    enclosing_.left = std::min(enclosing_.left, t.left);
    enclosing_.right = std::max(enclosing_.right, t.right);
    mass_ += t.mass();
  }
  for (const auto& t : triangles_.by_mass()) {
    if (classes_.empty() || classes_.back().mass != t.mass()) classes_.push_back({t.mass(), {}});
    classes_.back().members.push_back(t);
  }
}

bool Contour::covers(std::int64_t site) const {
  return std::any_of(triangles_.begin(), triangles_.end(),
                     [site](const Triangle& t) { return t.covers(site); });
}

SeparationSeries separation_series(double c, std::int64_t terms) {
  SeparationSeries s{c, 0.0, 0.0, terms};
  if (!(c > 0.0)) throw std::domain_error("separation_series: C must be positive");
  for (std::int64_t m = terms; m >= 1; --m) {
    const double floor_cm = std::floor(c * static_cast<double>(m));
    if (floor_cm < 1.0) {
      s.partial_sum = std::numeric_limits<double>::infinity();
      break;
    }
    s.partial_sum += 4.0 * static_cast<double>(m) / (floor_cm * floor_cm * floor_cm);
  }
  // [Cm] >= Cm - 1 and 4x/(Cx-1)^3 decreases, so the rest is below
  // int_M^inf 4x/(Cx-1)^3 dx = (4/C^2)(1/u + 1/(2u^2)), u = CM - 1.
  const double u = c * static_cast<double>(terms) - 1.0;
  s.tail_bound = u > 0.0 ? 4.0 / (c * c) * (1.0 / u + 0.5 / (u * u))
                         : std::numeric_limits<double>::infinity();
  return s;
}

SeparationConstant choose_C() {
  for (int c = 1;; ++c)
    if (separation_series(c).satisfied()) return {static_cast<double>(c)};
}

std::int64_t contour_distance(const Contour& a, const Contour& b) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& x : a.triangles())
    for (const auto& y : b.triangles()) best = std::min(best, triangle_distance(x, y));
  return best;
}

namespace {

double cube(std::int64_t m) {
  const auto x = static_cast<double>(m);
  return x * x * x;
}

}  // namespace

bool well_separated(const Contour& a, const Contour& b, SeparationConstant c) {
  const Triangle& ea = a.enclosing();
  const Triangle& eb = b.enclosing();
  if (ea.disjoint(eb))
    return static_cast<double>(contour_distance(a, b)) >
           c.value * cube(std::min(a.mass(), b.mass()));
  const Contour* inner = nullptr;
  const Contour* outer = nullptr;
  if (ea.encloses(eb) && ea != eb) {
    inner = &b;
    outer = &a;
  } else if (eb.encloses(ea) && ea != eb) {
    inner = &a;
    outer = &b;
  } else {
    return false;
  }
  const Triangle& core = inner->enclosing();
  for (const auto& t : outer->triangles())
    if (!(t.encloses(core) || t.disjoint(core))) return false;
  return static_cast<double>(contour_distance(a, b)) > c.value * cube(inner->mass());
}

namespace {

void sort_clusters(std::vector<Contour>& clusters) {
  std::sort(clusters.begin(), clusters.end(), [](const Contour& x, const Contour& y) {
    if (x.enclosing().left != y.enclosing().left) return x.enclosing().left < y.enclosing().left;
    if (x.mass() != y.mass()) return x.mass() < y.mass();
    return x < y;
  });
}

Contour merged(const Contour& a, const Contour& b) {
  return Contour(a.triangles().united(b.triangles()));
}

std::vector<Contour> singletons(const TriangleFamily& family) {
  std::vector<Contour> clusters;
  clusters.reserve(family.size());
  for (const auto& t : family) clusters.emplace_back(TriangleFamily{t});
  return clusters;
}

}  // namespace

std::vector<Contour> contours(const TriangleFamily& family, SeparationConstant c) {
  std::vector<Contour> clusters = singletons(family);
  sort_clusters(clusters);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < clusters.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        if (well_separated(clusters[i], clusters[j], c)) continue;
        clusters[i] = merged(clusters[i], clusters[j]);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
        sort_clusters(clusters);
        changed = true;
        break;
      }
    }
  }
  return clusters;
}

std::vector<Contour> contours_random_schedule(const TriangleFamily& family, SeparationConstant c,
                                              std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Contour> clusters = singletons(family);
  std::vector<std::pair<std::size_t, std::size_t>> violating;
  for (;;) {
    violating.clear();
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j)
        if (!well_separated(clusters[i], clusters[j], c)) violating.emplace_back(i, j);
    if (violating.empty()) break;
    const auto [i, j] = violating[rng.below(violating.size())];
    clusters[i] = merged(clusters[i], clusters[j]);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
  }
  sort_clusters(clusters);
  return clusters;
}

bool verify_separation(std::span<const Contour> list, SeparationConstant c) {
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j)
      if (!well_separated(list[i], list[j], c)) return false;
  return true;
}

bool verify_independence(std::span<const TriangleFamily> families, SeparationConstant c) {
  std::vector<std::vector<Contour>> parts;
  parts.reserve(families.size());
  for (const auto& f : families) parts.push_back(contours(f, c));
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      for (const auto& x : parts[a])
        for (const auto& y : parts[b])
          if (x == y || !well_separated(x, y, c))
            throw std::domain_error("verify_independence: families are not mutually separated");

  TriangleFamily all;
  std::vector<Contour> expected;
  for (std::size_t a = 0; a < parts.size(); ++a) {
    all = all.united(families[a]);
    expected.insert(expected.end(), parts[a].begin(), parts[a].end());
  }
  sort_clusters(expected);
  return contours(all, c) == expected;
}

double contour_power_mass(const Contour& g, double rho) {
  double s = 0.0;
  for (const auto& cls : g.classes())
    s += static_cast<double>(cls.count()) * std::pow(static_cast<double>(cls.mass), rho);
  return s;
}

}  // namespace rfim
