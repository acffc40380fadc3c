#include "rfim/contour_enum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "rfim/csv.hpp"
#include "rfim/parallel.hpp"

namespace rfim {

void WeightSpec::validate() const {
  if (!(std::isfinite(b) && b > 0.0)) throw std::domain_error("WeightSpec: b must be positive");
  if (!(std::isfinite(gamma) && gamma > 0.0))
    throw std::domain_error("WeightSpec: gamma must be positive");
}

std::int64_t enumeration_window(std::int64_t m, SeparationConstant c) {
  return static_cast<std::int64_t>(std::floor(c.value * static_cast<double>(m * m * m))) * (m + 1);
}

ContourEnumerator::ContourEnumerator(SeparationConstant c, int cap, unsigned jobs)
    : c_(c), cap_(cap), jobs_(jobs) {}

void ContourEnumerator::check_cap(int m) const {
  if (m < 1) throw std::domain_error("contour enumeration: mass must be positive");
  if (m > cap_)
    throw CapacityError("contour enumeration: mass " + std::to_string(m) + " exceeds cap " +
                        std::to_string(cap_));
}

namespace {

std::int64_t rightmost_bond(const TriangleFamily& f) {
  std::int64_t r = std::numeric_limits<std::int64_t>::min();
  for (const auto& t : f) r = std::max(r, t.right);
  return r;
}

TriangleFamily normalized(const TriangleFamily& f) {
  std::int64_t l = std::numeric_limits<std::int64_t>::max();
  for (const auto& t : f) l = std::min(l, t.left);
  return f.shifted(-l);
}

bool cross_admissible(const TriangleFamily& a, const TriangleFamily& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (!pairwise_admissible(x, y)) return false;
  return true;
}

}  // namespace

const std::vector<TriangleFamily>& ContourEnumerator::admissible_shapes(int m) {
  check_cap(m);
  if (auto it = admissible_.find(m); it != admissible_.end()) return it->second;

  std::set<TriangleFamily> found;
  found.insert(TriangleFamily{Triangle{0, m}});
  for (int m1 = 1; 2 * m1 <= m; ++m1) {
    const int m2 = m - m1;
    const auto& small = admissible_shapes(m1);
    const auto& large = admissible_shapes(m2);
    const auto reach = static_cast<std::int64_t>(
        std::floor(c_.value * static_cast<double>(m1) * m1 * m1));

    std::vector<std::vector<TriangleFamily>> per_a(small.size());
    parallel_for(small.size(), jobs_, [&](std::size_t ia) {
      const TriangleFamily& a = small[ia];
      const Contour ca(a);
      const std::int64_t ra = rightmost_bond(a);
      for (const auto& b0 : large) {
        const std::int64_t rb = rightmost_bond(b0);
        for (std::int64_t t = -rb - reach; t <= ra + reach; ++t) {
          const TriangleFamily b = b0.shifted(t);
          if (!cross_admissible(a, b)) continue;
          if (well_separated(ca, Contour(b), c_)) continue;
          const TriangleFamily u = a.united(b);
          if (contours(u, c_).size() != 1) continue;
          per_a[ia].push_back(normalized(u));
        }
      }
    });
    for (auto& v : per_a) found.insert(v.begin(), v.end());
  }
  return admissible_[m] = std::vector<TriangleFamily>(found.begin(), found.end());
}

std::vector<TriangleFamily> ContourEnumerator::shapes(int m) {
  std::vector<TriangleFamily> out;
  for (const auto& f : admissible_shapes(m))
    if (is_realizable(f)) out.push_back(f);
  return out;
}

std::vector<Contour> ContourEnumerator::origin_contours(int m) {
  const std::int64_t w = enumeration_window(m, c_);
  std::set<TriangleFamily> found;
  for (const auto& f : shapes(m)) {
    std::set<std::int64_t> sites;
    for (const auto& t : f)
      for (std::int64_t x = t.first_site(); x <= t.last_site(); ++x) sites.insert(x);
    for (std::int64_t x : sites) {
      TriangleFamily g = f.shifted(-x);
      bool inside = true;
      for (const auto& t : g) inside = inside && t.first_site() >= -w && t.last_site() <= w;
      if (inside) found.insert(std::move(g));
    }
  }
  std::vector<Contour> out;
  out.reserve(found.size());
  for (const auto& f : found) out.emplace_back(f);
  return out;
}

std::vector<Contour> enumerate_origin_contours(int m, SeparationConstant c, int cap,
                                               unsigned jobs) {
  return ContourEnumerator(c, cap, jobs).origin_contours(m);
}

double power_mass(const TriangleFamily& family, double gamma) {
  double s = 0.0;
  for (const auto& t : family) s += std::pow(static_cast<double>(t.mass()), gamma);
  return s;
}

double contour_weight(const Contour& g, const WeightSpec& w) {
  return std::exp(-w.b * power_mass(g.triangles(), w.gamma));
}

double weight_sum(std::span<const Contour> contours, const WeightSpec& w) {
  w.validate();
  double s = 0.0;
  for (const auto& g : contours) s += contour_weight(g, w);
  return s;
}

double weight_sum(int m, const WeightSpec& w, SeparationConstant c, int cap) {
  const auto list = enumerate_origin_contours(m, c, cap);
  return weight_sum(list, w);
}

double entropy_bound(int m, const WeightSpec& w) {
  return 2.0 * m * std::exp(-w.b * std::pow(static_cast<double>(m), w.gamma));
}

std::vector<double> default_b_grid() {
  std::vector<double> g;
  for (int b = 1; b <= 50; ++b) g.push_back(b);
  return g;
}

C0Certificate certify_C0(double gamma, int m_max, std::span<const double> b_grid,
                         SeparationConstant c, int cap, unsigned jobs) {
  if (b_grid.empty()) throw std::domain_error("certify_C0: empty b grid");
  C0Certificate cert;
  cert.gamma = gamma;
  cert.m_max = m_max;
  cert.c = c.value;
  cert.b_grid.assign(b_grid.begin(), b_grid.end());
  std::sort(cert.b_grid.begin(), cert.b_grid.end());

  ContourEnumerator en(c, cap, jobs);
  std::vector<bool> all_pass(cert.b_grid.size(), true);
  for (int m = 1; m <= m_max; ++m) {
    const auto list = en.origin_contours(m);
    cert.contour_counts.push_back(list.size());
    for (std::size_t k = 0; k < cert.b_grid.size(); ++k) {
      const WeightSpec w{cert.b_grid[k], gamma};
      CertificateRow row{m, w.b, gamma, weight_sum(list, w), entropy_bound(m, w), false};
      row.pass = row.weight_sum <= row.bound;
      all_pass[k] = all_pass[k] && row.pass;
      cert.rows.push_back(row);
    }
  }
  for (std::size_t k = cert.b_grid.size(); k-- > 0;) {
    if (!all_pass[k]) break;
    cert.b_star = cert.b_grid[k];
  }
  return cert;
}

void write_certificate_csv(std::ostream& out, const C0Certificate& cert) {
  csv::header(out, "m,b,gamma,weight_sum,bound,pass");
  for (const auto& r : cert.rows)
    out << r.m << ',' << csv::number(r.b) << ',' << csv::number(r.gamma) << ','
        << csv::number(r.weight_sum) << ',' << csv::number(r.bound) << ','
        << csv::boolean(r.pass) << '\n';
}

}  // namespace rfim
