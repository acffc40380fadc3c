#include "rfim/energy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rfim/csv.hpp"
#include "rfim/parallel.hpp"

namespace rfim {

double alpha_critical() { return std::log(3.0) / std::log(2.0) - 1.0; }

double zeta(double alpha) {
  if (!(alpha >= 0.0 && alpha <= alpha_critical()))
    throw std::domain_error("zeta: alpha must lie in [0, ln3/ln2 - 1]");
  return 1.0 - 2.0 * (std::exp2(alpha) - 1.0);
}

namespace {

// H_0(removed | rest) where removed u rest is the family itself.
double erasure_cost(const EnergyModel& model, const TriangleFamily& family,
                    const TriangleFamily& removed, std::vector<Spin>& with,
                    std::vector<Spin>& without) {
  const Volume& vol = model.volume();
  paint_spins(family, vol, with);
  paint_spins(family.without(removed), vol, without);
  return model.deterministic(with, 1) - model.deterministic(without, 1);
}

BoundReport make_report(const EnergyModel& model, std::uint64_t instance, std::string check,
                        std::size_t level, double lhs, double rhs) {
  BoundReport r;
  r.alpha = model.spec().alpha;
  r.j1 = model.spec().j1;
  r.n = model.volume().size();
  r.instance = instance;
  r.check = std::move(check);
  r.level = level;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.pass = r.margin >= -kBoundTolerance;
  return r;
}

}  // namespace

BoundReport check_erase_smallest(const EnergyModel& model, const TriangleFamily& family,
                                 std::uint64_t instance) {
  return check_erase_prefix(model, family, 1, instance);
}

BoundReport check_erase_prefix(const EnergyModel& model, const TriangleFamily& family,
                               std::size_t i, std::uint64_t instance) {
  if (i < 1 || i > family.size())
    throw std::domain_error("check_erase_prefix: level out of range");
  const double z = zeta(model.spec().alpha);
  const auto ordered = family.by_mass();
  TriangleFamily removed;
  double rhs = 0.0;
  for (std::size_t l = 0; l < i; ++l) {
    removed.insert(ordered[l]);
    rhs += z * std::pow(static_cast<double>(ordered[l].mass()), model.spec().alpha);
  }
  std::vector<Spin> with(model.volume().size()), without(model.volume().size());
  const double lhs = erasure_cost(model, family, removed, with, without);
  return make_report(model, instance, i == 1 ? "erase_smallest" : "erase_prefix", i, lhs, rhs);
}

std::vector<BoundReport> check_contour_bound(const EnergyModel& model,
                                             const TriangleFamily& family, SeparationConstant c,
                                             std::uint64_t instance) {
  const double z = zeta(model.spec().alpha);
  std::vector<Spin> with(model.volume().size()), without(model.volume().size());
  std::vector<BoundReport> out;
  const auto parts = contours(family, c);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const double lhs = erasure_cost(model, family, parts[k].triangles(), with, without);
    const double rhs = 0.5 * z * contour_power_mass(parts[k], model.spec().alpha);
    auto r = make_report(model, instance, "contour", k, lhs, rhs);
    r.c = c.value;
    out.push_back(std::move(r));
  }
  return out;
}

double telescoping_residual(const EnergyModel& model, const TriangleFamily& family) {
  const Volume& vol = model.volume();
  std::vector<Spin> spins(vol.size());
  paint_spins(family, vol, spins);
  const double total = model.deterministic(spins, 1);
  const auto ordered = family.by_mass();
  TriangleFamily remaining = family;
  double previous = total;
  double sum = 0.0;
  for (const auto& t : ordered) {
    remaining = remaining.without(TriangleFamily{t});
    paint_spins(remaining, vol, spins);
    const double e = model.deterministic(spins, 1);
    sum += previous - e;
    previous = e;
  }
  return std::abs(sum - total);
}

EnergySweep verify_energy_exhaustive(const CouplingSpec& spec, std::size_t n, SeparationConstant c,
                                     bool keep_reports, unsigned jobs) {
  if (n == 0 || n > 24) throw CapacityError("verify_energy_exhaustive: n must be in [1, 24]");
  const Volume vol = Volume::centered(n);
  const EnergyModel model(spec, vol);
  const std::uint64_t count = std::uint64_t{1} << n;

  // Work is split into fixed blocks; per-block results are merged in block
  // order so the report stream is ordered by instance id.
  constexpr std::uint64_t block = 256;
  const std::size_t blocks = static_cast<std::size_t>((count + block - 1) / block);
  std::vector<EnergySweep> partial(blocks);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    EnergySweep& s = partial[b];
    constexpr double inf = std::numeric_limits<double>::infinity();
    s.min_margin_smallest = s.min_margin_prefix = s.min_margin_contour = inf;
    const std::uint64_t end = std::min<std::uint64_t>(count, (b + 1) * block);
    for (std::uint64_t bits = b * block; bits < end; ++bits) {
      const auto family = spins_to_triangles(SpinConfiguration::from_bits(vol, bits));
      ++s.configurations;
      if (family.empty()) continue;
      auto take = [&](BoundReport r, double& min_margin) {
        r.c = c.value;
        ++s.checks;
        if (!r.pass) ++s.failures;
        min_margin = std::min(min_margin, r.margin);
        if (keep_reports) s.reports.push_back(std::move(r));
      };
      take(check_erase_smallest(model, family, bits), s.min_margin_smallest);
      for (std::size_t i = 2; i <= family.size(); ++i)
        take(check_erase_prefix(model, family, i, bits), s.min_margin_prefix);
      for (auto& r : check_contour_bound(model, family, c, bits))
        take(std::move(r), s.min_margin_contour);
      s.max_telescoping_residual =
          std::max(s.max_telescoping_residual, telescoping_residual(model, family));
    }
  });

  EnergySweep total;
  total.spec = spec;
  total.n = n;
  total.c = c.value;
  constexpr double inf = std::numeric_limits<double>::infinity();
  total.min_margin_smallest = total.min_margin_prefix = total.min_margin_contour = inf;
  for (auto& s : partial) {
    total.configurations += s.configurations;
    total.checks += s.checks;
    total.failures += s.failures;
    total.min_margin_smallest = std::min(total.min_margin_smallest, s.min_margin_smallest);
    total.min_margin_prefix = std::min(total.min_margin_prefix, s.min_margin_prefix);
    total.min_margin_contour = std::min(total.min_margin_contour, s.min_margin_contour);
    total.max_telescoping_residual =
        std::max(total.max_telescoping_residual, s.max_telescoping_residual);
    total.reports.insert(total.reports.end(), std::make_move_iterator(s.reports.begin()),
                         std::make_move_iterator(s.reports.end()));
  }
  return total;
}

double empirical_j1_threshold(double alpha, std::size_t n, std::span<const double> j1_grid,
                              SeparationConstant c, unsigned jobs) {
  std::vector<double> grid(j1_grid.begin(), j1_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double j1 : grid) {
    CouplingSpec spec{alpha, j1, 1e-10};
    if (verify_energy_exhaustive(spec, n, c, false, jobs).all_pass()) return j1;
  }
  return -1.0;
}

void write_bound_csv(std::ostream& out, std::span<const BoundReport> reports) {
  csv::header(out, "alpha,j1,C,N,instance,lhs,rhs,margin,pass,check,level");
  for (const auto& r : reports) {
    out << csv::number(r.alpha) << ',' << csv::number(r.j1) << ',' << csv::number(r.c) << ','
        << r.n << ',' << r.instance << ',' << csv::number(r.lhs) << ',' << csv::number(r.rhs)
        << ',' << csv::number(r.margin) << ',' << csv::boolean(r.pass) << ',' << r.check << ','
        << r.level << '\n';
  }
}

}  // namespace rfim
