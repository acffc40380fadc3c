#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "rfim/disorder.hpp"
#include "rfim/metropolis.hpp"

using namespace rfim;

TEST_CASE("run config validation") {
  RunConfig ok;
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.sweeps = bad.burnin;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.size = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.realizations = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.boundary = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.alpha = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("flip costs match full energy differences") {
  const CouplingSpec spec{0.55, 3.0, 1e-10};
  const Volume v = Volume::centered(9);
  const EnergyModel model(spec, v);
  const auto h = DisorderField::generate(v, 0.7, FieldDistribution::gaussian, 21);
  for (int tau : {1, -1}) {
    MetropolisChain chain(model, h.values, 0.7, 1.0, tau, 5);
    SplitMix64 rng(77);
    for (int step = 0; step < 200; ++step) {
      std::vector<Spin> s(chain.spins().begin(), chain.spins().end());
      const auto i = static_cast<std::size_t>(rng.below(v.size()));
      const SpinConfiguration before(v, s, tau);
      s[i] = static_cast<Spin>(-s[i]);
      const SpinConfiguration after(v, s, tau);
      const double direct = hamiltonian(spec, after, h, 0.7) - hamiltonian(spec, before, h, 0.7);
      CHECK(std::abs(chain.flip_cost(i) - direct) < 1e-9);
      CHECK(std::abs(model.flip_cost(before.spins(), tau, i, h.values, 0.7) - direct) < 1e-9);
      chain.propose(static_cast<std::size_t>(rng.below(v.size())));
      CHECK(std::abs(chain.energy() - chain.recomputed_energy()) < 1e-9);
    }
  }
}

TEST_CASE("flip and flip back negate the cost") {
  const CouplingSpec spec{0.3, 5.0, 1e-10};
  const Volume v = Volume::centered(12);
  const EnergyModel model(spec, v);
  const auto h = DisorderField::generate(v, 0.2, FieldDistribution::bernoulli, 2);
  // beta = 0 accepts every proposal
  MetropolisChain chain(model, h.values, 0.2, 0.0, 1, 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double forward = chain.flip_cost(i);
    const double e0 = chain.energy();
    REQUIRE(chain.propose(i));
    CHECK(chain.flip_cost(i) == doctest::Approx(-forward));
    CHECK(chain.energy() == doctest::Approx(e0 + forward));
  }
}

TEST_CASE("all-plus flip cost is the closed sum over the whole line") {
  for (double alpha : {0.0, 0.55}) {
    const CouplingSpec spec{alpha, 10.0, 1e-10};
    const Volume v = Volume::centered(40);
    const EnergyModel model(spec, v);
    MetropolisChain chain(model, {}, 0.0, 1.0, 1, 0);
    const double expected = 4.0 * oracle::coupling_tail(alpha, 10.0, 1);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(chain.flip_cost(i) - expected) < 1e-8);
    CHECK(chain.energy() == 0.0);
    CHECK(chain.minus_count() == 0);
  }
}

TEST_CASE("detailed balance of the single-site kernel on 4 sites") {
  const CouplingSpec spec{0.55, 2.0, 1e-10};
  const Volume v = Volume::centered(4);
  const EnergyModel model(spec, v);
  const auto h = DisorderField::generate(v, 0.5, FieldDistribution::gaussian, 12);
  const double theta = 0.5, beta = 0.4;

  std::vector<double> energy(16), weight(16);
  double z = 0.0;
  for (std::uint64_t b = 0; b < 16; ++b) {
    const auto s = oracle::spins_of(b, 4);
    energy[b] = oracle::H0(0.55, 2.0, s, v.lo, 1) + theta * oracle::G(s, h.values);
    weight[b] = std::exp(-beta * energy[b]);
    z += weight[b];
  }

  // kernel entries from the chain's own flip costs
  MetropolisChain chain(model, h.values, theta, beta, 1, 3);
  for (std::uint64_t b = 0; b < 16; ++b) {
    chain.reset(oracle::spins_of(b, 4));
    for (std::size_t i = 0; i < 4; ++i) {
      const std::uint64_t c = b ^ (std::uint64_t{1} << i);
      const double p_bc = 0.25 * std::min(1.0, std::exp(-beta * chain.flip_cost(i)));
      const double p_cb = 0.25 * std::min(1.0, std::exp(-beta * (energy[b] - energy[c])));
      CHECK(weight[b] * p_bc == doctest::Approx(weight[c] * p_cb).epsilon(1e-9));
    }
  }

  // empirical occupation against the Gibbs weights
  chain.reset(oracle::spins_of(0, 4));
  std::vector<double> counts(16, 0.0);
  const std::size_t samples = 200'000;
  for (std::size_t k = 0; k < 1000; ++k) chain.sweep();
  for (std::size_t k = 0; k < samples; ++k) {
    for (int t = 0; t < 3; ++t) chain.sweep();
    std::uint64_t b = 0;
    for (std::size_t i = 0; i < 4; ++i)
      if (chain.spins()[i] < 0) b |= std::uint64_t{1} << i;
    counts[b] += 1.0;
  }
  double chi2 = 0.0;
  for (std::uint64_t b = 0; b < 16; ++b) {
    const double expected = static_cast<double>(samples) * weight[b] / z;
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  // 15 degrees of freedom; the 0.999 quantile is 37.7, widened for the
  // residual correlation between thinned samples
  CHECK(chi2 < 60.0);
}

TEST_CASE("sampler agrees with the exact marginal on 8 sites") {
  RunConfig cfg;
  cfg.size = 8;
  cfg.j1 = 2.0;
  cfg.sweeps = 60'000;
  cfg.burnin = 1'000;
  for (auto [beta, theta] : {std::pair{0.0, 0.5}, std::pair{0.3, 0.5}}) {
    cfg.beta = beta;
    cfg.theta = theta;
    const auto h = DisorderField::generate(cfg.volume(), theta, FieldDistribution::bernoulli, 4);
    const auto est = metropolis_run(cfg, h, 99);
    const double exact = exact_gibbs_marginal(cfg.spec(), cfg.volume(), h, theta, beta, 0);
    CHECK(est.standard_error > 0.0);
    CHECK(std::abs(est.estimate - exact) <= 3.0 * est.standard_error + 1e-12);
    CHECK(est.basic1_violations == 0);
    CHECK(est.max_drift < kDriftTolerance);
    CHECK(est.samples == cfg.sweeps - cfg.burnin);
    if (beta == 0.0) CHECK(est.acceptance == 1.0);
  }
}

TEST_CASE("cold chain with plus boundary stays near the ground state") {
  RunConfig cfg;
  cfg.size = 64;
  cfg.beta = 5.0;
  cfg.theta = 0.0;
  cfg.sweeps = 2'000;
  cfg.burnin = 100;
  const auto est = metropolis_run(cfg, DisorderField::zeros(cfg.volume()), 1);
  CHECK(est.estimate < 1e-3);
}

TEST_CASE("drift guard runs and stays quiet") {
  const CouplingSpec spec{0.55, 2.0, 1e-10};
  const Volume v = Volume::centered(256);
  const EnergyModel model(spec, v);
  const auto h = DisorderField::generate(v, 1.0, FieldDistribution::gaussian, 1);
  MetropolisChain chain(model, h.values, 1.0, 0.1, 1, 4);
  for (int s = 0; s < 200; ++s) chain.sweep();
  CHECK(chain.proposals() == 200 * 256);
  CHECK(chain.drift_checks() == 200 * 256 / kDriftInterval);
  CHECK(chain.max_drift() < kDriftTolerance);
  CHECK(chain.accepted() > 0);
}

TEST_CASE("batch means") {
  std::vector<std::uint8_t> constant(640, 1);
  CHECK(batch_means_error(constant) == 0.0);
  SplitMix64 rng(5);
  std::vector<std::uint8_t> coin(64'000);
  for (auto& x : coin) x = rng.uniform() < 0.3 ? 1 : 0;
  const double iid = std::sqrt(0.3 * 0.7 / 64'000.0);
  CHECK(batch_means_error(coin) == doctest::Approx(iid).epsilon(0.35));
  // long runs inflate the error
  std::vector<std::uint8_t> sticky(64'000);
  for (std::size_t i = 0; i < sticky.size(); ++i) sticky[i] = (i / 3000) % 2;
  CHECK(batch_means_error(sticky) > 5.0 * std::sqrt(0.25 / 64'000.0));
}

TEST_CASE("contour cover test agrees with the full decomposition") {
  const SeparationConstant c{3.0};
  const Volume v = Volume::centered(12);
  for (std::uint64_t bits = 0; bits < 4096; ++bits) {
    const auto fam = spins_to_triangles(SpinConfiguration::from_bits(v, bits));
    for (std::int64_t site : {-2, 0, 3})
      CHECK(contour_covers(fam, site, c, 32) == contour_covers(fam, site, c, 0));
  }
}

TEST_CASE("Peierls decomposition holds per sample") {
  RunConfig cfg;
  cfg.size = 12;
  const Volume v = cfg.volume();
  std::vector<SpinConfiguration> samples;
  samples.emplace_back(v);
  for (std::uint64_t bits = 1; bits < 4096; bits += 3) samples.push_back(SpinConfiguration::from_bits(v, bits));
  const auto d = peierls_decomposition_check(cfg, samples);
  CHECK(d.holds());
  CHECK(d.samples == samples.size());
  CHECK(d.minus_at_origin <= d.contour_at_origin);
  CHECK(d.minus_frequency() <= d.contour_frequency());

  const std::vector<SpinConfiguration> plus{SpinConfiguration(v)};
  const auto p = peierls_decomposition_check(cfg, plus);
  CHECK(p.minus_at_origin == 0);
  CHECK(p.contour_at_origin == 0);
}

TEST_CASE("disorder sweeps are reproducible") {
  RunConfig cfg;
  cfg.size = 32;
  cfg.sweeps = 400;
  cfg.burnin = 50;
  cfg.realizations = 4;
  cfg.j1 = 2.0;
  cfg.beta = 0.3;
  cfg.theta = 0.5;
  cfg.seed = 17;
  const auto a = disorder_sweep(cfg);
  const auto b = disorder_sweep(cfg);
  auto par = cfg;
  par.jobs = 3;
  const auto c = disorder_sweep(par);
  REQUIRE(a.realizations.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(a.realizations[r].estimate == b.realizations[r].estimate);
    CHECK(a.realizations[r].estimate == c.realizations[r].estimate);
    CHECK(a.realizations[r].field_seed == hash_combine(17, 2 * r));
    CHECK(a.realizations[r].chain_seed == hash_combine(17, 2 * r + 1));
  }
  CHECK(a.mean == b.mean);
  CHECK(a.mean == c.mean);
  std::ostringstream x, y;
  write_run_csv(x, a);
  write_run_csv(y, c);
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("# schema=1\nrow,field_seed,", 0) == 0);

  auto other = cfg;
  other.seed = 18;
  CHECK(disorder_sweep(other).mean != a.mean);

  CHECK(a.b_bar == doctest::Approx(b_bar(0.3, 0.5, 0.55)));
  CHECK(a.reference_100 == doctest::Approx(std::exp(-a.b_bar / 100.0)));
  CHECK(a.reference_200 == doctest::Approx(std::exp(-a.b_bar / 200.0)));
  for (const auto& e : a.realizations) {
    CHECK(e.estimate >= 0.0);
    CHECK(e.estimate <= 1.0);
    CHECK(e.standard_error >= 0.0);
  }
}

TEST_CASE("theta = 0 repeats one realization") {
  RunConfig cfg;
  cfg.size = 16;
  cfg.sweeps = 300;
  cfg.burnin = 20;
  cfg.realizations = 3;
  cfg.beta = 0.3;
  cfg.theta = 0.0;
  const auto rep = disorder_sweep(cfg);
  REQUIRE(rep.realizations.size() == 3);
  CHECK(rep.realizations[1].estimate == rep.realizations[0].estimate);
  CHECK(rep.realizations[2].estimate == rep.realizations[0].estimate);
  CHECK(rep.mean == rep.realizations[0].estimate);
}
