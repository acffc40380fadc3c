#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "rfim/model.hpp"

using namespace rfim;

TEST_CASE("coupling values") {
  const CouplingSpec s{0.55, 10.0, 1e-10};
  CHECK(coupling(s, 1) == 10.0);
  CHECK(coupling(s, 2) == doctest::Approx(std::pow(2.0, -1.45)).epsilon(1e-15));
  CHECK(coupling(s, 2) == doctest::Approx(0.366).epsilon(1e-3));
  CHECK(coupling({0.0, 10.0, 1e-10}, 3) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  for (int n = 2; n < 200; ++n) CHECK(coupling(s, n + 1) <= coupling(s, n));
  CHECK_THROWS_AS(coupling(s, 0), std::domain_error);
}

TEST_CASE("coupling spec validation") {
  CHECK_THROWS_AS((CouplingSpec{1.0, 10.0, 1e-10}.validate()), std::domain_error);
  CHECK_THROWS_AS((CouplingSpec{-0.1, 10.0, 1e-10}.validate()), std::domain_error);
  CHECK_THROWS_AS((CouplingSpec{0.5, 1.0, 1e-10}.validate()), std::domain_error);
  CHECK_THROWS_AS((CouplingSpec{0.5, 10.0, 0.0}.validate()), std::domain_error);
  CHECK_NOTHROW((CouplingSpec{0.0, 1.5, 1e-12}.validate()));
}

TEST_CASE("tail sums agree with the zeta-function oracle") {
  for (double alpha : {0.0, 0.1, 0.3, 0.55, 0.9}) {
    const CouplingSpec s{alpha, 10.0, 1e-10};
    for (std::int64_t d : {1, 2, 3, 7, 64, 65, 1000, 100000}) {
      const TailSum t = coupling_tail(s, d);
      CHECK(t.error_bound <= s.tail_tolerance);
      CHECK(std::abs(t.value - oracle::coupling_tail(alpha, 10.0, d)) < 1e-9);
    }
  }
}

TEST_CASE("doubling the truncation radius moves the tail by less than the tolerance") {
  const CouplingSpec s{0.55, 10.0, 1e-10};
  for (std::int64_t d : {1, 5, 40}) {
    const double a = coupling_tail(s, d, 64).value;
    const double b = coupling_tail(s, d, 128).value;
    CHECK(std::abs(a - b) < s.tail_tolerance);
  }
}

TEST_CASE("boundary field of a single site") {
  const CouplingSpec s{0.55, 10.0, 1e-10};
  const Volume v{0, 0};
  const double expected = 2.0 * (10.0 + boost::math::zeta(1.45) - 1.0);
  CHECK(std::abs(boundary_field(s, 0, v) - expected) < 2e-10);
  CHECK_THROWS_AS(boundary_field(s, 1, v), std::domain_error);
}

TEST_CASE("boundary field next to the edge at alpha = 0") {
  const CouplingSpec s{0.0, 10.0, 1e-10};
  const Volume v{0, 99};
  // outward side: j1 + sum_{n>=2} n^-2 ; far side starts at distance 100.
  const double outward = 10.0 + boost::math::zeta(2.0) - 1.0;
  const double far = oracle::coupling_tail(0.0, 10.0, 100);
  CHECK(std::abs(boundary_field(s, 0, v) - (outward + far)) < 1e-9);
}

TEST_CASE("boundary field in a wide volume is below twice the nearest tail") {
  const CouplingSpec s{0.55, 10.0, 1e-10};
  const Volume v{-500, 500};
  const std::int64_t d = 501;
  CHECK(boundary_field(s, 0, v) <= 2.0 * oracle::coupling_tail(0.55, 10.0, d) + 1e-9);
}

TEST_CASE("deterministic energy matches the pair-sum oracle exhaustively") {
  for (double alpha : {0.0, 0.55}) {
    const CouplingSpec s{alpha, 10.0, 1e-10};
    const Volume v{-3, 4};
    const EnergyModel model(s, v);
    for (std::uint64_t bits = 0; bits < 256; ++bits) {
      const auto spins = oracle::spins_of(bits, v.size());
      for (int tau : {1, -1}) {
        const double lib = model.deterministic(spins, tau);
        CHECK(std::abs(lib - oracle::H0(alpha, 10.0, spins, v.lo, tau)) < 1e-9);
      }
    }
  }
}

TEST_CASE("H_0 is non-negative and vanishes only on the boundary state") {
  const CouplingSpec s{0.55, 10.0, 1e-10};
  const Volume v = Volume::centered(14);
  const EnergyModel model(s, v);
  std::size_t zeros = 0;
  for (std::uint64_t bits = 0; bits < (1U << 14); ++bits) {
    const auto sigma = SpinConfiguration::from_bits(v, bits);
    const double e = model.deterministic(sigma);
    CHECK(e >= 0.0);
    if (e == 0.0) {
      ++zeros;
      CHECK(bits == 0);
    }
    // flipping the spins together with the boundary leaves H_0 unchanged
    CHECK(std::abs(model.deterministic(sigma.flipped()) - e) < 1e-9);
  }
  CHECK(zeros == 1);
}

TEST_CASE("single flip in a wide volume") {
  const CouplingSpec s{0.55, 10.0, 1e-10};
  const Volume v = Volume::centered(401);
  SpinConfiguration sigma(v);
  sigma.flip(0);
  const double expected = 2.0 * (2.0 * 10.0 + 2.0 * (boost::math::zeta(1.45) - 1.0));
  CHECK(std::abs(hamiltonian_deterministic(s, sigma) - expected) < 1e-8);
}

TEST_CASE("field energy and full hamiltonian") {
  const Volume v = Volume::centered(9);
  const auto h = DisorderField::generate(v, 0.3, FieldDistribution::gaussian, 42);
  const auto sigma = SpinConfiguration::from_bits(v, 0b101100111);
  std::vector<Spin> s(sigma.spins().begin(), sigma.spins().end());
  CHECK(std::abs(field_energy(sigma, h) - oracle::G(s, h.values)) < 1e-12);

  DisorderField neg = h;
  for (auto& x : neg.values) x = -x;
  CHECK(field_energy(sigma, neg) == doctest::Approx(-field_energy(sigma, h)));

  DisorderField ones = DisorderField::zeros(v);
  for (auto& x : ones.values) x = 1.0;
  const SpinConfiguration plus(v);
  CHECK(field_energy(plus, ones) == -9.0);

  const CouplingSpec spec{0.55, 10.0, 1e-10};
  CHECK(hamiltonian(spec, sigma, h, 0.0) == hamiltonian_deterministic(spec, sigma));
  CHECK(hamiltonian(spec, plus, h, 0.7) ==
        doctest::Approx(-0.7 * std::accumulate(h.values.begin(), h.values.end(), 0.0)));
  const double oracle_h = oracle::H0(0.55, 10.0, s, v.lo, 1) + 0.3 * oracle::G(s, h.values);
  CHECK(std::abs(hamiltonian(spec, sigma, h, 0.3) - oracle_h) < 1e-9);

  CHECK_THROWS_AS(field_energy(SpinConfiguration(Volume{0, 3}), h), std::domain_error);
}

TEST_CASE("disorder fields are reproducible and symmetric by construction") {
  const Volume v{-20, 20};
  const auto a = DisorderField::generate(v, 0.1, FieldDistribution::bernoulli, 9);
  const auto b = DisorderField::generate(v, 0.1, FieldDistribution::bernoulli, 9);
  CHECK(a.values == b.values);
  for (double x : a.values) CHECK((x == 1.0 || x == -1.0));
  // depends only on (seed, site): a sub-volume sees the same values
  const auto sub = DisorderField::generate(Volume{-5, 5}, 0.1, FieldDistribution::bernoulli, 9);
  for (std::int64_t i = -5; i <= 5; ++i) CHECK(sub.at(i) == a.at(i));

  std::size_t plus = 0;
  const Volume big{0, 19999};
  const auto h = DisorderField::generate(big, 1.0, FieldDistribution::bernoulli, 3);
  for (double x : h.values) plus += x > 0 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(plus) / 20000.0 - 0.5) < 0.02);

  for (auto d : {FieldDistribution::gaussian, FieldDistribution::subgaussian}) {
    const auto g = DisorderField::generate(big, 1.0, d, 5);
    const double mean = std::accumulate(g.values.begin(), g.values.end(), 0.0) / 20000.0;
    double var = 0.0;
    for (double x : g.values) var += (x - mean) * (x - mean);
    var /= 20000.0;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
  }
  CHECK(parse_field_distribution(to_string(FieldDistribution::subgaussian)) ==
        FieldDistribution::subgaussian);
  CHECK_THROWS(parse_field_distribution("cauchy"));
}

TEST_CASE("exact Gibbs marginal") {
  const CouplingSpec s{0.55, 2.0, 1e-10};
  const Volume v = Volume::centered(8);
  const auto h = DisorderField::generate(v, 0.5, FieldDistribution::bernoulli, 17);

  CHECK(exact_gibbs_marginal(s, v, h, 0.5, 0.0, 0) == 0.5);

  for (double beta : {0.05, 0.2, 0.7}) {
    const double lib = exact_gibbs_marginal(s, v, h, 0.5, beta, 0);
    const double ref = oracle::gibbs_marginal(0.55, 2.0, v.lo, v.size(), h.values, 0.5, beta, 0);
    CHECK(std::abs(lib - ref) < 1e-12);
  }

  // one site, no field: two-state partition function
  const Volume one{0, 0};
  const double b = boundary_field(s, 0, one);
  for (double beta : {0.1, 1.0}) {
    const double expected = std::exp(-beta * 2 * b) / (1 + std::exp(-beta * 2 * b));
    CHECK(exact_gibbs_marginal(s, one, DisorderField::zeros(one), 0.0, beta, 0) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  // large beta: ground state all plus; log-domain accumulation stays finite
  const double cold = exact_gibbs_marginal(CouplingSpec{0.55, 10.0, 1e-10}, v,
                                           DisorderField::zeros(v), 0.0, 100.0, 0);
  CHECK(cold >= 0.0);
  CHECK(cold < 1e-100);

  CHECK_THROWS_AS(exact_gibbs_marginal(s, Volume::centered(21), DisorderField::zeros(Volume::centered(21)),
                                       0.0, 1.0, 0),
                  CapacityError);
}

TEST_CASE("origin marginal decreases with beta at theta = 0") {
  const CouplingSpec s{0.55, 2.0, 1e-10};
  for (std::size_t n : {4, 7, 10}) {
    const Volume v = Volume::centered(n);
    double prev = 1.0;
    for (double beta : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0, 3.0}) {
      const double p = exact_gibbs_marginal(s, v, DisorderField::zeros(v), 0.0, beta, 0);
      CHECK(p <= prev + 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("log_add_exp") {
  CHECK(log_add_exp(-INFINITY, 3.0) == 3.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
}
