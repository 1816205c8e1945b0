#include <doctest.h>

#include <cmath>
#include <random>

#include "bsq/errors.hpp"
#include "bsq/spectral.hpp"
#include "oracles.hpp"

using namespace bsq;

TEST_CASE("lambda and its excess") {
  CHECK(lambda(0.0) == 0.0);
  CHECK(lambda(1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(lambda(-3.0) == lambda(3.0));
  for (double x : {0.01, 0.3, 1.0, 7.0, 100.0}) {
    const long double ref = oracle::lambda(x) - static_cast<long double>(x) * x;
    CHECK(lambda_excess(x) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-9));
  }
  // stays in [0, 1/2), increases, and tends to 1/2
  double prev = -1.0;
  for (double x = 0.0; x < 1e6; x = 2.0 * x + 0.1) {
    const double r = lambda_excess(x);
    CHECK(r >= 0.0);
    CHECK(r < 0.5);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(lambda_excess(1e8) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sinc near zero") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-6) == doctest::Approx(1.0 - 1e-12 / 6.0).epsilon(1e-15));
  CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0));
}

TEST_CASE("frequency sets validate their components") {
  CHECK(FrequencySet::line({{2.0, 3.0}, {1.0, 1.5}}).component(0) == Interval{1.0, 1.5});
  CHECK_THROWS_AS(FrequencySet::line({{1.0, 3.0}, {2.0, 4.0}}), ValidationError);
  CHECK_THROWS_AS(FrequencySet::line({{-1.0, 3.0}}), ValidationError);
  CHECK_THROWS_AS(FrequencySet::line({{1.0, INFINITY}}), ValidationError);
  CHECK_THROWS_AS(FrequencySet::torus({3, 3}), ValidationError);
  CHECK_THROWS_AS(FrequencySet::torus({-2, 3}), ValidationError);

  const auto A = FrequencySet::line({{4.0, 5.0}, {8.0, 8.25}});
  CHECK(A.contains(4.5));
  CHECK_FALSE(A.contains(-4.5));
  CHECK(A.mirrored().contains(-4.5));
  CHECK(A.with_side(Side::Both).contains(-8.1));
  CHECK(A.measure() == doctest::Approx(1.25));
  CHECK(A.with_side(Side::Both).measure() == doctest::Approx(2.5));

  const auto T = FrequencySet::torus({4, 5, 8});
  CHECK(T.component_count() == 3);
  CHECK(T.component(2) == Interval::point(8.0));
  CHECK(T.with_side(Side::Both).measure() == 6.0);
}

TEST_CASE("nodes on a support reproduce its measure") {
  const auto A = FrequencySet::line({{10.0, 11.0}, {20.0, 20.3}});
  const auto d = SpectralData::on_support(A, 40);
  double w = 0.0;
  for (const auto& n : d.nodes()) w += n.weight;
  CHECK(w == doctest::Approx(2 * 1.3));
  for (std::size_t i = 1; i < d.nodes().size(); ++i) CHECK(d.nodes()[i - 1].xi < d.nodes()[i].xi);
}

TEST_CASE("sobolev norm against direct sums and integrals") {
  const auto T = FrequencySet::torus({3});
  auto d = SpectralData::on_support(T);
  for (auto& n : d.nodes()) n.value = {0.5, n.xi > 0 ? 0.25 : -0.25};
  const double s = -0.7;
  CHECK(sobolev_norm(d, s) == doctest::Approx(std::sqrt(2.0 * std::pow(10.0, s) * 0.3125)));

  // indicator of [N, N+1] and its mirror
  using boost::math::quadrature::gauss_kronrod;
  const double N = 12.0;
  auto line = SpectralData::on_support(FrequencySet::line({{N, N + 1}}), 256);
  for (auto& n : line.nodes()) n.value = 1.0;
  const double ref =
      std::sqrt(2.0 * gauss_kronrod<double, 31>::integrate([&](double x) { return std::pow(1 + x * x, s); }, N, N + 1));
  CHECK(sobolev_norm(line, s) == doctest::Approx(ref).epsilon(1e-6));

  line.nodes()[0].value = {NAN, 0.0};
  CHECK_THROWS_AS(sobolev_norm(line, s), ValidationError);
}

TEST_CASE("linear propagator") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  auto u0 = SpectralData::on_support(FrequencySet::torus({1, 2, 5}));
  auto u1 = u0;
  for (auto& n : u0.nodes()) n.value = {g(rng), g(rng)};
  for (auto& n : u1.nodes()) n.value = {g(rng), g(rng)};
  // make them Hermitian
  for (auto* d : {&u0, &u1})
    for (auto& n : d->nodes())
      if (n.xi < 0) n.value = std::conj(d->at(-n.xi));

  SUBCASE("t = 0 is the identity") {
    const auto u = propagate_linear(u0, u1, 0.0);
    for (std::size_t i = 0; i < u.nodes().size(); ++i) CHECK(u.nodes()[i].value == u0.nodes()[i].value);
  }
  SUBCASE("group property and energy") {
    const auto a = propagate_linear_state(u0, u1, 0.4);
    const auto b = propagate_linear_state(a.u, a.ut, 0.9);
    const auto c = propagate_linear_state(u0, u1, 1.3);
    for (std::size_t i = 0; i < c.u.nodes().size(); ++i) {
      CHECK(std::abs(b.u.nodes()[i].value - c.u.nodes()[i].value) < 1e-12);
      CHECK(std::abs(b.ut.nodes()[i].value - c.ut.nodes()[i].value) < 1e-11);
    }
    const auto e0 = linear_energy(u0, u1);
    for (double t : {0.1, 1.7, 25.0}) {
      const auto st = propagate_linear_state(u0, u1, t);
      const auto e = linear_energy(st.u, st.ut);
      for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == doctest::Approx(e0[i]).epsilon(1e-12));
    }
  }
  SUBCASE("stays Hermitian") {
    CHECK(propagate_linear(u0, u1, 2.5).hermitian_defect() < 1e-13);
  }
  SUBCASE("zero mode uses sin(t lambda)/lambda -> t") {
    std::vector<SpectralNode> nodes{{0.0, 1.0, 1.0}};
    const SpectralData z0(Domain::Torus, FrequencySet::torus({1}), nodes);
    nodes[0].value = 2.0;
    const SpectralData z1(Domain::Torus, FrequencySet::torus({1}), nodes);
    CHECK(propagate_linear(z0, z1, 3.0).nodes()[0].value == cplx(7.0, 0.0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(propagate_linear(u0, u1, -1.0), ValidationError);
    const auto other = SpectralData::on_support(FrequencySet::torus({1, 2}));
    CHECK_THROWS_AS(propagate_linear(u0, other, 1.0), ValidationError);
  }
}

TEST_CASE("spectral JSON round trip") {
  auto d = SpectralData::on_support(FrequencySet::line({{3.0, 3.5}}), 8, 3.0, 0.5);
  for (auto& n : d.nodes()) n.value = {n.xi, -n.xi / 2};
  const auto back = spectral_from_json(to_json(d));
  CHECK(back.same_grid(d));
  for (std::size_t i = 0; i < d.nodes().size(); ++i) {
    CHECK(back.nodes()[i].value == d.nodes()[i].value);
    CHECK(back.nodes()[i].weight == d.nodes()[i].weight);
  }
  CHECK_THROWS_AS(spectral_from_json(nlohmann::json::parse(R"({"domain":"sphere"})")), ValidationError);
}
