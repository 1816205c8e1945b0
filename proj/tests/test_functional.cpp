#include <doctest.h>

#include <cmath>
#include <random>

#include "bsq/errors.hpp"
#include "bsq/functional.hpp"
#include "oracles.hpp"

using namespace bsq;

TEST_CASE("time integral matches quadrature") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double alpha = 0.05 + 30.0 * U(rng);
    const double beta = -40.0 + 80.0 * U(rng);
    const double t = 0.05 + 2.0 * U(rng);
    const cplx q = oracle::time_integral(alpha, beta, t);
    worst = std::max(worst, std::abs(time_integral({alpha, beta, t}) - q) / std::abs(q));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("time integral near and at resonance") {
  const double alpha = 3.7, t = 1.3;
  CHECK(std::abs(time_integral({alpha, alpha, t}) - time_integral_resonant(alpha, t)) < 1e-15);
  CHECK(std::abs(time_integral({alpha, -alpha, t}) - time_integral_resonant(alpha, t, true)) < 1e-15);
  CHECK(TimeIntegralParams{alpha, alpha * (1 + 1e-10), t}.near_resonant());
  CHECK_FALSE(TimeIntegralParams{alpha, 2 * alpha, t}.near_resonant());

  // the term-by-term form loses digits as beta -> alpha; the factored one does not
  for (double rel : {1e-4, 1e-7, 1e-10, 1e-13}) {
    const double beta = alpha * (1 + rel);
    const cplx q = oracle::time_integral(alpha, beta, t);
    CHECK(std::abs(time_integral({alpha, beta, t}) - q) / std::abs(q) < 1e-12);
  }
  // far from resonance both agree
  const cplx a = time_integral({alpha, 11.0, t}), b = time_integral_expanded({alpha, 11.0, t});
  CHECK(std::abs(a - b) < 1e-14);

  CHECK(time_integral({alpha, 2.0, 0.0}) == cplx{});
  CHECK(std::abs(time_integral({0.0, 2.0, 1.0})) == 0.0);
}

TEST_CASE("p! constant") {
  CHECK(derivative_constant(2) == 2.0);
  CHECK(derivative_constant(3) == 6.0);
  CHECK(derivative_constant(7) == 5040.0);
}

TEST_CASE("torus A_p against brute-force tuples") {
  for (int p : {2, 3, 4})
    for (std::int64_t N : {3, 5}) {
      const double sigma = 0.25;
      const auto w = build_witness({Domain::Torus, p, N, sigma, -1.0});
      for (double t : {0.6, 1.4}) {
        const cplx got = compute_ap_torus(w, p, t).values.at(0);
        const cplx ordered = compute_ap_torus(w, p, t, {false}).values.at(0);
        const cplx ref = oracle::torus_ap(w.u0.support().with_side(Side::Plus).modes(), p,
                                          w.window.mode(), double(N), sigma, t);
        CHECK(std::abs(got - ref) / std::abs(ref) < 1e-10);
        CHECK(std::abs(ordered - got) / std::abs(got) < 1e-12);
      }
    }
}

TEST_CASE("torus A_p is homogeneous of degree p in the amplitude") {
  const std::int64_t N = 8;
  const auto a = build_witness({Domain::Torus, 3, N, 0.0, -1.0});
  const auto b = build_witness({Domain::Torus, 3, N, 1.0, -1.0});
  const cplx va = compute_ap_torus(a, 3, 1.0).values[0], vb = compute_ap_torus(b, 3, 1.0).values[0];
  CHECK(std::abs(vb * std::pow(double(N), 3.0) - va) < 1e-12 * std::abs(va));
  CHECK(compute_ap_torus(a, 3, 0.0).values[0] == cplx{});
  CHECK_THROWS_AS(compute_ap_torus(a, 2, 1.0), ValidationError);
  CHECK_THROWS_AS(compute_ap_line(a, 3, 1.0), ValidationError);
}

TEST_CASE("line A_2 against adaptive quadrature") {
  for (std::int64_t N : {16, 64})
    for (double xi : {0.27, 0.375, 0.49}) {
      const auto w = build_witness(WitnessConfig::make(Domain::Line, 2, N, -1.0));
      const double t = 1.1;
      const cplx got = ap_line_point(w, 2, t, xi);
      const cplx ref = oracle::line_a2(double(N), w.config.sigma, t, xi);
      CHECK(std::abs(got - ref) / std::abs(ref) < 1e-6);
    }
}

TEST_CASE("line quadrature reports its convergence") {
  const auto w = build_witness(WitnessConfig::make(Domain::Line, 3, 32, -1.0), 16);
  LineOptions opt;
  opt.window_nodes = 8;
  const auto a = compute_ap_line(w, 3, 1.0, opt);
  CHECK(a.method == "gauss-legendre");
  CHECK(a.quadrature_rel_change < 1e-8);
  CHECK(a.warnings.empty());
  CHECK(a.hs_lower > 0.0);

  // the midpoint rule converges to the same value
  LineOptions mp = opt;
  mp.gauss = false;
  mp.nodes_per_dim = 256;
  const double xi = w.window.interval.mid();
  const cplx g = ap_line_point(w, 3, 1.0, xi, opt), m = ap_line_point(w, 3, 1.0, xi, mp);
  CHECK(std::abs(g - m) / std::abs(g) < 1e-4);

  // an unreasonably small budget is an error, not a silent truncation
  LineOptions tight = opt;
  tight.budget = 100;
  CHECK_THROWS_AS(compute_ap_line(w, 3, 1.0, tight), BudgetError);

  // tensor rules stop at p = 5
  LineOptions tensor;
  tensor.method = LineMethod::Tensor;
  const auto w7 = build_witness(WitnessConfig::make(Domain::Line, 7, 16, -1.0), 4);
  CHECK_THROWS_AS(compute_ap_line(w7, 7, 1.0, tensor), ValidationError);
}

TEST_CASE("Monte Carlo agrees with the tensor rule") {
  const auto w = build_witness(WitnessConfig::make(Domain::Line, 3, 16, -1.0), 16);
  LineOptions mc;
  mc.method = LineMethod::MonteCarlo;
  mc.mc_samples = 200000;
  const double xi = 0.9;
  const cplx a = ap_line_point(w, 3, 1.0, xi), b = ap_line_point(w, 3, 1.0, xi, mc);
  CHECK(std::abs(a - b) / std::abs(a) < 0.02);

  mc.mc_samples = 20000;
  mc.window_nodes = 4;
  const auto r = compute_ap_line(w, 3, 1.0, mc);
  CHECK(r.method == "monte-carlo");
  CHECK(r.mc_half_width > 0.0);
  // same seed, same numbers
  const auto r2 = compute_ap_line(w, 3, 1.0, mc);
  CHECK(r.values == r2.values);
}

TEST_CASE("window mass") {
  ApResult t;
  t.domain = Domain::Torus;
  t.xi = {2.0};
  t.weights = {1.0};
  t.values = {cplx(3.0, 4.0)};
  CHECK(hs_window_mass(t, -1.0) == doctest::Approx(5.0 / std::sqrt(5.0)));
  ApResult l;
  l.domain = Domain::Line;
  l.xi = {0.5, 1.0};
  l.weights = {0.25, 0.25};
  l.values = {1.0, 2.0};
  CHECK(hs_window_mass(l, 0.0) == doctest::Approx(std::sqrt(0.25 + 1.0)));
  CHECK_THROWS_AS(hs_window_mass(ApResult{}, 0.0), ValidationError);
}

TEST_CASE("log-log slope") {
  std::vector<double> x{2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.25));
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.25));
  CHECK(std::isnan(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0})));
}

TEST_CASE("growth tables") {
  const std::vector<std::int64_t> Ns{16, 32, 64, 128};
  const auto g = growth_table(2, Domain::Torus, -1.0, 0.0, 1.0, Ns);
  CHECK(g.predicted_slope == 1.0);
  CHECK(g.records.size() == Ns.size());
  CHECK(std::isnan(g.records[0].slope_running));
  CHECK(g.records.back().slope_running == doctest::Approx(g.slope));
  CHECK(std::abs(g.slope - 1.0) < 0.15);
  for (const auto& r : g.records) CHECK(r.ratio == doctest::Approx(r.ap_norm / (r.data_norm * r.data_norm)));

  CHECK(growth_table(3, Domain::Line, -1.0, 0.0, 1.0, std::vector<std::int64_t>{16}).predicted_slope == 1.0);
  CHECK_THROWS_AS(growth_table(2, Domain::Torus, 0.0, -1.0, 1.0, Ns), ValidationError);
  CHECK_THROWS_AS(growth_table(2, Domain::Torus, -1.0, 0.0, 0.0, Ns), ValidationError);

  // p = 4 and 5 on the line run through the nested Gauss rule
  const auto g4 = growth_table(4, Domain::Line, -1.0, 0.0, 1.0, std::vector<std::int64_t>{16, 32, 64});
  CHECK(g4.warnings.empty());
  CHECK(std::abs(g4.slope - g4.predicted_slope) < 0.25);
}
