#include <doctest.h>

#include <cmath>

#include "bsq/errors.hpp"
#include "bsq/functional.hpp"
#include "bsq/simulator.hpp"

using namespace bsq;

namespace {

SimState smooth(int K, double amp) {
  SimState st = SimState::zero(K);
  st.u[1] = {amp, 0.0};
  st.u[2] = {0.0, 0.5 * amp};
  st.ut[1] = {0.0, 0.3 * amp};
  st.ut[3] = {0.2 * amp, -0.1 * amp};
  return st;
}

double dist(const SimState& a, const SimState& b) {
  double m = 0.0;
  const std::size_t n = std::min(a.u.size(), b.u.size());
  for (std::size_t k = 0; k < n; ++k) m = std::max({m, std::abs(a.u[k] - b.u[k]), std::abs(a.ut[k] - b.ut[k])});
  return m;
}

SimState run(SimConfig cfg, SimState st, double t) {
  Simulator sim(cfg);
  sim.run(st, t);
  return st;
}

}  // namespace

TEST_CASE("fft sizes") {
  CHECK(fft_size_at_least(1) == 1);
  CHECK(fft_size_at_least(7) == 8);
  CHECK(fft_size_at_least(97) == 100);
  CHECK(fft_size_at_least(129) == 135);
  SimConfig c;
  c.p = 3;
  c.K = 32;
  CHECK(Simulator(c).padded_size() >= 4 * 32 + 1);
}

TEST_CASE("config validation") {
  SimConfig c;
  c.p = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.p = 2;
  c.sign = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.sign = -1;
  c.dt = -0.1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.dt = 0.0;
  c.K = 64;
  CHECK(c.step_size() == doctest::Approx(0.5 / lambda(64.0)));
}

TEST_CASE("forcing of a single cosine") {
  // u = 2a cos x, so u^2 = 2a^2 + 2a^2 cos 2x and (u^2)^(2) = a^2
  SimConfig c;
  c.K = 8;
  c.sign = -1;
  Simulator sim(c);
  std::vector<cplx> u(9, cplx{});
  const double a = 0.3;
  u[1] = a;
  const auto F = sim.forcing(u);
  CHECK(F[2].real() == doctest::Approx(-4.0 * a * a));
  CHECK(std::abs(F[1]) < 1e-15);
  CHECK(F[0] == cplx{});
  const auto x = sim.physical(u);
  CHECK(x[0] == doctest::Approx(2 * a));
}

TEST_CASE("zero stays zero") {
  SimConfig c;
  c.K = 16;
  const auto st = run(c, SimState::zero(16), 1.0);
  for (std::size_t k = 0; k < st.u.size(); ++k) CHECK(st.u[k] == cplx{});
  CHECK(st.t == doctest::Approx(1.0));
}

TEST_CASE("tiny data follows the linear flow") {
  SimConfig c;
  c.K = 32;
  const SimState s0 = smooth(32, 1e-8);
  const auto st = run(c, s0, 1.0);
  const auto lin = propagate_linear(spectral_from_half(s0.u), spectral_from_half(s0.ut), 1.0);
  for (const auto& n : lin.nodes())
    if (n.xi >= 0) CHECK(std::abs(n.value - st.u[std::size_t(n.xi)]) < 1e-12);
}

TEST_CASE("linear energy per mode is conserved") {
  SimConfig c;
  c.K = 32;
  c.nonlinear = false;
  Simulator sim(c);
  SimState st = smooth(32, 1.0);
  st.ut[0] = 0.4;  // the k = 0 mode drifts linearly but keeps its energy
  const auto e0 = mode_energy(st);
  for (int i = 0; i < 1000; ++i) sim.step(st);
  const auto e1 = mode_energy(st);
  for (std::size_t k = 0; k < e0.size(); ++k)
    if (e0[k] > 0) CHECK(std::abs(e1[k] - e0[k]) < 1e-12 * e0[k]);
  CHECK(st.u[0].real() == doctest::Approx(0.4 * 1000 * c.step_size()));
}

TEST_CASE("fourth-order self-convergence") {
  SimConfig c;
  c.K = 16;
  auto at = [&](double dt) {
    SimConfig x = c;
    x.dt = dt;
    return run(x, smooth(16, 0.5), 1.0);
  };
  const auto a = at(1.0 / 100), b = at(1.0 / 200), d = at(1.0 / 400);
  const double order = std::log2(dist(a, b) / dist(b, d));
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("solution stays real") {
  SimConfig c;
  c.K = 24;
  c.p = 3;
  Simulator sim(c);
  SimState st = smooth(24, 0.4);
  for (int i = 0; i < 50; ++i) {
    sim.step(st);
    CHECK(sim.reality_defect(st.u) < 1e-12 * 0.4);
  }
}

TEST_CASE("doubling K changes band-limited runs very little") {
  SimConfig a;
  a.K = 16;
  a.dt = 1e-3;
  SimConfig b = a;
  b.K = 32;
  SimState sa = smooth(16, 0.05), sb = SimState::zero(32);
  for (int k = 0; k <= 16; ++k) {
    sb.u[std::size_t(k)] = sa.u[std::size_t(k)];
    sb.ut[std::size_t(k)] = sa.ut[std::size_t(k)];
  }
  const auto ra = run(a, sa, 0.5), rb = run(b, sb, 0.5);
  double scale = 0.0;
  for (const auto& z : rb.u) scale = std::max(scale, std::abs(z));
  CHECK(dist(ra, rb) < 1e-8 * scale * 100);  // u_t carries a lambda factor
  double u_only = 0.0;
  for (int k = 0; k <= 16; ++k) u_only = std::max(u_only, std::abs(ra.u[std::size_t(k)] - rb.u[std::size_t(k)]));
  CHECK(u_only < 1e-8 * scale);
}

TEST_CASE("time reversal returns the data to O(dt^4)") {
  SimConfig c;
  c.K = 16;
  auto back_error = [&](double dt) {
    SimConfig x = c;
    x.dt = dt;
    Simulator sim(x);
    const SimState s0 = smooth(16, 0.5);
    SimState st = s0;
    sim.run(st, 0.5);
    for (auto& z : st.ut) z = -z;
    st.t = 0.0;
    sim.run(st, 0.5);
    for (auto& z : st.ut) z = -z;
    return dist(st, s0);
  };
  const double e1 = back_error(1.0 / 50), e2 = back_error(1.0 / 100);
  CHECK(e1 < 1e-5);
  CHECK(e1 / e2 > 12.0);
}

TEST_CASE("blow-up keeps the last good state") {
  SimConfig c;
  c.K = 8;
  c.p = 5;
  c.dt = 0.1;
  Simulator sim(c);
  SimState st = smooth(8, 1e60);
  const SimState before = st;
  try {
    sim.step(st);
    FAIL("expected NumericalBlowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.last_good().t == before.t);
    CHECK(e.last_good().u == before.u);
  }
  CHECK(st.u == before.u);
}

TEST_CASE("loading data") {
  auto u0 = SpectralData::on_support(FrequencySet::torus({3}));
  for (auto& n : u0.nodes()) n.value = {1.0, n.xi > 0 ? 1.0 : -1.0};
  CHECK(state_from_spectral(u0, u0, 8).u[3] == cplx(1.0, 1.0));
  CHECK_THROWS_AS(state_from_spectral(u0, u0, 2), ValidationError);
  auto bad = u0;
  bad.nodes()[0].value = {5.0, 0.0};
  CHECK_THROWS_AS(state_from_spectral(bad, u0, 8), ValidationError);
}

TEST_CASE("finite-difference probe") {
  const auto w = build_witness(WitnessConfig::make(Domain::Torus, 2, 16, -1.0));
  const double eps[] = {1e-3, 5e-4};
  const auto pr = fd_derivative_probe(w, 2, 1.0, eps);
  const cplx a = compute_ap_torus(w, 2, 1.0).values[0];
  CHECK(pr.converged);
  CHECK(std::abs(pr.value - a) / std::abs(a) < 0.01);
  // the two raw values already agree to O(eps^2)
  CHECK(std::abs(pr.raw[0] - pr.raw[1]) / std::abs(pr.raw[1]) < 1e-3);
  CHECK(pr.simulations == 4);

  ProbeOptions lin;
  lin.nonlinear = false;
  CHECK(std::abs(fd_derivative_probe(w, 2, 1.0, eps, lin).value) < 1e-9 * std::abs(a));

  const auto w3 = build_witness(WitnessConfig::make(Domain::Torus, 3, 8, -1.0));
  const auto p3 = fd_derivative_probe(w3, 3, 1.0, eps);
  CHECK(p3.simulations == 4);  // odd symmetry halves the runs
  CHECK(std::abs(p3.value - compute_ap_torus(w3, 3, 1.0).values[0]) / std::abs(p3.value) < 0.01);

  const auto line = build_witness(WitnessConfig::make(Domain::Line, 2, 8, -1.0), 4);
  CHECK_THROWS_AS(fd_derivative_probe(line, 2, 1.0, eps), ValidationError);
}

TEST_CASE("inflation experiment") {
  const std::vector<std::int64_t> Ns{4, 8};
  const auto a = inflation_experiment(2, -0.6, Ns, 1e-2);
  const auto b = inflation_experiment(2, -0.6, Ns, 1e-3);
  REQUIRE(a.rows.size() == 2);
  // quadratic response: ten times smaller data, about a hundred times smaller output
  for (std::size_t i = 0; i < 2; ++i) CHECK(a.rows[i].window_sup / b.rows[i].window_sup == doctest::Approx(100).epsilon(0.05));
  CHECK(a.rows[0].K > 4 * 4);
  InflationOptions bad;
  bad.K = 16;
  CHECK_THROWS_AS(inflation_experiment(2, -0.6, std::vector<std::int64_t>{4}, 1e-2, 1.0, bad), ValidationError);
}
