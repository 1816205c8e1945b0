#include "bsq/acceptance.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "bsq/functional.hpp"
#include "bsq/resonance.hpp"
#include "bsq/simulator.hpp"
#include "bsq/witness.hpp"

namespace bsq {

namespace {

// tolerances
constexpr double kSlopeTolEven = 0.15;
constexpr double kSlopeTolOddTorus = 0.15;
constexpr double kSlopeTolOddLine = 0.25;
constexpr std::int64_t kMaxN0 = 128;
constexpr double kBetaLimitTol = 0.05;
constexpr double kTimeIntegralTol = 1e-9;
constexpr double kProbeTol = 0.01;
constexpr double kLinearMatchTol = 1e-12;
constexpr double kOrderLo = 3.7, kOrderHi = 4.3;
constexpr double kEnergyTol = 1e-12;
constexpr double kNegativeControlFactor = 2.0;

std::vector<std::int64_t> powers_of_two(int lo, int hi) {
  std::vector<std::int64_t> v;
  for (int e = lo; e <= hi; ++e) v.push_back(std::int64_t{1} << e);
  return v;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

CriterionResult make(int id, bool pass, std::string detail) { return {id, {}, pass, std::move(detail), 0.0}; }

// 1 -----------------------------------------------------------------------
CriterionResult exponent_even() {
  const auto Ns = powers_of_two(4, 9);
  bool ok = true;
  std::ostringstream d;
  for (Domain dom : {Domain::Torus, Domain::Line})
    for (double s : {-1.0, -0.75}) {
      int hits = 0;
      double pred = 0.0;
      std::vector<double> slopes;
      for (double t : {0.7, 1.0, 1.3}) {
        const auto g = growth_table(2, dom, s, s + 1.0, t, Ns);
        pred = g.predicted_slope;
        slopes.push_back(g.slope);
        if (std::abs(g.slope - pred) <= kSlopeTolEven) ++hits;
      }
      ok = ok && hits >= 2;
      d << to_string(dom) << " s=" << s << " slopes";
      for (double x : slopes) d << ' ' << fmt(x);
      d << " vs " << pred << " (" << hits << "/3); ";
    }
  return make(1, ok, d.str());
}

// 2 -----------------------------------------------------------------------
CriterionResult exponent_odd() {
  bool ok = true;
  std::ostringstream d;
  for (Domain dom : {Domain::Torus, Domain::Line}) {
    const auto Ns = dom == Domain::Torus ? powers_of_two(4, 9) : powers_of_two(4, 8);
    const double tol = dom == Domain::Torus ? kSlopeTolOddTorus : kSlopeTolOddLine;
    for (double s : {-1.0, -0.8}) {
      const auto g = growth_table(3, dom, s, s + 1.0, 1.0, Ns);
      const bool hit = std::abs(g.slope - g.predicted_slope) <= tol && g.warnings.empty();
      ok = ok && hit;
      d << to_string(dom) << " s=" << s << " slope " << fmt(g.slope) << " vs " << g.predicted_slope << " +-"
        << tol << "; ";
    }
  }
  return make(2, ok, d.str());
}

// 3 -----------------------------------------------------------------------
CriterionResult sign_change() {
  const auto Ns = powers_of_two(4, 8);
  bool ok = true;
  std::ostringstream d;
  for (int p : {2, 3})
    for (Domain dom : {Domain::Torus, Domain::Line}) {
      const double above = 0.0, below = -1.0;
      const double sa = growth_table(p, dom, above, above + 1.0, 1.0, Ns).slope;
      const double sb = growth_table(p, dom, below, below + 1.0, 1.0, Ns).slope;
      ok = ok && sa < 0.0 && sb > 0.0;
      d << "p=" << p << ' ' << to_string(dom) << ": s=0 " << fmt(sa) << ", s=-1 " << fmt(sb) << "; ";
    }
  return make(3, ok, d.str());
}

// 4 -----------------------------------------------------------------------
CriterionResult resonance() {
  const auto Ns = powers_of_two(3, 10);
  bool ok = true;
  std::ostringstream d;
  std::int64_t worst_N0 = 0;
  for (int p = 2; p <= 9; ++p)
    for (Domain dom : {Domain::Torus, Domain::Line}) {
      const auto r = verify_resonance_bounds(p, dom, Ns);
      bool definite = r.N0.has_value();
      for (const auto& row : r.rows)
        if (r.N0 && row.N >= *r.N0) definite = definite && row.beta_over_scale_min > 0.0;
      const bool good = r.N0 && *r.N0 <= kMaxN0 && r.violations_from_N0() == 0 && definite;
      if (!good) d << "p=" << p << ' ' << to_string(dom) << " failed; ";
      if (r.N0) worst_N0 = std::max(worst_N0, *r.N0);
      ok = ok && good;
    }
  d << "max N0 " << worst_N0 << "; ";

  // beta / N^2 for p = 3 on the torus against the exact value at N = 512
  const std::int64_t N = 512;
  const auto r3 = verify_resonance_bounds(3, Domain::Torus, std::span<const std::int64_t>(&N, 1));
  const auto lam = [](long double x) { return std::fabs(x) * std::sqrt(1.0L + x * x); };
  const long double n = N;
  const long double exact = (lam(2 * n) - 2 * lam(n + 1)) / (n * n);
  const double got = r3.rows.at(0).beta_over_scale_min;
  const bool limit_ok = std::abs(got - 2.0) <= kBetaLimitTol * 2.0 &&
                        std::abs(got - static_cast<double>(exact)) <= 1e-9 * std::abs(got) &&
                        r3.rows.at(0).beta_over_scale_max == got;
  d << "p=3 torus beta/N^2 at N=512: " << fmt(got, 8) << " (exact " << fmt(static_cast<double>(exact), 8) << ")";
  return make(4, ok && limit_ok, d.str());
}

// 5 -----------------------------------------------------------------------
CriterionResult diophantine() {
  bool ok = true;
  std::ostringstream d;
  int checked = 0;
  for (int p = 3; p <= 25; p += 2) {
    const bool eq = solve_diophantine(p) == closed_form_profiles(p);
    if (!eq) d << "p=" << p << " mismatch; ";
    ok = ok && eq;
    ++checked;
  }
  d << checked << " odd p agree; ";
  for (int p : {3, 5, 7}) {
    const auto r = verify_representability(p, 64);
    const bool good = r.points > 0 && r.constructed == r.points && r.membership_ok && r.max_residual < 1e-9;
    ok = ok && good;
    d << "p=" << p << " represented " << r.constructed << '/' << r.points << " (residual " << fmt(r.max_residual, 2)
      << "); ";
  }
  return make(5, ok, d.str());
}

// 6 -----------------------------------------------------------------------
cplx quadrature_oracle(double alpha, double beta, double t) {
  using boost::math::quadrature::gauss_kronrod;
  const auto A = static_cast<long double>(alpha), B = static_cast<long double>(beta);
  const auto T = static_cast<long double>(t);
  auto re = [&](long double tau) { return std::sin(A * (T - tau)) * std::cos(B * tau); };
  auto im = [&](long double tau) { return std::sin(A * (T - tau)) * std::sin(B * tau); };
  const long double r = gauss_kronrod<long double, 61>::integrate(re, 0.0L, T, 20, 1e-16L);
  const long double i = gauss_kronrod<long double, 61>::integrate(im, 0.0L, T, 20, 1e-16L);
  return {static_cast<double>(r), static_cast<double>(i)};
}

CriterionResult equivalence() {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  int near = 0;
  for (int n = 0; n < 1000; ++n) {
    const double alpha = 0.1 + 40.0 * U(rng);
    const double t = 0.1 + 1.9 * U(rng);
    double beta;
    switch (n % 4) {
      case 0:  // near resonance from either side
        beta = alpha * (1.0 + (U(rng) < 0.5 ? -1 : 1) * std::pow(10.0, -12.0 + 9.0 * U(rng)));
        if (n % 8 == 0) beta = -beta;
        break;
      case 1:
        beta = (n % 8 == 1) ? alpha : -alpha;
        break;
      default:
        beta = -60.0 + 120.0 * U(rng);
    }
    if (TimeIntegralParams{alpha, beta, t}.near_resonant()) ++near;
    const cplx a = time_integral({alpha, beta, t});
    const cplx q = quadrature_oracle(alpha, beta, t);
    worst = std::max(worst, std::abs(a - q) / std::abs(q));
  }
  bool ok = worst < kTimeIntegralTol;
  std::ostringstream d;
  d << "time integral max rel err " << fmt(worst, 3) << " over 1000 triples (" << near << " near-resonant); ";

  const double eps[] = {1e-3, 5e-4};
  double worst_probe = 0.0;
  for (int p : {2, 3})
    for (std::int64_t N : {16, 32, 64}) {
      const auto w = build_witness(WitnessConfig::make(Domain::Torus, p, N, -1.0));
      const cplx a = compute_ap_torus(w, p, 1.0).values.at(0);
      const auto pr = fd_derivative_probe(w, p, 1.0, eps);
      const double rel = std::abs(pr.value - a) / std::abs(a);
      worst_probe = std::max(worst_probe, rel);
      ok = ok && pr.converged && rel < kProbeTol;
    }
  d << "A_p vs finite-difference probe max rel err " << fmt(worst_probe, 3);
  return make(6, ok, d.str());
}

// 7 -----------------------------------------------------------------------
SimState smooth_state(int K, double amp) {
  SimState st = SimState::zero(K);
  st.u[1] = {amp, 0.0};
  st.u[2] = {0.0, 0.5 * amp};
  st.u[3] = {0.25 * amp, -0.25 * amp};
  st.ut[1] = {0.0, 0.3 * amp};
  st.ut[2] = {0.2 * amp, 0.0};
  return st;
}

double state_distance(const SimState& a, const SimState& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.u.size(); ++k)
    m = std::max({m, std::abs(a.u[k] - b.u[k]), std::abs(a.ut[k] - b.ut[k])});
  return m;
}

CriterionResult simulator_integrity() {
  std::ostringstream d;
  // linear regime
  const int K = 32;
  SimConfig cfg;
  cfg.p = 2;
  cfg.K = K;
  Simulator sim(cfg);
  const SimState s0 = smooth_state(K, 1e-8);
  SimState st = s0;
  sim.run(st, 1.0);
  const SpectralData u0 = spectral_from_half(s0.u), u1 = spectral_from_half(s0.ut);
  const SpectralData lin = propagate_linear(u0, u1, 1.0);
  double lin_err = 0.0;
  for (const auto& n : lin.nodes()) {
    if (n.xi < 0) continue;
    lin_err = std::max(lin_err, std::abs(n.value - st.u[static_cast<std::size_t>(std::lround(n.xi))]));
  }
  const bool lin_ok = lin_err < kLinearMatchTol;
  d << "linear match " << fmt(lin_err, 3) << "; ";

  // self-convergence
  SimConfig nc = cfg;
  nc.K = 16;
  auto run_with = [&](double dt) {
    SimConfig c = nc;
    c.dt = dt;
    Simulator s(c);
    SimState x = smooth_state(nc.K, 0.5);
    s.run(x, 1.0);
    return x;
  };
  const SimState a = run_with(1.0 / 100), b = run_with(1.0 / 200), c = run_with(1.0 / 400);
  const double order = std::log2(state_distance(a, b) / state_distance(b, c));
  const bool order_ok = order >= kOrderLo && order <= kOrderHi;
  d << "observed order " << fmt(order) << "; ";

  // linear energy over 1000 steps
  SimConfig ec = cfg;
  ec.nonlinear = false;
  Simulator es(ec);
  SimState e = smooth_state(K, 1.0);
  const auto E0 = mode_energy(e);
  for (int i = 0; i < 1000; ++i) es.step(e);
  const auto E1 = mode_energy(e);
  double drift = 0.0;
  for (std::size_t k = 0; k < E0.size(); ++k)
    if (E0[k] > 0) drift = std::max(drift, std::abs(E1[k] - E0[k]) / E0[k]);
  const bool energy_ok = drift < kEnergyTol;
  d << "energy drift " << fmt(drift, 3);
  return make(7, lin_ok && order_ok && energy_ok, d.str());
}

// 8 -----------------------------------------------------------------------
CriterionResult inflation() {
  const auto Ns = powers_of_two(4, 7);
  const auto pos = inflation_experiment(2, -0.6, Ns, 1e-2);
  const auto neg = inflation_experiment(2, 0.0, Ns, 1e-2);
  std::ostringstream d;
  d << "s=-0.6 window sup";
  for (const auto& r : pos.rows) d << ' ' << fmt(r.window_sup, 5);
  d << "; s=0 max ratio to N=16 " << fmt(neg.max_ratio_to_first());
  const bool ok = pos.strictly_increasing() && neg.max_ratio_to_first() <= kNegativeControlFactor;
  return make(8, ok, d.str());
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list = {
      {1, "exponent fit, p even", exponent_even},
      {2, "exponent fit, p odd", exponent_odd},
      {3, "threshold sign change", sign_change},
      {4, "resonance bounds", resonance},
      {5, "diophantine profiles and representability", diophantine},
      {6, "analytic/numeric equivalence", equivalence},
      {7, "simulator integrity", simulator_integrity},
      {8, "norm inflation", inflation},
  };
  return list;
}

std::vector<CriterionResult> run_acceptance(std::span<const int> ids,
                                            const std::function<void(const CriterionResult&)>& progress) {
  std::vector<CriterionResult> out;
  for (const auto& c : acceptance_criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = make(c.id, false, std::string("exception: ") + e.what());
    }
    r.id = c.id;
    r.title = c.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.title << ": " << r.detail << " ("
     << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

}  // namespace bsq
