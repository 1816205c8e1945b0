#include "bsq/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "bsq/errors.hpp"

namespace bsq {

// ---------------------------------------------------------------------------
// Time integral

bool TimeIntegralParams::near_resonant() const {
  return std::abs(beta * beta - alpha * alpha) < 1e-8 * std::max(1.0, alpha * alpha);
}

cplx time_integral(const TimeIntegralParams& q) {
  // Product-to-sum form of the closed expression. With s = beta + alpha, d = beta - alpha:
  //   I = t/(2i) [ e^{i s t/2} sinc(d t/2) - e^{i d t/2} sinc(s t/2) ],
  // which stays exact as d -> 0 or s -> 0, so the resonant limit needs no separate branch.
  const double s = q.beta + q.alpha;
  const double d = q.beta - q.alpha;
  const double t = q.t;
  const cplx e_s = std::polar(1.0, 0.5 * s * t);
  const cplx e_d = std::polar(1.0, 0.5 * d * t);
  const cplx bracket = e_s * sinc(0.5 * d * t) - e_d * sinc(0.5 * s * t);
  return bracket * cplx(0.0, -0.5 * t);
}

cplx time_integral_expanded(const TimeIntegralParams& q) {
  const double a = q.alpha, b = q.beta, t = q.t;
  const double den = b * b - a * a;
  const double re = -a / den * (std::cos(b * t) - std::cos(a * t));
  const double im = -a / den * std::sin(b * t) + b / den * std::sin(a * t);
  return {re, im};
}

cplx time_integral_resonant(double alpha, double t, bool minus) {
  if (alpha == 0.0) return {};
  const double half = 0.5 * t * std::sin(alpha * t);
  const double im = -0.5 * t * std::cos(alpha * t) + std::sin(alpha * t) / (2.0 * alpha);
  return {half, minus ? -im : im};
}

double derivative_constant(int p) {
  double f = 1.0;
  for (int i = 2; i <= p; ++i) f *= i;
  return f;
}

namespace {

double prefactor(int p, double xi, double N, double sigma) {
  const double lam = lambda(xi);
  if (lam == 0.0) return 0.0;
  return derivative_constant(p) * xi * xi / lam * std::pow(N, -p * sigma);
}

void check_common(const WitnessPair& w, int p, double t, Domain expected) {
  if (w.config.domain != expected)
    throw ValidationError(std::string("expected a ") + std::string(to_string(expected)) + " witness");
  if (p != w.config.p) throw ValidationError("p does not match the witness construction");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t must be finite and nonnegative");
}

// ---------------------------------------------------------------------------
// 1-D rules

struct Rule {
  std::vector<double> x;  // on [-1, 1]
  std::vector<double> w;
};

Rule gauss_legendre(int n) {
  Rule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
    r.x[a] = -z;
    r.x[b] = z;
    r.w[a] = r.w[b] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

Rule midpoint(int n) {
  Rule r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(-1.0 + (2.0 * i + 1.0) / n);
    r.w.push_back(2.0 / n);
  }
  return r;
}

class RuleCache {
public:
  explicit RuleCache(bool gauss) : gauss_(gauss) {}
  // references stay valid while nested levels add rules
  const Rule& get(int n) {
    auto it = rules_.find(n);
    if (it == rules_.end()) it = rules_.emplace(n, gauss_ ? gauss_legendre(n) : midpoint(n)).first;
    return it->second;
  }

private:
  bool gauss_;
  std::map<int, Rule> rules_;
};

double lambda_prime(double a) {
  // d/da of a sqrt(1 + a^2) for a >= 0
  const double s = std::sqrt(1.0 + a * a);
  return s + a * a / s;
}

// Nested integration of the time integral over one sign/class pattern at a fixed output xi.
class PatternIntegrator {
public:
  PatternIntegrator(const Representation& r, const ClassifiedSet& A, double xi, double alpha, double t,
                    int base_nodes, bool gauss, RuleCache& rules, std::uint64_t& evals, std::uint64_t budget)
      : xi_(xi), alpha_(alpha), t_(t), base_(base_nodes), gauss_(gauss), rules_(rules), evals_(evals),
        budget_(budget) {
    for (const auto& s : r.slots) {
      sign_.push_back(s.sign);
      comp_.push_back(A.set.component(static_cast<std::size_t>(s.component)));
    }
    const std::size_t p = sign_.size();
    // tail_[j] = range of sum_{i >= j} eps_i a_i
    tail_.assign(p + 1, Interval::point(0.0));
    for (std::size_t j = p; j-- > 0;) tail_[j] = tail_[j + 1] + static_cast<double>(sign_[j]) * comp_[j];
    // knots_[j] = { xi - sum_{i >= j} eps_i e_i : e_i an endpoint of component i }
    knots_.resize(p + 1);
    knots_[p] = {xi};
    for (std::size_t j = p; j-- > 0;) {
      std::vector<double> k;
      for (double v : knots_[j + 1]) {
        k.push_back(v - sign_[j] * comp_[j].lo);
        if (comp_[j].hi != comp_[j].lo) k.push_back(v - sign_[j] * comp_[j].hi);
      }
      std::sort(k.begin(), k.end());
      k.erase(std::unique(k.begin(), k.end()), k.end());
      knots_[j] = std::move(k);
    }
    const Interval dep = comp_.back();
    for (std::size_t j = 0; j + 1 < p; ++j) {
      const double lo = lambda_prime(comp_[j].lo) - lambda_prime(dep.hi);
      const double hi = lambda_prime(comp_[j].hi) - lambda_prime(dep.lo);
      rate_.push_back(std::max(std::abs(lo), std::abs(hi)));
    }
  }

  cplx integrate() { return level(0, 0.0, 0.0); }

private:
  int nodes_for(std::size_t j, double width) const {
    const double span = rate_[j] * width * t_;
    const int n = std::max(base_, static_cast<int>(std::ceil(0.6 * span)) + 8);
    return std::min(n, 4096);
  }

  cplx leaf(double S, double B) {
    const std::size_t last = sign_.size() - 1;
    const double a = sign_[last] * (xi_ - S);
    const double beta = -(B + sign_[last] * lambda(a));
    if (++evals_ > budget_) throw BudgetError("line quadrature exceeded its evaluation budget");
    return time_integral({alpha_, beta, t_});
  }

  cplx level(std::size_t j, double S, double B) {
    const std::size_t p = sign_.size();
    if (j + 1 == p) return leaf(S, B);
    const double eps = sign_[j];
    // feasible a_j: eps a_j in xi - S - tail_[j+1], a_j in its component
    const Interval need = eps * ((xi_ - S) - tail_[j + 1]);
    const Interval feas = need.intersect(comp_[j]);
    if (feas.is_empty() || feas.width() <= 0.0) return {};

    std::vector<double> cuts{feas.lo};
    if (j + 2 < p) {
      // kinks of the remaining integral sit where S + eps a_j hits a knot of level j+1
      for (double k : knots_[j + 1]) {
        const double a = eps * (k - S);
        if (a > feas.lo && a < feas.hi) cuts.push_back(a);
      }
      std::sort(cuts.begin() + 1, cuts.end());
    }
    cuts.push_back(feas.hi);

    cplx acc{};
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double lo = cuts[c], hi = cuts[c + 1];
      if (hi <= lo) continue;
      const Rule& rule = rules_.get(gauss_ ? nodes_for(j, hi - lo) : base_);
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double a = mid + half * rule.x[i];
        acc += (half * rule.w[i]) * level(j + 1, S + eps * a, B + eps * lambda(a));
      }
    }
    return acc;
  }

  double xi_, alpha_, t_;
  int base_;
  bool gauss_;
  RuleCache& rules_;
  std::uint64_t& evals_;
  std::uint64_t budget_;
  std::vector<int> sign_;
  std::vector<Interval> comp_;
  std::vector<Interval> tail_;
  std::vector<std::vector<double>> knots_;
  std::vector<double> rate_;
};

struct PointEstimate {
  cplx value;
  double variance = 0.0;  // Monte Carlo only, of |value|
};

// Conditional Monte Carlo over one pattern: a_0..a_{p-3} uniform on their boxes, a_{p-2}
// uniform on its exact feasible range, the last slot determined by the sum.
PointEstimate monte_carlo_pattern(const Representation& r, const ClassifiedSet& A, double xi, double alpha,
                                  double t, std::uint64_t samples, std::mt19937_64& rng) {
  const std::size_t p = r.slots.size();
  std::vector<int> sign;
  std::vector<Interval> comp;
  for (const auto& s : r.slots) {
    sign.push_back(s.sign);
    comp.push_back(A.set.component(static_cast<std::size_t>(s.component)));
  }
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double box = 1.0;
  for (std::size_t j = 0; j + 2 < p; ++j) box *= comp[j].width();
  cplx sum{};
  double sum2_re = 0.0, sum2_im = 0.0;
  for (std::uint64_t n = 0; n < samples; ++n) {
    double S = 0.0, B = 0.0;
    for (std::size_t j = 0; j + 2 < p; ++j) {
      const double a = comp[j].lo + comp[j].width() * U(rng);
      S += sign[j] * a;
      B += sign[j] * lambda(a);
    }
    const std::size_t j = p - 2, last = p - 1;
    const Interval need = static_cast<double>(sign[j]) * ((xi - S) - static_cast<double>(sign[last]) * comp[last]);
    const Interval feas = need.intersect(comp[j]);
    cplx f{};
    if (!feas.is_empty() && feas.width() > 0.0) {
      const double a = feas.lo + feas.width() * U(rng);
      const double S2 = S + sign[j] * a;
      const double B2 = B + sign[j] * lambda(a);
      const double al = sign[last] * (xi - S2);
      const double beta = -(B2 + sign[last] * lambda(al));
      f = box * feas.width() * time_integral({alpha, beta, t});
    }
    sum += f;
    sum2_re += f.real() * f.real();
    sum2_im += f.imag() * f.imag();
  }
  const double n = static_cast<double>(samples);
  const cplx mean = sum / n;
  const double var_re = std::max(0.0, sum2_re / n - mean.real() * mean.real()) / n;
  const double var_im = std::max(0.0, sum2_im / n - mean.imag() * mean.imag()) / n;
  return {mean, var_re + var_im};
}

struct LineContext {
  ClassifiedSet A;
  std::vector<Representation> patterns;  // those reaching the window
};

LineContext line_context(const WitnessPair& w, int p, std::uint64_t budget) {
  LineContext ctx{classified_frequency_set(Domain::Line, p, w.config.N), {}};
  ctx.patterns = enumerate_representations(w.window.interval, p, ctx.A, budget);
  return ctx;
}

LineMethod resolve_method(int p, LineMethod m) {
  if (m != LineMethod::Auto) return m;
  return p <= 5 ? LineMethod::Tensor : LineMethod::MonteCarlo;
}

int default_nodes(int p) { return p <= 3 ? 64 : 8; }

PointEstimate line_point(const LineContext& ctx, double t, double xi, LineMethod method, int nodes,
                         const LineOptions& opt, std::uint64_t& evals, std::mt19937_64& rng) {
  const double alpha = lambda(xi);
  PointEstimate est;
  RuleCache rules(opt.gauss);
  for (const auto& r : ctx.patterns) {
    if (!sum_range(r, ctx.A).contains(xi)) continue;
    const double m = static_cast<double>(r.multiplicity);
    if (method == LineMethod::MonteCarlo) {
      const auto pe = monte_carlo_pattern(r, ctx.A, xi, alpha, t, opt.mc_samples, rng);
      est.value += m * pe.value;
      est.variance += m * m * pe.variance;
      evals += opt.mc_samples;
      if (evals > opt.budget) throw BudgetError("Monte Carlo exceeded its evaluation budget");
    } else {
      PatternIntegrator integ(r, ctx.A, xi, alpha, t, nodes, opt.gauss, rules, evals, opt.budget);
      est.value += m * integ.integrate();
    }
  }
  return est;
}

}  // namespace

// ---------------------------------------------------------------------------
// A_p evaluation

ApResult compute_ap_torus(const WitnessPair& w, int p, double t, const TorusOptions& opt) {
  check_common(w, p, t, Domain::Torus);
  const std::int64_t xi = w.window.mode();
  const double xf = static_cast<double>(xi);
  const double alpha = lambda(xf);
  const ClassifiedSet A = classified_frequency_set(Domain::Torus, p, w.config.N);

  cplx sum{};
  if (opt.grouped) {
    for (const auto& r : enumerate_representations(w.window.interval, p, A, opt.budget)) {
      const BetaRange b = beta_range(r, A, w.window.interval);
      sum += static_cast<double>(r.multiplicity) * time_integral({alpha, b.lo, t});
    }
  } else {
    std::vector<std::int64_t> vals;
    for (auto k : A.set.modes()) {
      vals.push_back(k);
      vals.push_back(-k);
    }
    const long double work = std::pow(static_cast<long double>(vals.size()), p - 1);
    if (work > static_cast<long double>(opt.budget)) throw BudgetError("ordered torus sum exceeds the budget");
    const FrequencySet both = A.set.with_side(Side::Both);
    std::vector<std::size_t> idx(static_cast<std::size_t>(p - 1), 0);
    while (true) {
      std::int64_t S = 0;
      double B = 0.0;
      for (auto i : idx) {
        S += vals[i];
        B += (vals[i] > 0 ? 1.0 : -1.0) * lambda(static_cast<double>(vals[i]));
      }
      const std::int64_t last = xi - S;
      if (last != 0 && both.contains(static_cast<double>(last))) {
        const double beta = -(B + (last > 0 ? 1.0 : -1.0) * lambda(static_cast<double>(last)));
        sum += time_integral({alpha, beta, t});
      }
      std::size_t j = 0;
      while (j < idx.size() && ++idx[j] == vals.size()) idx[j++] = 0;
      if (j == idx.size()) break;
    }
  }

  ApResult out;
  out.t = t;
  out.domain = Domain::Torus;
  out.method = opt.grouped ? "torus-grouped" : "torus-ordered";
  out.xi = {xf};
  out.weights = {1.0};
  out.values = {prefactor(p, xf, static_cast<double>(w.config.N), w.config.sigma) * sum};
  out.hs_lower = std::abs(out.values[0]);
  return out;
}

cplx ap_line_point(const WitnessPair& w, int p, double t, double xi, const LineOptions& opt) {
  check_common(w, p, t, Domain::Line);
  const LineContext ctx = line_context(w, p, kDefaultTupleBudget);
  const LineMethod method = resolve_method(p, opt.method);
  const int nodes = opt.nodes_per_dim > 0 ? opt.nodes_per_dim : default_nodes(p);
  std::uint64_t evals = 0;
  std::mt19937_64 rng(opt.seed);
  const auto est = line_point(ctx, t, xi, method, nodes, opt, evals, rng);
  return prefactor(p, xi, static_cast<double>(w.config.N), w.config.sigma) * est.value;
}

ApResult compute_ap_line(const WitnessPair& w, int p, double t, const LineOptions& opt) {
  check_common(w, p, t, Domain::Line);
  if (opt.window_nodes < 1) throw ValidationError("window_nodes must be positive");
  const LineContext ctx = line_context(w, p, kDefaultTupleBudget);
  const LineMethod method = resolve_method(p, opt.method);
  if (method == LineMethod::Tensor && p > 5)
    throw ValidationError("tensor quadrature is limited to p <= 5; use Monte Carlo");
  const int nodes = opt.nodes_per_dim > 0 ? opt.nodes_per_dim : default_nodes(p);
  const double N = static_cast<double>(w.config.N);

  ApResult out;
  out.t = t;
  out.domain = Domain::Line;
  out.method = method == LineMethod::MonteCarlo ? "monte-carlo" : (opt.gauss ? "gauss-legendre" : "midpoint");
  const Interval win = w.window.interval;
  const int nw = opt.window_nodes;
  const double h = win.width() / nw;
  std::uint64_t evals = 0;
  std::mt19937_64 rng(opt.seed);
  std::vector<double> sd;
  for (int i = 0; i < nw; ++i) {
    const double xi = win.lo + (i + 0.5) * h;
    const double pre = prefactor(p, xi, N, w.config.sigma);
    const auto est = line_point(ctx, t, xi, method, nodes, opt, evals, rng);
    out.xi.push_back(xi);
    out.weights.push_back(h);
    out.values.push_back(pre * est.value);
    sd.push_back(std::abs(pre) * std::sqrt(est.variance));
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < out.values.size(); ++i) mass += out.weights[i] * std::norm(out.values[i]);
  out.hs_lower = std::sqrt(mass);

  if (method == LineMethod::MonteCarlo) {
    double acc = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      const double g = out.weights[i] * std::abs(out.values[i]) * sd[i];
      acc += g * g;
    }
    out.mc_half_width = out.hs_lower > 0 ? 1.96 * std::sqrt(acc) / out.hs_lower : 0.0;
    if (out.hs_lower > 0 && out.mc_half_width > 0.05 * out.hs_lower) {
      std::ostringstream os;
      os << "Monte Carlo 95% half-width is " << 100.0 * out.mc_half_width / out.hs_lower
         << "% of the window mass; raise mc_samples";
      out.warnings.push_back(os.str());
    }
  } else if (opt.doubling_check && t > 0.0) {
    const double xi = win.mid();
    std::uint64_t scratch = 0;
    LineOptions o2 = opt;
    o2.budget = std::numeric_limits<std::uint64_t>::max();
    const cplx a = line_point(ctx, t, xi, method, nodes, o2, scratch, rng).value;
    const cplx b = line_point(ctx, t, xi, method, 2 * nodes, o2, scratch, rng).value;
    out.quadrature_rel_change = std::abs(b) > 0 ? std::abs(a - b) / std::abs(b) : 0.0;
    if (out.quadrature_rel_change > opt.convergence_tol) {
      std::ostringstream os;
      os << "quadrature not converged: doubling the nodes changed A_p by "
         << out.quadrature_rel_change << " (relative)";
      out.warnings.push_back(os.str());
    }
  }
  return out;
}

double hs_window_mass(const ApResult& a, double s) {
  if (a.values.empty()) throw ValidationError("hs_window_mass: empty output window");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    acc += a.weights[i] * std::pow(1.0 + a.xi[i] * a.xi[i], s) * std::norm(a.values[i]);
  return std::sqrt(acc);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

GrowthTable growth_table(int p, Domain domain, double s, double sigma, double t,
                         std::span<const std::int64_t> N_list, const GrowthOptions& opt) {
  if (!(sigma > s)) throw ValidationError("growth: sigma must exceed s");
  if (!(t > 0.0)) throw ValidationError("growth: t must be positive");
  if (N_list.empty()) throw ValidationError("growth: empty N list");
  GrowthTable tab;
  tab.p = p;
  tab.domain = domain;
  tab.s = s;
  tab.sigma = sigma;
  tab.t = t;
  tab.predicted_slope = p % 2 == 0 ? -(p * s + 1.0) : -(p * s + 2.0);
  std::vector<double> xs, ys;
  for (auto N : N_list) {
    const WitnessConfig cfg{domain, p, N, sigma, s};
    const WitnessPair w = build_witness(cfg, opt.data_nodes_per_unit);
    const ApResult ap = domain == Domain::Torus ? compute_ap_torus(w, p, t, opt.torus)
                                                : compute_ap_line(w, p, t, opt.line);
    for (const auto& msg : ap.warnings) tab.warnings.push_back("N=" + std::to_string(N) + ": " + msg);
    GrowthRecord rec;
    rec.N = N;
    rec.data_norm = w.data_norm(s);
    rec.ap_norm = hs_window_mass(ap, s);
    rec.ratio = rec.ap_norm / std::pow(rec.data_norm, p);
    xs.push_back(static_cast<double>(N));
    ys.push_back(rec.ratio);
    rec.slope_running = loglog_slope(xs, ys);
    tab.records.push_back(rec);
  }
  tab.slope = loglog_slope(xs, ys);
  return tab;
}

}  // namespace bsq
