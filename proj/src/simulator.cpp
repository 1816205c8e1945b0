#include "bsq/simulator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bsq/errors.hpp"

namespace bsq {

SimState SimState::zero(int K) {
  SimState st;
  st.K = K;
  st.u.assign(static_cast<std::size_t>(K) + 1, cplx{});
  st.ut.assign(static_cast<std::size_t>(K) + 1, cplx{});
  return st;
}

bool SimState::finite() const {
  auto ok = [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  return std::all_of(u.begin(), u.end(), ok) && std::all_of(ut.begin(), ut.end(), ok);
}

void SimConfig::validate() const {
  if (p < 2) throw ValidationError("simulate: p must be >= 2");
  if (sign != 1 && sign != -1) throw ValidationError("simulate: sign must be + or -");
  if (K < 1) throw ValidationError("simulate: K must be >= 1");
  if (dt < 0.0 || !std::isfinite(dt)) throw ValidationError("simulate: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("simulate: t_end must be >= 0");
}

int fft_size_at_least(int n) {
  int best = 1;
  while (best < n) best *= 2;
  for (int a = 1; a < best; a *= 2)
    for (int b = a; b < best; b *= 3)
      for (int c = b; c < best; c *= 5)
        if (c >= n) best = std::min(best, c);
  return best;
}

SimState state_from_spectral(const SpectralData& u0, const SpectralData& u1, int K) {
  if (u0.domain() != Domain::Torus || u1.domain() != Domain::Torus)
    throw ValidationError("the simulator runs on the torus only");
  SimState st = SimState::zero(K);
  auto load = [&](const SpectralData& d, std::vector<cplx>& out, const char* name) {
    const double scale = std::max(1.0, std::accumulate(d.nodes().begin(), d.nodes().end(), 0.0,
                                                       [](double m, const SpectralNode& n) {
                                                         return std::max(m, std::abs(n.value));
                                                       }));
    if (d.hermitian_defect() > 1e-12 * scale)
      throw ValidationError(std::string(name) + " is not Hermitian (the solution must be real)");
    for (const auto& n : d.nodes()) {
      const long k = std::lround(n.xi);
      if (std::abs(n.xi - static_cast<double>(k)) > 1e-9)
        throw ValidationError(std::string(name) + " has a non-integer mode");
      if (std::abs(k) > K) {
        if (n.value != cplx{}) throw ValidationError(std::string(name) + " has modes above K");
        continue;
      }
      if (k >= 0) out[static_cast<std::size_t>(k)] = n.value;
    }
  };
  load(u0, st.u, "u0");
  load(u1, st.ut, "u1");
  return st;
}

SpectralData spectral_from_half(std::span<const cplx> half) {
  const int K = static_cast<int>(half.size()) - 1;
  std::vector<SpectralNode> nodes;
  std::vector<std::int64_t> modes;
  for (int k = -K; k <= K; ++k) {
    const cplx v = k >= 0 ? half[static_cast<std::size_t>(k)] : std::conj(half[static_cast<std::size_t>(-k)]);
    nodes.push_back({static_cast<double>(k), 1.0, v});
    if (k > 0) modes.push_back(k);
  }
  FrequencySet support = modes.empty() ? FrequencySet() : FrequencySet::torus(modes, Side::Both);
  return SpectralData(Domain::Torus, support, std::move(nodes));
}

double torus_hs_norm(std::span<const cplx> half, double s, int k_lo, int k_hi) {
  const int K = static_cast<int>(half.size()) - 1;
  if (k_hi < 0 || k_hi > K) k_hi = K;
  double acc = 0.0;
  for (int k = std::max(0, k_lo); k <= k_hi; ++k) {
    const double w = (k == 0 ? 1.0 : 2.0) * std::pow(1.0 + double(k) * k, s);
    acc += w * std::norm(half[static_cast<std::size_t>(k)]);
  }
  return std::sqrt(acc);
}

std::vector<double> mode_energy(const SimState& st) {
  std::vector<double> e(st.u.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double l = lambda(static_cast<double>(k));
    e[k] = l * l * std::norm(st.u[k]) + std::norm(st.ut[k]);
  }
  return e;
}

// ---------------------------------------------------------------------------

struct Simulator::Plans {
  int M;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* full_in = nullptr;
  fftw_complex* full_out = nullptr;
  fftw_plan c2r = nullptr, r2c = nullptr, c2c = nullptr;

  explicit Plans(int m) : M(m) {
    real = fftw_alloc_real(static_cast<std::size_t>(M));
    spec = fftw_alloc_complex(static_cast<std::size_t>(M / 2 + 1));
    full_in = fftw_alloc_complex(static_cast<std::size_t>(M));
    full_out = fftw_alloc_complex(static_cast<std::size_t>(M));
    c2r = fftw_plan_dft_c2r_1d(M, spec, real, FFTW_ESTIMATE);
    r2c = fftw_plan_dft_r2c_1d(M, real, spec, FFTW_ESTIMATE);
    c2c = fftw_plan_dft_1d(M, full_in, full_out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(c2r);
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2c);
    fftw_free(real);
    fftw_free(spec);
    fftw_free(full_in);
    fftw_free(full_out);
  }

  void load_half(std::span<const cplx> u) const {
    const std::size_t n = static_cast<std::size_t>(M / 2 + 1);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx v = k < u.size() ? u[k] : cplx{};
      spec[k][0] = v.real();
      spec[k][1] = v.imag();
    }
  }
};

Simulator::Simulator(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  // (p+1)K+1 points keep the aliases of the degree-pK product out of |k| <= K
  const int need = cfg_.dealias == Dealias::ZeroPad ? (cfg_.p + 1) * cfg_.K + 1 : 2 * cfg_.K + 2;
  M_ = fft_size_at_least(need);
  plans_ = std::make_unique<Plans>(M_);
}

Simulator::~Simulator() = default;

std::vector<double> Simulator::physical(std::span<const cplx> u) const {
  plans_->load_half(u);
  fftw_execute(plans_->c2r);
  return {plans_->real, plans_->real + M_};
}

double Simulator::reality_defect(std::span<const cplx> u) const {
  const int K = static_cast<int>(u.size()) - 1;
  for (int j = 0; j < M_; ++j) plans_->full_in[j][0] = plans_->full_in[j][1] = 0.0;
  for (int k = -K; k <= K; ++k) {
    const cplx v = k >= 0 ? u[static_cast<std::size_t>(k)] : std::conj(u[static_cast<std::size_t>(-k)]);
    const int idx = ((k % M_) + M_) % M_;
    plans_->full_in[idx][0] += v.real();
    plans_->full_in[idx][1] += v.imag();
  }
  fftw_execute(plans_->c2c);
  double worst = 0.0;
  for (int j = 0; j < M_; ++j) worst = std::max(worst, std::abs(plans_->full_out[j][1]));
  return worst;
}

std::vector<cplx> Simulator::forcing(std::span<const cplx> u) const {
  const std::size_t n = u.size();
  std::vector<cplx> F(n, cplx{});
  if (!cfg_.nonlinear) return F;
  plans_->load_half(u);
  fftw_execute(plans_->c2r);
  for (int j = 0; j < M_; ++j) {
    const double x = plans_->real[j];
    double y = x;
    for (int q = 1; q < cfg_.p; ++q) y *= x;
    plans_->real[j] = y;
  }
  fftw_execute(plans_->r2c);
  const double scale = static_cast<double>(cfg_.sign) / M_;
  for (std::size_t k = 1; k < n; ++k) {
    const double k2 = static_cast<double>(k) * static_cast<double>(k);
    F[k] = scale * k2 * cplx(plans_->spec[k][0], plans_->spec[k][1]);
  }
  return F;
}

void Simulator::step(SimState& st) const { step(st, cfg_.step_size()); }

void Simulator::step(SimState& st, double h) const {
  const std::size_t n = st.u.size();
  // exact linear rotation over h and h/2
  std::vector<double> c(n), s(n), ls(n), c2(n), s2(n), ls2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = lambda(static_cast<double>(k));
    c[k] = std::cos(l * h);
    c2[k] = std::cos(0.5 * l * h);
    s[k] = l > 0 ? std::sin(l * h) / l : h;
    s2[k] = l > 0 ? std::sin(0.5 * l * h) / l : 0.5 * h;
    ls[k] = l * std::sin(l * h);
    ls2[k] = l * std::sin(0.5 * l * h);
  }
  const auto& u = st.u;
  const auto& v = st.ut;
  std::vector<cplx> un(n), vn(n);

  if (!cfg_.nonlinear) {
    for (std::size_t k = 0; k < n; ++k) {
      un[k] = c[k] * u[k] + s[k] * v[k];
      vn[k] = -ls[k] * u[k] + c[k] * v[k];
    }
  } else {
    std::vector<cplx> tmp(n);
    const auto F1 = forcing(u);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx vh = v[k] + 0.5 * h * F1[k];
      tmp[k] = c2[k] * u[k] + s2[k] * vh;
    }
    const auto F2 = forcing(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = c2[k] * u[k] + s2[k] * v[k];
    const auto F3 = forcing(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = c[k] * u[k] + s[k] * v[k] + h * s2[k] * F3[k];
    const auto F4 = forcing(tmp);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx mid = F2[k] + F3[k];
      un[k] = c[k] * u[k] + s[k] * v[k] + h / 6.0 * (s[k] * F1[k] + 2.0 * s2[k] * mid);
      vn[k] = -ls[k] * u[k] + c[k] * v[k] + h / 6.0 * (c[k] * F1[k] + 2.0 * c2[k] * mid + F4[k]);
    }
  }
  SimState next{st.K, st.t + h, std::move(un), std::move(vn)};
  if (!next.finite()) {
    std::ostringstream os;
    os << "non-finite amplitude at t = " << next.t << "; stopped at the last good state (t = " << st.t << ")";
    throw NumericalBlowup(os.str(), st);
  }
  st = std::move(next);
}

void Simulator::run(SimState& st, double t_end, const Observer& obs, int every) const {
  if (st.K != cfg_.K || st.u.size() != static_cast<std::size_t>(cfg_.K) + 1)
    throw ValidationError("state resolution does not match the simulator K");
  if (obs) obs(st);
  const double span = t_end - st.t;
  if (span <= 0.0) return;
  const double h0 = cfg_.step_size();
  const auto steps = static_cast<std::int64_t>(std::ceil(span / h0 - 1e-9));
  const double h = span / static_cast<double>(steps);
  const double t0 = st.t;
  for (std::int64_t i = 1; i <= steps; ++i) {
    step(st, h);
    st.t = t0 + h * static_cast<double>(i);
    if (obs && (i % std::max(1, every) == 0 || i == steps)) obs(st);
  }
}

// ---------------------------------------------------------------------------
// Finite-difference probe

namespace {

double max_mode(const SpectralData& d) {
  double m = 0.0;
  for (const auto& n : d.nodes())
    if (n.value != cplx{}) m = std::max(m, std::abs(n.xi));
  return m;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

ProbeResult fd_derivative_probe(const WitnessPair& w, int p, double t, std::span<const double> eps_list,
                                const ProbeOptions& opt) {
  if (w.config.domain != Domain::Torus) throw ValidationError("fd probe needs a torus witness");
  if (p != w.config.p) throw ValidationError("p does not match the witness construction");
  if (!(t > 0.0)) throw ValidationError("fd probe: t must be positive");
  if (eps_list.empty()) throw ValidationError("fd probe: empty eps list");

  const double fmax = max_mode(w.u0);
  ProbeResult res;
  res.xi = static_cast<double>(w.window.mode());
  res.K = opt.K > 0 ? opt.K : static_cast<int>(4 * fmax);
  if (res.K < 4 * fmax) throw ValidationError("fd probe: K must be at least 4x the largest data frequency");
  res.dt = opt.dt > 0 ? opt.dt : opt.dt_factor / (p * lambda(fmax));

  SimConfig cfg;
  cfg.p = p;
  cfg.sign = opt.sign;
  cfg.K = res.K;
  cfg.dt = res.dt;
  cfg.t_end = t;
  cfg.nonlinear = opt.nonlinear;
  Simulator sim(cfg);
  const SimState base = state_from_spectral(w.u0, w.u1, res.K);
  const auto out_k = static_cast<std::size_t>(w.window.mode());

  auto evolve = [&](double a) -> cplx {
    if (a == 0.0) return {};
    SimState st = base;
    for (auto& z : st.u) z *= a;
    for (auto& z : st.ut) z *= a;
    sim.run(st, t);
    ++res.simulations;
    return st.u[out_k];
  };

  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw ValidationError("fd probe: eps must be positive");
    // central p-th difference on the points (p/2 - j) eps
    cplx acc{};
    std::vector<std::pair<double, cplx>> cache;
    for (int j = 0; j <= p; ++j) {
      const double a = (0.5 * p - j) * eps;
      cplx f{};
      bool have = false;
      if (p % 2 == 1) {
        // u -> -u is a symmetry of the flow for odd p
        for (const auto& [b, fb] : cache)
          if (b == -a) {
            f = -fb;
            have = true;
          }
      }
      if (!have) {
        f = evolve(a);
        cache.emplace_back(a, f);
      }
      acc += ((j % 2 == 0) ? 1.0 : -1.0) * binom(p, j) * f;
    }
    res.eps.push_back(eps);
    res.raw.push_back(acc / std::pow(eps, p));
  }

  if (res.raw.size() == 1) {
    res.value = res.raw[0];
  } else {
    // the central difference error is even in eps: Richardson on the two smallest
    std::vector<std::size_t> idx(res.raw.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return res.eps[a] < res.eps[b]; });
    const double e1 = res.eps[idx[0]], e2 = res.eps[idx[1]];
    const cplx A1 = res.raw[idx[0]], A2 = res.raw[idx[1]];
    const double r = (e2 / e1) * (e2 / e1);
    res.value = (r * A1 - A2) / (r - 1.0);
    double spread = 0.0;
    for (const auto& v : res.raw) spread = std::max(spread, std::abs(v - A1));
    res.disagreement = std::abs(A1) > 0 ? spread / std::abs(A1) : (spread > 0 ? INFINITY : 0.0);
    res.converged = res.disagreement <= 0.05;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Norm inflation

bool InflationTable::strictly_increasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].window_sup > rows[i - 1].window_sup)) return false;
  return !rows.empty();
}

double InflationTable::max_ratio_to_first() const {
  if (rows.empty() || rows.front().window_sup == 0.0) return 0.0;
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.window_sup / rows.front().window_sup);
  return m;
}

InflationTable inflation_experiment(int p, double s, std::span<const std::int64_t> N_list, double delta,
                                    double t_end, const InflationOptions& opt) {
  if (!(delta > 0.0)) throw ValidationError("inflate: delta must be positive");
  if (!(t_end > 0.0)) throw ValidationError("inflate: t must be positive");
  if (N_list.empty()) throw ValidationError("inflate: empty N list");
  InflationTable tab;
  tab.p = p;
  tab.s = s;
  tab.delta = delta;
  tab.t_end = t_end;
  tab.window_lo = opt.window_lo;
  tab.window_hi = opt.window_hi;
  for (auto N : N_list) {
    // the data is rescaled to size delta, so sigma only has to satisfy the witness check
    const WitnessConfig cfg{Domain::Torus, p, N, s + 1.0, s};
    const WitnessPair w = build_witness(cfg);
    const double fmax = max_mode(w.u0);
    InflationRow row;
    row.N = N;
    row.K = opt.K > 0 ? opt.K : static_cast<int>(4 * (fmax + 1)) + 1;
    if (row.K <= 4 * N) throw ValidationError("inflate: K must exceed 4N");
    row.dt = opt.dt_factor / (p * lambda(fmax));
    const double scale = delta / w.data_norm(s);
    row.data_norm = delta;

    SimConfig sc;
    sc.p = p;
    sc.sign = opt.sign;
    sc.K = row.K;
    sc.dt = row.dt;
    sc.t_end = t_end;
    Simulator sim(sc);
    SimState st = state_from_spectral(w.u0.scaled(scale), w.u1.scaled(scale), row.K);
    sim.run(st, t_end, [&](const SimState& x) {
      if (x.t <= 0.0) return;
      const double v = torus_hs_norm(x.u, s, opt.window_lo, opt.window_hi);
      if (v > row.window_sup) {
        row.window_sup = v;
        row.t_at_sup = x.t;
      }
      row.window_final = v;
    });
    tab.rows.push_back(row);
  }
  return tab;
}

}  // namespace bsq
