#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsq/spectral.hpp"
#include "bsq/witness.hpp"

namespace bsq {

/// Torus state u(x) = sum_k u_k e^{ikx}, stored on the half spectrum k = 0..K. The
/// negative modes are the conjugates, so the solution is real by construction.
struct SimState {
  int K = 0;
  double t = 0.0;
  std::vector<cplx> u;
  std::vector<cplx> ut;

  static SimState zero(int K);
  bool finite() const;
};

enum class Dealias { ZeroPad, None };

struct SimConfig {
  int p = 2;
  int sign = 1;  // f(u) = sign * u^p
  int K = 64;
  double dt = 0.0;  // 0: 0.5 / lambda(K)
  double t_end = 1.0;
  bool nonlinear = true;
  Dealias dealias = Dealias::ZeroPad;

  void validate() const;
  double step_size() const { return dt > 0.0 ? dt : 0.5 / lambda(K); }
};

/// Thrown when a step produces NaN or Inf; carries the state before that step.
class NumericalBlowup : public std::runtime_error {
public:
  NumericalBlowup(const std::string& what, SimState last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const SimState& last_good() const { return last_good_; }

private:
  SimState last_good_;
};

/// Smallest 2^a 3^b 5^c that is >= n.
int fft_size_at_least(int n);

/// Loads torus data onto the half spectrum; rejects non-Hermitian data and modes above K.
SimState state_from_spectral(const SpectralData& u0, const SpectralData& u1, int K);
/// Half spectrum back to nodes at every k in {-K..K}.
SpectralData spectral_from_half(std::span<const cplx> half);

/// sqrt(sum over k in -K..K with k_lo <= |k| <= k_hi of (1+k^2)^s |u_k|^2).
double torus_hs_norm(std::span<const cplx> half, double s, int k_lo = 0, int k_hi = -1);
/// Per-mode energy lambda^2 |u_k|^2 + |u_t,k|^2 for k = 0..K.
std::vector<double> mode_energy(const SimState& st);

class Simulator {
public:
  explicit Simulator(const SimConfig& cfg);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const SimConfig& config() const { return cfg_; }
  int padded_size() const { return M_; }

  /// One integrating-factor RK4 step of size h (cfg.dt by default). On NaN/Inf the state
  /// is left untouched and NumericalBlowup is thrown.
  void step(SimState& st) const;
  void step(SimState& st, double h) const;

  using Observer = std::function<void(const SimState&)>;
  /// Steps to t_end with the step shrunk so the last one lands on t_end exactly.
  /// The observer sees the initial state and every `every`-th state after it.
  void run(SimState& st, double t_end, const Observer& obs = {}, int every = 1) const;

  /// sign * k^2 (u^p)^_k for k = 0..K.
  std::vector<cplx> forcing(std::span<const cplx> u) const;
  /// u at the M grid points x_j = 2 pi j / M.
  std::vector<double> physical(std::span<const cplx> u) const;
  /// max |Im u(x_j)| from a complex inverse transform of the Hermitian extension.
  double reality_defect(std::span<const cplx> u) const;

private:
  struct Plans;
  SimConfig cfg_;
  int M_ = 0;
  std::unique_ptr<Plans> plans_;
};

struct ProbeOptions {
  int sign = 1;
  bool nonlinear = true;
  int K = 0;                 // 0: 4 x the largest data frequency
  double dt_factor = 1.0;    // dt = dt_factor / (p lambda(max data frequency))
  double dt = 0.0;           // explicit override
};

struct ProbeResult {
  double xi = 0.0;
  std::vector<double> eps;
  std::vector<cplx> raw;  // one finite-difference value per eps
  cplx value{};           // Richardson extrapolation over the eps list
  double disagreement = 0.0;  // relative spread of the raw values
  bool converged = true;
  int K = 0;
  double dt = 0.0;
  std::size_t simulations = 0;
};

/// p-th central difference in eps of S(t)(eps u0, eps u1) at the output mode, at eps = 0.
ProbeResult fd_derivative_probe(const WitnessPair& w, int p, double t, std::span<const double> eps_list,
                                const ProbeOptions& opt = {});

struct InflationRow {
  std::int64_t N = 0;
  int K = 0;
  double dt = 0.0;
  double data_norm = 0.0;
  double window_sup = 0.0;  // sup over the stepped times in (0, t_end]
  double t_at_sup = 0.0;
  double window_final = 0.0;
};

struct InflationTable {
  int p = 2;
  double s = 0.0;
  double delta = 0.0;
  double t_end = 1.0;
  int window_lo = 1;
  int window_hi = 2;
  std::vector<InflationRow> rows;

  bool strictly_increasing() const;
  /// max window_sup / window_sup of the first row.
  double max_ratio_to_first() const;
};

struct InflationOptions {
  int sign = 1;
  double dt_factor = 0.25;
  int window_lo = 1;
  int window_hi = 2;
  int K = 0;  // 0: 4(N+1)+1, must exceed 4N
};

InflationTable inflation_experiment(int p, double s, std::span<const std::int64_t> N_list, double delta,
                                    double t_end = 1.0, const InflationOptions& opt = {});

}  // namespace bsq
