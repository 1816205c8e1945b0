#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bsq/resonance.hpp"
#include "bsq/witness.hpp"

namespace bsq {

struct TimeIntegralParams {
  double alpha = 0.0;
  double beta = 0.0;
  double t = 0.0;

  /// |beta^2 - alpha^2| < 1e-8 max(1, alpha^2).
  bool near_resonant() const;
};

/// Integral over [0, t] of sin(alpha (t - tau)) exp(i beta tau).
cplx time_integral(const TimeIntegralParams& q);
/// The same closed form written term by term; loses accuracy near beta = +-alpha.
cplx time_integral_expanded(const TimeIntegralParams& q);
/// Value at exact resonance beta = alpha (or beta = -alpha when `minus` is set).
cplx time_integral_resonant(double alpha, double t, bool minus = false);

/// p! , the constant produced by p-fold differentiation of u^p.
double derivative_constant(int p);

struct ApResult {
  double t = 0.0;
  Domain domain = Domain::Torus;
  std::vector<double> xi;       // output nodes
  std::vector<double> weights;  // window quadrature weights (1 on the torus)
  std::vector<cplx> values;
  double hs_lower = 0.0;  // L^2 mass on the window
  double mc_half_width = 0.0;    // 95% confidence half-width of hs_lower, Monte Carlo only
  double quadrature_rel_change = 0.0;  // node-doubling change at the window midpoint
  std::string method;
  std::vector<std::string> warnings;
};

struct TorusOptions {
  bool grouped = true;  // multiset grouping; false runs the ordered (eta_1..eta_{p-1}) sum
  std::uint64_t budget = kDefaultTupleBudget;
};

ApResult compute_ap_torus(const WitnessPair& w, int p, double t, const TorusOptions& opt = {});

enum class LineMethod { Auto, Tensor, MonteCarlo };

struct LineOptions {
  LineMethod method = LineMethod::Auto;
  int nodes_per_dim = 0;  // 0: 64 for p <= 3, 8 for p in {4, 5}
  bool gauss = true;      // Gauss-Legendre per piece; false gives the composite midpoint rule
  int window_nodes = 32;
  std::uint64_t mc_samples = 20000;  // per pattern and output node
  std::uint64_t seed = 0x5eed;
  bool doubling_check = true;
  double convergence_tol = 1e-4;
  std::uint64_t budget = 2'000'000'000;  // integrand evaluations
};

ApResult compute_ap_line(const WitnessPair& w, int p, double t, const LineOptions& opt = {});
/// A_p at a single output frequency on the line.
cplx ap_line_point(const WitnessPair& w, int p, double t, double xi, const LineOptions& opt = {});

/// Window H^s mass of A_p, a lower bound for its full H^s norm.
double hs_window_mass(const ApResult& a, double s);

struct GrowthRecord {
  std::int64_t N = 0;
  double data_norm = 0.0;
  double ap_norm = 0.0;
  double ratio = 0.0;
  double slope_running = 0.0;  // fit over the records up to this one (NaN for the first)
};

struct GrowthOptions {
  TorusOptions torus;
  LineOptions line;
  int data_nodes_per_unit = 64;
};

struct GrowthTable {
  int p = 2;
  Domain domain = Domain::Torus;
  double s = 0.0;
  double sigma = 0.0;
  double t = 1.0;
  std::vector<GrowthRecord> records;
  double slope = 0.0;
  double predicted_slope = 0.0;  // -(ps+1) for p even, -(ps+2) for p odd
  std::vector<std::string> warnings;
};

GrowthTable growth_table(int p, Domain domain, double s, double sigma, double t,
                         std::span<const std::int64_t> N_list, const GrowthOptions& opt = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace bsq
