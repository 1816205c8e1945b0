#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bsq/interval.hpp"

namespace bsq {

using cplx = std::complex<double>;

enum class Domain { Line, Torus };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view s);

/// Dispersion relation of the linearized equation, sqrt(xi^2 + xi^4).
double lambda(double xi);

/// lambda(xi) - xi^2, evaluated without cancellation. Lies in [0, 1/2).
double lambda_excess(double xi);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

enum class Side { Plus, Minus, Both };

/// Frequency support: disjoint closed intervals on the line or distinct integers on the
/// torus, stored as the positive components plus a side selector. The mirror -A is
/// always derived from the stored components.
class FrequencySet {
public:
  static FrequencySet line(std::vector<Interval> components, Side side = Side::Plus);
  static FrequencySet torus(std::vector<std::int64_t> modes, Side side = Side::Plus);

  Domain domain() const { return domain_; }
  Side side() const { return side_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<std::int64_t>& modes() const { return modes_; }
  std::size_t component_count() const;
  /// Component i as an interval (a degenerate one on the torus).
  Interval component(std::size_t i) const;

  FrequencySet mirrored() const;
  FrequencySet with_side(Side side) const;
  bool contains(double xi) const;
  /// Lebesgue measure (line) or number of modes (torus) of the selected side(s).
  double measure() const;

  friend bool operator==(const FrequencySet&, const FrequencySet&) = default;

private:
  Domain domain_ = Domain::Torus;
  Side side_ = Side::Plus;
  std::vector<Interval> intervals_;
  std::vector<std::int64_t> modes_;
};

/// One Fourier-side sample: torus nodes are integer modes with unit weight, line nodes are
/// composite-midpoint quadrature nodes.
struct SpectralNode {
  double xi = 0.0;
  double weight = 1.0;
  cplx value{};
};

/// Fourier-side representation of a real function on the line or the torus.
class SpectralData {
public:
  SpectralData() = default;
  SpectralData(Domain domain, FrequencySet support, std::vector<SpectralNode> nodes,
               double N = 1.0, double sigma = 0.0);

  /// Zero-valued nodes on A and -A. `nodes_per_unit` applies to line intervals only.
  static SpectralData on_support(const FrequencySet& positive_support, int nodes_per_unit = 64,
                                 double N = 1.0, double sigma = 0.0);

  Domain domain() const { return domain_; }
  const FrequencySet& support() const { return support_; }
  const std::vector<SpectralNode>& nodes() const { return nodes_; }
  std::vector<SpectralNode>& nodes() { return nodes_; }
  double N() const { return N_; }
  double sigma() const { return sigma_; }

  /// Value at an exact node frequency; zero if there is no such node.
  cplx at(double xi) const;
  bool same_grid(const SpectralData& other) const;
  SpectralData scaled(cplx c) const;
  /// Largest |value(-xi) - conj(value(xi))| over the nodes.
  double hermitian_defect() const;

private:
  Domain domain_ = Domain::Torus;
  FrequencySet support_;
  std::vector<SpectralNode> nodes_;
  double N_ = 1.0;
  double sigma_ = 0.0;
};

/// (sum or integral of (1+xi^2)^s |u(xi)|^2)^(1/2) over the stored nodes.
double sobolev_norm(const SpectralData& d, double s);

/// Position and velocity of the linear flow at time t.
struct LinearState {
  SpectralData u;
  SpectralData ut;
};

/// Linear propagator: cos(t lambda) u0 + sin(t lambda)/lambda u1, pointwise in xi.
SpectralData propagate_linear(const SpectralData& u0, const SpectralData& u1, double t);
LinearState propagate_linear_state(const SpectralData& u0, const SpectralData& u1, double t);

/// Per-node linear energy lambda^2 |u|^2 + |u_t|^2.
std::vector<double> linear_energy(const SpectralData& u, const SpectralData& ut);

nlohmann::json to_json(const SpectralData& d);
SpectralData spectral_from_json(const nlohmann::json& j);

}  // namespace bsq
