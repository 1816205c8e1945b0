#include "bsq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

constexpr double kLambdaFloor = 1e-12;

// sin(t lambda)/lambda with the lambda -> 0 limit.
double sin_over_lambda(double lam, double t) {
  if (std::abs(lam) < kLambdaFloor) return t;
  return std::sin(t * lam) / lam;
}

}  // namespace

std::string_view to_string(Domain d) { return d == Domain::Line ? "line" : "torus"; }

Domain parse_domain(std::string_view s) {
  if (s == "line") return Domain::Line;
  if (s == "torus") return Domain::Torus;
  throw ValidationError("unknown domain '" + std::string(s) + "' (expected line or torus)");
}

double lambda(double xi) {
  const double a = std::abs(xi);
  return a * std::sqrt(1.0 + a * a);
}

double lambda_excess(double xi) {
  const double a = std::abs(xi);
  if (a == 0.0) return 0.0;
  const double inv = 1.0 / a;
  return 1.0 / (1.0 + std::sqrt(1.0 + inv * inv));
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// ---------------------------------------------------------------------------
// FrequencySet

FrequencySet FrequencySet::line(std::vector<Interval> components, Side side) {
  std::sort(components.begin(), components.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || c.lo > c.hi)
      throw ValidationError("frequency interval must satisfy lo <= hi");
    if (c.lo < 0.0) throw ValidationError("frequency components are stored on the positive side");
    if (i > 0 && components[i - 1].hi >= c.lo)
      throw ValidationError("frequency intervals must be pairwise disjoint");
  }
  FrequencySet f;
  f.domain_ = Domain::Line;
  f.side_ = side;
  f.intervals_ = std::move(components);
  return f;
}

FrequencySet FrequencySet::torus(std::vector<std::int64_t> modes, Side side) {
  std::sort(modes.begin(), modes.end());
  if (std::adjacent_find(modes.begin(), modes.end()) != modes.end())
    throw ValidationError("torus frequency set has duplicate modes");
  if (!modes.empty() && modes.front() < 0)
    throw ValidationError("frequency components are stored on the positive side");
  FrequencySet f;
  f.domain_ = Domain::Torus;
  f.side_ = side;
  f.modes_ = std::move(modes);
  return f;
}

std::size_t FrequencySet::component_count() const {
  return domain_ == Domain::Line ? intervals_.size() : modes_.size();
}

Interval FrequencySet::component(std::size_t i) const {
  if (domain_ == Domain::Line) return intervals_.at(i);
  return Interval::point(static_cast<double>(modes_.at(i)));
}

FrequencySet FrequencySet::mirrored() const {
  FrequencySet f = *this;
  if (side_ == Side::Plus) f.side_ = Side::Minus;
  else if (side_ == Side::Minus) f.side_ = Side::Plus;
  return f;
}

FrequencySet FrequencySet::with_side(Side side) const {
  FrequencySet f = *this;
  f.side_ = side;
  return f;
}

bool FrequencySet::contains(double xi) const {
  auto hit = [&](double x) {
    for (std::size_t i = 0; i < component_count(); ++i)
      if (component(i).contains(x)) return true;
    return false;
  };
  switch (side_) {
    case Side::Plus: return hit(xi);
    case Side::Minus: return hit(-xi);
    case Side::Both: return hit(xi) || hit(-xi);
  }
  return false;
}

double FrequencySet::measure() const {
  double m = 0.0;
  for (std::size_t i = 0; i < component_count(); ++i)
    m += domain_ == Domain::Line ? component(i).width() : 1.0;
  if (side_ == Side::Both) {
    // On the torus a zero mode is its own mirror.
    if (domain_ == Domain::Torus && !modes_.empty() && modes_.front() == 0) return 2.0 * m - 1.0;
    return 2.0 * m;
  }
  return m;
}

// ---------------------------------------------------------------------------
// SpectralData

SpectralData::SpectralData(Domain domain, FrequencySet support, std::vector<SpectralNode> nodes,
                           double N, double sigma)
    : domain_(domain), support_(std::move(support)), nodes_(std::move(nodes)), N_(N), sigma_(sigma) {
  if (support_.domain() != domain_) throw ValidationError("support domain does not match data domain");
  std::sort(nodes_.begin(), nodes_.end(),
            [](const SpectralNode& a, const SpectralNode& b) { return a.xi < b.xi; });
}

SpectralData SpectralData::on_support(const FrequencySet& positive_support, int nodes_per_unit,
                                      double N, double sigma) {
  if (nodes_per_unit < 1) throw ValidationError("nodes_per_unit must be positive");
  std::vector<SpectralNode> nodes;
  if (positive_support.domain() == Domain::Torus) {
    for (auto k : positive_support.modes()) {
      nodes.push_back({static_cast<double>(k), 1.0, {}});
      if (k != 0) nodes.push_back({-static_cast<double>(k), 1.0, {}});
    }
  } else {
    for (const auto& iv : positive_support.intervals()) {
      const int n = std::max(1, static_cast<int>(std::ceil(iv.width() * nodes_per_unit - 1e-9)));
      const double h = iv.width() / n;
      for (int i = 0; i < n; ++i) {
        const double x = iv.lo + (i + 0.5) * h;
        nodes.push_back({x, h, {}});
        nodes.push_back({-x, h, {}});
      }
    }
  }
  return SpectralData(positive_support.domain(), positive_support.with_side(Side::Both),
                      std::move(nodes), N, sigma);
}

cplx SpectralData::at(double xi) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), xi,
                             [](const SpectralNode& n, double x) { return n.xi < x; });
  if (it != nodes_.end() && it->xi == xi) return it->value;
  return {};
}

bool SpectralData::same_grid(const SpectralData& other) const {
  if (domain_ != other.domain_ || nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].xi != other.nodes_[i].xi || nodes_[i].weight != other.nodes_[i].weight) return false;
  return true;
}

SpectralData SpectralData::scaled(cplx c) const {
  SpectralData out = *this;
  for (auto& n : out.nodes_) n.value *= c;
  return out;
}

double SpectralData::hermitian_defect() const {
  double worst = 0.0;
  for (const auto& n : nodes_) worst = std::max(worst, std::abs(at(-n.xi) - std::conj(n.value)));
  return worst;
}

double sobolev_norm(const SpectralData& d, double s) {
  double acc = 0.0;
  for (const auto& n : d.nodes()) {
    if (!std::isfinite(n.value.real()) || !std::isfinite(n.value.imag()))
      throw ValidationError("sobolev_norm: non-finite amplitude");
    acc += n.weight * std::pow(1.0 + n.xi * n.xi, s) * std::norm(n.value);
  }
  return std::sqrt(acc);
}

LinearState propagate_linear_state(const SpectralData& u0, const SpectralData& u1, double t) {
  if (!u0.same_grid(u1)) throw ValidationError("propagate_linear: u0 and u1 live on different grids");
  if (!(t >= 0.0)) throw ValidationError("propagate_linear: t must be nonnegative");
  LinearState out{u0, u0};
  for (std::size_t i = 0; i < u0.nodes().size(); ++i) {
    const double lam = lambda(u0.nodes()[i].xi);
    const double c = std::cos(t * lam);
    const double s = std::sin(t * lam);
    const cplx a = u0.nodes()[i].value;
    const cplx b = u1.nodes()[i].value;
    out.u.nodes()[i].value = c * a + sin_over_lambda(lam, t) * b;
    out.ut.nodes()[i].value = -lam * s * a + c * b;
  }
  return out;
}

SpectralData propagate_linear(const SpectralData& u0, const SpectralData& u1, double t) {
  return propagate_linear_state(u0, u1, t).u;
}

std::vector<double> linear_energy(const SpectralData& u, const SpectralData& ut) {
  if (!u.same_grid(ut)) throw ValidationError("linear_energy: grid mismatch");
  std::vector<double> e(u.nodes().size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double lam = lambda(u.nodes()[i].xi);
    e[i] = lam * lam * std::norm(u.nodes()[i].value) + std::norm(ut.nodes()[i].value);
  }
  return e;
}

nlohmann::json to_json(const SpectralData& d) {
  nlohmann::json j;
  j["domain"] = std::string(to_string(d.domain()));
  auto supports = nlohmann::json::array();
  const auto& sup = d.support();
  if (d.domain() == Domain::Line) {
    for (const auto& iv : sup.intervals()) supports.push_back({iv.lo, iv.hi});
  } else {
    for (auto k : sup.modes()) supports.push_back(k);
  }
  j["supports"] = supports;
  j["sigma"] = d.sigma();
  j["N"] = d.N();
  auto values = nlohmann::json::array();
  auto weights = nlohmann::json::array();
  for (const auto& n : d.nodes()) {
    values.push_back({n.xi, n.value.real(), n.value.imag()});
    weights.push_back(n.weight);
  }
  j["values"] = values;
  if (d.domain() == Domain::Line) j["weights"] = weights;
  return j;
}

SpectralData spectral_from_json(const nlohmann::json& j) {
  try {
    const Domain dom = parse_domain(j.at("domain").get<std::string>());
    FrequencySet support;
    if (dom == Domain::Line) {
      std::vector<Interval> ivs;
      for (const auto& s : j.at("supports")) ivs.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
      support = FrequencySet::line(std::move(ivs), Side::Both);
    } else {
      std::vector<std::int64_t> ks;
      for (const auto& s : j.at("supports")) ks.push_back(s.get<std::int64_t>());
      support = FrequencySet::torus(std::move(ks), Side::Both);
    }
    std::vector<SpectralNode> nodes;
    const auto& vals = j.at("values");
    const bool has_w = j.contains("weights");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      SpectralNode n;
      n.xi = vals[i].at(0).get<double>();
      n.value = {vals[i].at(1).get<double>(), vals[i].at(2).get<double>()};
      n.weight = has_w ? j["weights"].at(i).get<double>() : 1.0;
      if (dom == Domain::Torus && n.xi != std::round(n.xi))
        throw ValidationError("torus data must sit on integer modes");
      nodes.push_back(n);
    }
    return SpectralData(dom, std::move(support), std::move(nodes), j.value("N", 1.0), j.value("sigma", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed spectral data JSON: ") + e.what());
  }
}

}  // namespace bsq
