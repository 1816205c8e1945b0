#include "bsq/witness.hpp"

#include <cmath>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

void check_p(int p) {
  if (p < 2) throw ValidationError("p must be an integer >= 2");
}

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

WitnessConfig WitnessConfig::make(Domain domain, int p, std::int64_t N, double s_target) {
  return {domain, p, N, s_target + 1.0, s_target};
}

void WitnessConfig::validate() const {
  check_p(p);
  if (N < 1) throw ValidationError("N must be >= 1");
  if (!(sigma > s_target))
    throw ValidationError("sigma must exceed s (the witness data has to shrink in H^s as N grows); "
                          "try --sigma " + std::to_string(s_target + 1.0));
}

std::int64_t OutputWindow::mode() const {
  if (domain != Domain::Torus) throw ValidationError("output window is an interval on the line");
  return static_cast<std::int64_t>(std::llround(interval.lo));
}

int triplet_count(int p) { return 2 * floor_div(p - 3, 6) + 1; }

Interval triplet_range(int p) {
  const double q = static_cast<double>(p) * p;
  return {3.0 * (p - 2) / q, 3.0 * (p + 2) / q};
}

FrequencySet frequency_set(Domain domain, int p, std::int64_t N) {
  check_p(p);
  if (N < 1) throw ValidationError("N must be >= 1");
  const double n = static_cast<double>(N);
  const double q = static_cast<double>(p) * p;
  if (domain == Domain::Line) {
    if (p % 2 == 0) return FrequencySet::line({{n, n + 1.0}});
    return FrequencySet::line({{n + 3.0 * (p - 1) / (2.0 * q), n + 3.0 * (p + 2) / (2.0 * q)},
                               {2.0 * n, 2.0 * n + 3.0 / q}});
  }
  if (p % 2 == 0) return FrequencySet::torus({N, N + 1});
  if (N == 1) throw ValidationError("odd-p torus witness needs N >= 2 so that {N, N+1, 2N} are distinct");
  return FrequencySet::torus({N, N + 1, 2 * N});
}

ClassifiedSet classified_frequency_set(Domain domain, int p, std::int64_t N) {
  ClassifiedSet cs{frequency_set(domain, p, N), {}};
  const std::size_t n = cs.set.component_count();
  cs.classes.assign(n, SlotClass::Low);
  if (p % 2 == 1) cs.classes.back() = SlotClass::High;  // the 2N piece sorts last
  return cs;
}

ClassifiedSet single_class(const FrequencySet& set) {
  return {set.with_side(Side::Plus), std::vector<SlotClass>(set.component_count(), SlotClass::Low)};
}

Interval odd_line_window(int p) {
  if (p < 3 || p % 2 == 0) throw ValidationError("I_p is defined for odd p >= 3");
  const double a = 1.0 / p;
  const double b = 1.0 / (static_cast<double>(p) * p);
  switch (p % 3) {
    case 0: return {1.0 - 2.0 * a, 1.0 + 2.0 * a};
    case 1: return {1.0 - 3.0 * a - 4.0 * b, 1.0 - 2.0 * a - 8.0 * b};
    default: return {1.0 - 4.0 * a + 4.0 * b, 1.0 - 4.0 * b};
  }
}

OutputWindow output_window(Domain domain, int p) {
  check_p(p);
  if (domain == Domain::Line) {
    if (p % 2 == 0) return {domain, {0.25, 0.5}};
    return {domain, odd_line_window(p)};
  }
  if (p % 2 == 0) return {domain, Interval::point(p / 2)};
  return {domain, Interval::point((p + 1) / 2 + floor_div(p - 3, 6))};
}

double WitnessPair::data_norm(double s) const { return sobolev_norm(u0, s) + sobolev_norm(u1, s - 2.0); }

WitnessPair build_witness(const WitnessConfig& cfg, int nodes_per_unit) {
  cfg.validate();
  const FrequencySet A = frequency_set(cfg);
  const double amp = std::pow(static_cast<double>(cfg.N), -cfg.sigma);
  SpectralData u0 = SpectralData::on_support(A, nodes_per_unit, static_cast<double>(cfg.N), cfg.sigma);
  SpectralData u1 = u0;
  for (std::size_t i = 0; i < u0.nodes().size(); ++i) {
    const double xi = u0.nodes()[i].xi;
    const double sgn = xi > 0 ? 1.0 : -1.0;
    u0.nodes()[i].value = amp;
    u1.nodes()[i].value = cplx(0.0, -amp * lambda(xi) * sgn);
  }
  return {cfg, std::move(u0), std::move(u1), output_window(cfg)};
}

nlohmann::json to_json(const WitnessPair& w) {
  nlohmann::json j;
  j["domain"] = std::string(to_string(w.config.domain));
  j["p"] = w.config.p;
  j["N"] = w.config.N;
  j["sigma"] = w.config.sigma;
  j["s"] = w.config.s_target;
  j["output_window"] = {w.window.interval.lo, w.window.interval.hi};
  j["u0"] = to_json(w.u0);
  j["u1"] = to_json(w.u1);
  return j;
}

WitnessPair witness_from_json(const nlohmann::json& j) {
  try {
    WitnessPair w;
    w.config.domain = parse_domain(j.at("domain").get<std::string>());
    w.config.p = j.at("p").get<int>();
    w.config.N = j.at("N").get<std::int64_t>();
    w.config.sigma = j.at("sigma").get<double>();
    w.config.s_target = j.at("s").get<double>();
    w.config.validate();
    w.u0 = spectral_from_json(j.at("u0"));
    w.u1 = spectral_from_json(j.at("u1"));
    if (!w.u0.same_grid(w.u1)) throw ValidationError("witness u0 and u1 are on different grids");
    w.window = output_window(w.config);
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed witness JSON: ") + e.what());
  }
}

}  // namespace bsq
