#include "bsq/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

// Number of multisets of size p over k kinds, saturating at max.
std::uint64_t multiset_count(std::size_t kinds, int p) {
  // C(kinds + p - 1, p)
  long double c = 1.0L;
  for (int i = 1; i <= p; ++i) c = c * static_cast<long double>(kinds - 1 + i) / i;
  if (c > static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 2))
    return std::numeric_limits<std::uint64_t>::max() / 2;
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(c)));
}

std::uint64_t multinomial(int p, const std::vector<int>& counts) {
  std::uint64_t m = 1;
  int placed = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      ++placed;
      m = m * static_cast<std::uint64_t>(placed) / static_cast<std::uint64_t>(i);
    }
  }
  (void)p;
  return m;
}

struct Kind {
  int sign;
  int component;
};

std::vector<Kind> kinds_of(const ClassifiedSet& A) {
  std::vector<Kind> ks;
  for (int sign : {-1, 1})
    for (std::size_t c = 0; c < A.set.component_count(); ++c) ks.push_back({sign, static_cast<int>(c)});
  return ks;
}

ClassCounts counts_of(const std::vector<Slot>& slots, const ClassifiedSet& A) {
  ClassCounts cc;
  for (const auto& s : slots) {
    const bool low = A.classes.at(static_cast<std::size_t>(s.component)) == SlotClass::Low;
    if (low) (s.sign > 0 ? cc.n1 : cc.n2) += 1;
    else (s.sign > 0 ? cc.n3 : cc.n4) += 1;
  }
  return cc;
}

// Visits every composition of p into kinds.size() parts.
template <typename Visit>
void for_each_composition(std::size_t kinds, int p, Visit&& visit) {
  std::vector<int> counts(kinds, 0);
  auto rec = [&](auto&& self, std::size_t k, int left) -> void {
    if (k + 1 == kinds) {
      counts[k] = left;
      visit(counts);
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[k] = c;
      self(self, k + 1, left - c);
    }
  };
  if (kinds == 0) return;
  rec(rec, 0, p);
}

template <typename Keep>
std::vector<Representation> enumerate_impl(int p, const ClassifiedSet& A, std::uint64_t budget, Keep&& keep) {
  if (p < 1) throw ValidationError("p must be positive");
  if (A.classes.size() != A.set.component_count()) throw ValidationError("class tags do not match the set");
  const auto kinds = kinds_of(A);
  const std::uint64_t work = multiset_count(kinds.size(), p);
  if (work > budget) {
    std::ostringstream os;
    os << "enumeration of " << work << " sign/class multisets exceeds the budget of " << budget;
    throw BudgetError(os.str());
  }
  std::vector<Representation> out;
  for_each_composition(kinds.size(), p, [&](const std::vector<int>& counts) {
    Representation r;
    for (std::size_t k = 0; k < kinds.size(); ++k)
      for (int i = 0; i < counts[k]; ++i) r.slots.push_back({kinds[k].sign, kinds[k].component});
    if (!keep(r)) return;
    std::sort(r.slots.begin(), r.slots.end());
    r.counts = counts_of(r.slots, A);
    r.multiplicity = multinomial(p, counts);
    out.push_back(std::move(r));
  });
  std::sort(out.begin(), out.end(),
            [](const Representation& a, const Representation& b) { return a.slots < b.slots; });
  return out;
}

std::int64_t exact_sum(const Representation& r, const FrequencySet& A) {
  std::int64_t s = 0;
  for (const auto& sl : r.slots) s += sl.sign * A.modes().at(static_cast<std::size_t>(sl.component));
  return s;
}

std::string describe(const Representation& r, const ClassifiedSet& A) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.slots.size(); ++i) {
    const auto& s = r.slots[i];
    os << (s.sign > 0 ? (i ? " + " : "+") : (i ? " - " : "-"));
    if (A.set.domain() == Domain::Torus) os << A.set.modes().at(static_cast<std::size_t>(s.component));
    else os << A.set.component(static_cast<std::size_t>(s.component));
  }
  os << "  counts " << to_string(r.counts);
  return os.str();
}

}  // namespace

std::string to_string(const ClassCounts& c) {
  std::ostringstream os;
  os << '(' << c.n1 << ',' << c.n2 << ',' << c.n3 << ',' << c.n4 << ')';
  return os.str();
}

std::vector<Representation> enumerate_patterns(int p, const ClassifiedSet& A, std::uint64_t budget) {
  return enumerate_impl(p, A, budget, [](const Representation&) { return true; });
}

std::vector<Representation> enumerate_representations(const Interval& target, int p, const ClassifiedSet& A,
                                                      std::uint64_t budget) {
  if (p < 2) throw ValidationError("p must be an integer >= 2");
  if (A.set.domain() == Domain::Torus) {
    if (target.lo != target.hi || target.lo != std::round(target.lo))
      throw ValidationError("torus target must be a single integer mode");
    const auto xi = static_cast<std::int64_t>(std::llround(target.lo));
    return enumerate_impl(p, A, budget, [&](const Representation& r) { return exact_sum(r, A.set) == xi; });
  }
  return enumerate_impl(p, A, budget,
                        [&](const Representation& r) { return sum_range(r, A).intersects(target); });
}

std::uint64_t count_ordered_torus(std::int64_t target, int p, const FrequencySet& A, std::uint64_t budget) {
  if (A.domain() != Domain::Torus) throw ValidationError("ordered enumeration is torus-only");
  std::vector<std::int64_t> vals;
  for (auto k : A.modes()) {
    vals.push_back(k);
    vals.push_back(-k);
  }
  const long double total = std::pow(static_cast<long double>(vals.size()), p);
  if (total > static_cast<long double>(budget))
    throw BudgetError("ordered enumeration of " + std::to_string(static_cast<double>(total)) +
                      " tuples exceeds the budget");
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  std::uint64_t hits = 0;
  while (true) {
    std::int64_t s = 0;
    for (auto i : idx) s += vals[i];
    if (s == target) ++hits;
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == vals.size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  return hits;
}

Interval sum_range(const Representation& r, const ClassifiedSet& A) {
  Interval acc = Interval::point(0.0);
  for (const auto& s : r.slots) acc = acc + static_cast<double>(s.sign) * A.set.component(static_cast<std::size_t>(s.component));
  return acc;
}

double beta_of(std::span<const double> signed_values) {
  double b = 0.0;
  for (double v : signed_values) b -= (v >= 0 ? 1.0 : -1.0) * lambda(v);
  return b;
}

BetaRange beta_range(const Representation& r, const ClassifiedSet& A, const Interval& xi_window) {
  if (A.set.domain() == Domain::Torus) {
    double b = 0.0;
    for (const auto& s : r.slots) b -= s.sign * lambda(static_cast<double>(A.set.modes().at(static_cast<std::size_t>(s.component))));
    return {b, b, b != 0.0};
  }

  // Write a_j = c_k + x_j with c_k the left end of its component and x_j in [0, w_k]. Then
  //   sum eps a^2 = sum_k (n+ - n-) c_k^2 + 2 sum_k c_k X_k + sum eps x^2,
  // where X_k = sum over component k of eps x, and sum_k X_k = xi - C is fixed by xi.
  // Eliminating one X_k with the constraint removes the O(N) cancellation between
  // components; lambda = a^2 + r(a) with r increasing in [0, 1/2) takes care of the rest.
  const std::size_t K = A.set.component_count();
  std::vector<int> np(K, 0), nm(K, 0);
  for (const auto& s : r.slots) (s.sign > 0 ? np : nm)[static_cast<std::size_t>(s.component)] += 1;

  Interval xi = xi_window.intersect(sum_range(r, A));
  if (xi.is_empty()) xi = xi_window;

  std::vector<double> c(K), w(K);
  std::vector<Interval> X(K);
  double C = 0.0, sq = 0.0;
  Interval Q = Interval::point(0.0), R = Interval::point(0.0);
  std::size_t ref = K;
  for (std::size_t k = 0; k < K; ++k) {
    const Interval comp = A.set.component(k);
    c[k] = comp.lo;
    w[k] = comp.width();
    X[k] = {-nm[k] * w[k], np[k] * w[k]};
    C += (np[k] - nm[k]) * c[k];
    sq += (np[k] - nm[k]) * c[k] * c[k];
    Q = Q + Interval{-nm[k] * w[k] * w[k], np[k] * w[k] * w[k]};
    const double rlo = lambda_excess(comp.lo), rhi = lambda_excess(comp.hi);
    R = R + Interval{np[k] * rlo - nm[k] * rhi, np[k] * rhi - nm[k] * rlo};
    if (ref == K && np[k] + nm[k] > 0) ref = k;
  }
  if (ref == K) return {0.0, 0.0, false};

  const Interval T = xi - C;
  Interval quad = Interval::point(sq) + 2.0 * c[ref] * T + Q;
  for (std::size_t k = 0; k < K; ++k) {
    if (k == ref) continue;
    Interval others = Interval::point(0.0);
    for (std::size_t m = 0; m < K; ++m)
      if (m != k) others = others + X[m];
    Interval Xk = X[k].intersect(T - others);
    if (Xk.is_empty()) Xk = X[k];
    quad = quad + 2.0 * (c[k] - c[ref]) * Xk;
  }
  const Interval minus_beta = (quad + R).widened(1e-12);
  BetaRange br{-minus_beta.hi, -minus_beta.lo, false};
  br.sign_definite = br.lo > 0.0 || br.hi < 0.0;
  return br;
}

std::size_t ResonanceReport::violations_from_N0() const {
  std::size_t v = 0;
  for (const auto& row : rows)
    if (!N0 || row.N >= *N0) v += row.violations.size();
  return v;
}

ResonanceReport verify_resonance_bounds(int p, Domain domain, std::span<const std::int64_t> N_list) {
  if (p < 2) throw ValidationError("p must be an integer >= 2");
  ResonanceReport rep;
  rep.p = p;
  rep.domain = domain;
  const bool even = p % 2 == 0;
  const OutputWindow W = output_window(domain, p);
  for (auto N : N_list) {
    const ClassifiedSet A = classified_frequency_set(domain, p, N);
    const auto reps = enumerate_representations(W.interval, p, A);
    ResonanceRow row;
    row.N = N;
    row.representations = reps.size();
    const double scale = even ? static_cast<double>(N) : static_cast<double>(N) * static_cast<double>(N);
    row.beta_over_scale_min = std::numeric_limits<double>::infinity();
    row.beta_over_scale_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : reps) {
      const Interval xi = W.interval.intersect(sum_range(r, A));
      const BetaRange br = beta_range(r, A, xi);
      // p even: -beta > 0; p odd: beta > 0.
      const double lo = even ? -br.hi : br.lo;
      const double hi = even ? -br.lo : br.hi;
      row.beta_over_scale_min = std::min(row.beta_over_scale_min, lo / scale);
      row.beta_over_scale_max = std::max(row.beta_over_scale_max, hi / scale);
      if (!br.sign_definite) row.violations.push_back({N, describe(r, A), br, "beta enclosure contains 0"});
      else if (lo <= 0.0) row.violations.push_back({N, describe(r, A), br, even ? "beta > 0" : "beta < 0"});
    }
    if (reps.empty()) {
      row.beta_over_scale_min = row.beta_over_scale_max = 0.0;
      row.violations.push_back({N, "", {}, "no representation reaches the output window"});
    }
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    if (!rep.rows[i].violations.empty()) break;
    rep.N0 = rep.rows[i].N;
  }
  return rep;
}

nlohmann::json to_json(const ResonanceReport& r) {
  nlohmann::json j;
  j["p"] = r.p;
  j["domain"] = std::string(to_string(r.domain));
  j["N0"] = r.N0 ? nlohmann::json(*r.N0) : nlohmann::json(nullptr);
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    auto v = nlohmann::json::array();
    for (const auto& viol : row.violations)
      v.push_back({{"representation", viol.representation},
                   {"beta_lo", viol.beta.lo},
                   {"beta_hi", viol.beta.hi},
                   {"reason", viol.reason}});
    rows.push_back({{"N", row.N},
                    {"representations", row.representations},
                    {"beta_over_scale_min", row.beta_over_scale_min},
                    {"beta_over_scale_max", row.beta_over_scale_max},
                    {"violations", v}});
  }
  j["per_N"] = rows;
  return j;
}

Reachability window_reachability(int p, const ClassifiedSet& A, const Interval& window) {
  Reachability out;
  out.min_abs_sum = std::numeric_limits<double>::infinity();
  for (const auto& r : enumerate_patterns(p, A)) {
    const Interval s = sum_range(r, A);
    ++out.patterns_total;
    if (s.intersects(window)) ++out.patterns_reaching;
    const double d = s.contains(0.0) ? 0.0 : std::min(std::abs(s.lo), std::abs(s.hi));
    out.min_abs_sum = std::min(out.min_abs_sum, d);
  }
  return out;
}

std::vector<ClassCounts> solve_diophantine(int p) {
  if (p < 3 || p % 2 == 0) throw ValidationError("the diophantine system is posed for odd p >= 3");
  std::vector<ClassCounts> out;
  for (int n1 = 0; n1 <= p; ++n1)
    for (int n2 = 0; n2 <= p; ++n2)
      for (int n3 = 0; n3 <= p; ++n3)
        for (int n4 = 0; n4 <= p; ++n4) {
          if (n1 + n2 + n3 + n4 != p) continue;
          if (n1 - n2 + 2 * (n3 - n4) != 0) continue;
          if (!(n1 > n2 && n3 < n4)) continue;
          if (n2 + n3 > 2) continue;
          out.push_back({n1, n2, n3, n4});
        }
  std::sort(out.begin(), out.end(), [](const ClassCounts& a, const ClassCounts& b) { return b < a; });
  return out;
}

std::vector<ClassCounts> closed_form_profiles(int p) {
  if (p < 3 || p % 2 == 0) throw ValidationError("profiles are defined for odd p >= 3");
  // m triplets (N + N - 2N) plus fillers (N - N) and/or (2N - 2N).
  const int m = triplet_count(p);
  auto profile = [m](int nn, int hh) { return ClassCounts{2 * m + nn, nn, hh, m + hh}; };
  switch (p % 3) {
    case 0: return {profile(0, 0)};
    case 1: return {profile(2, 0), profile(1, 1), profile(0, 2)};
    default: return {profile(1, 0), profile(0, 1)};
  }
}

Interval pattern_sum_range(const ClassCounts& c, int p, std::int64_t N) {
  const FrequencySet A = frequency_set(Domain::Line, p, N);
  const Interval low = A.component(0), high = A.component(1);
  return static_cast<double>(c.n1) * low - static_cast<double>(c.n2) * low + static_cast<double>(c.n3) * high -
         static_cast<double>(c.n4) * high;
}

ProfileReport verify_profiles(int p, std::span<const std::int64_t> N_list) {
  if (p < 3 || p % 2 == 0) throw ValidationError("profile checks need odd p >= 3");
  ProfileReport rep;
  rep.p = p;
  const Interval Ip = odd_line_window(p);
  for (auto N : N_list) {
    ProfileRow row;
    row.N = N;
    for (int n1 = 0; n1 <= p; ++n1)
      for (int n2 = 0; n1 + n2 <= p; ++n2)
        for (int n3 = 0; n1 + n2 + n3 <= p; ++n3) {
          const ClassCounts c{n1, n2, n3, p - n1 - n2 - n3};
          if (!pattern_sum_range(c, p, N).intersects(Ip)) continue;
          ++row.patterns_reaching;
          row.reaching.push_back(c);
          const bool ok = c.n1 > c.n2 && c.n3 < c.n4 && c.n2 + c.n3 <= 2;
          if (!ok) row.offending.push_back(c);
        }
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    if (!rep.rows[i].offending.empty()) break;
    rep.N0 = rep.rows[i].N;
  }
  return rep;
}

std::optional<std::vector<double>> construct_representation(double xi, int p, std::int64_t N) {
  const int m = triplet_count(p);
  const FrequencySet A = frequency_set(Domain::Line, p, N);
  const Interval low = A.component(0), high = A.component(1);
  const Interval range = triplet_range(p);
  double tau = xi / m;
  if (!range.widened(1e-13).contains(tau)) return std::nullopt;
  tau = std::clamp(tau, range.lo, range.hi);

  // a = b = low.lo + x, c = high.lo + y, so a + b - c = (2 low.lo - high.lo) + 2x - y.
  const double target = tau - (2.0 * low.lo - high.lo);
  const double y = std::clamp(-target, 0.0, high.width());
  const double x = std::clamp(0.5 * (target + y), 0.0, low.width());
  const double a = low.lo + x;
  const double c = high.lo + y;

  std::vector<double> terms;
  for (int i = 0; i < m; ++i) {
    terms.push_back(a);
    terms.push_back(a);
    terms.push_back(-c);
  }
  for (int i = 3 * m; i < p; i += 2) {
    terms.push_back(low.lo);
    terms.push_back(-low.lo);
  }
  if (static_cast<int>(terms.size()) != p) return std::nullopt;
  return terms;
}

RepresentabilityReport verify_representability(int p, std::int64_t N, std::size_t grid_points) {
  RepresentabilityReport rep;
  const Interval Ip = odd_line_window(p);
  const FrequencySet A = frequency_set(Domain::Line, p, N);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double xi = grid_points == 1 ? Ip.mid() : Ip.lo + Ip.width() * static_cast<double>(i) / (grid_points - 1);
    ++rep.points;
    const auto terms = construct_representation(xi, p, N);
    if (!terms) continue;
    ++rep.constructed;
    double s = 0.0;
    for (double v : *terms) {
      s += v;
      if (!A.contains(std::abs(v))) rep.membership_ok = false;
    }
    rep.max_residual = std::max(rep.max_residual, std::abs(s - xi));
  }
  return rep;
}

}  // namespace bsq
