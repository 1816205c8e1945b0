#include <doctest.h>

#include <cmath>
#include <random>

#include "bsq/errors.hpp"
#include "bsq/resonance.hpp"
#include "oracles.hpp"

using namespace bsq;

namespace {

// Ordered p-tuples from +-A with the given sum, counted by brute force.
std::uint64_t brute_count(const std::vector<std::int64_t>& A, int p, std::int64_t target) {
  std::vector<std::int64_t> vals;
  for (auto a : A) {
    vals.push_back(a);
    vals.push_back(-a);
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  std::uint64_t n = 0;
  while (true) {
    std::int64_t s = 0;
    for (auto i : idx) s += vals[i];
    if (s == target) ++n;
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == vals.size()) idx[j++] = 0;
    if (j == idx.size()) return n;
  }
}

}  // namespace

TEST_CASE("torus representations and their multiplicities") {
  for (int p = 2; p <= 5; ++p)
    for (std::int64_t N : {2, 3, 5}) {
      const auto A = classified_frequency_set(Domain::Torus, p, N);
      const std::int64_t xi = output_window(Domain::Torus, p).mode();
      std::uint64_t total = 0;
      for (const auto& r : enumerate_representations(Interval::point(double(xi)), p, A))
        total += r.multiplicity;
      CHECK(total == brute_count(A.set.modes(), p, xi));
      CHECK(count_ordered_torus(xi, p, A.set) == total);
    }
}

TEST_CASE("p = 2 torus: a single pair with beta exactly lambda(N) - lambda(N+1)") {
  const std::int64_t N = 40;
  const auto A = classified_frequency_set(Domain::Torus, 2, N);
  const auto reps = enumerate_representations(Interval::point(1.0), 2, A);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].multiplicity == 2);
  const auto b = beta_range(reps[0], A, Interval::point(1.0));
  const double exact = static_cast<double>(oracle::lambda(N) - oracle::lambda(N + 1));
  CHECK(b.lo == doctest::Approx(exact).epsilon(1e-14));
  CHECK(b.sign_definite);
}

TEST_CASE("line beta enclosure contains every sampled tuple") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int p : {2, 3, 4, 5}) {
    const std::int64_t N = 24;
    const auto A = classified_frequency_set(Domain::Line, p, N);
    const Interval win = output_window(Domain::Line, p).interval;
    int hits = 0;
    for (const auto& r : enumerate_representations(win, p, A)) {
      const auto br = beta_range(r, A, win);
      for (int trial = 0; trial < 4000; ++trial) {
        std::vector<double> vals;
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < r.slots.size(); ++j) {
          const auto c = A.set.component(static_cast<std::size_t>(r.slots[j].component));
          const double a = c.lo + c.width() * U(rng);
          vals.push_back(r.slots[j].sign * a);
          s += vals.back();
        }
        const auto& last = r.slots.back();
        const double xi = win.lo + win.width() * U(rng);
        const double a = last.sign * (xi - s);
        if (!A.set.component(static_cast<std::size_t>(last.component)).contains(a)) continue;
        vals.push_back(last.sign * a);
        const double beta = beta_of(vals);
        CHECK(beta >= br.lo);
        CHECK(beta <= br.hi);
        ++hits;
      }
    }
    CHECK(hits > 0);
  }
}

TEST_CASE("resonance reports are clean from small N on") {
  const std::vector<std::int64_t> Ns{8, 16, 32, 64, 128, 256};
  for (int p = 2; p <= 7; ++p)
    for (Domain d : {Domain::Torus, Domain::Line}) {
      const auto r = verify_resonance_bounds(p, d, Ns);
      REQUIRE(r.N0.has_value());
      CHECK(*r.N0 <= 128);
      CHECK(r.violations_from_N0() == 0);
      // -beta/N -> 2 lambda'(N)/N ~ 2 for the single torus pair at p = 2
      if (p == 2 && d == Domain::Torus) CHECK(r.rows.back().beta_over_scale_min == doctest::Approx(2.0).epsilon(0.01));
    }
  const auto j = to_json(verify_resonance_bounds(3, Domain::Line, Ns));
  CHECK(j.contains("N0"));
  CHECK(j["per_N"].size() == Ns.size());
  CHECK(j["per_N"][0].contains("beta_over_scale_min"));
}

TEST_CASE("diophantine system") {
  const auto five = solve_diophantine(5);
  REQUIRE(five.size() == 2);
  CHECK(five[0] == ClassCounts{3, 1, 0, 1});
  CHECK(five[1] == ClassCounts{2, 0, 1, 2});
  CHECK_THROWS_AS(solve_diophantine(4), ValidationError);

  // every closed-form profile solves the system, for p well past the acceptance range
  for (int p = 3; p <= 51; p += 2) {
    const auto cf = closed_form_profiles(p);
    CHECK(cf.size() == (p % 3 == 0 ? 1u : p % 3 == 2 ? 2u : 3u));
    for (const auto& c : cf) {
      CHECK(c.total() == p);
      CHECK(c.n1 - c.n2 + 2 * (c.n3 - c.n4) == 0);
      CHECK(c.n1 > c.n2);
      CHECK(c.n3 < c.n4);
      CHECK(c.n2 + c.n3 <= 2);
    }
    if (p <= 31) CHECK(solve_diophantine(p) == cf);
  }
}

TEST_CASE("only the generic profiles reach I_p") {
  const std::vector<std::int64_t> Ns{16, 32, 64};
  for (int p : {3, 5, 7, 9}) {
    const auto rep = verify_profiles(p, Ns);
    REQUIRE(rep.N0.has_value());
    for (const auto& row : rep.rows) {
      if (row.N < *rep.N0) continue;
      CHECK(row.offending.empty());
      for (const auto& c : row.reaching) {
        const auto cf = closed_form_profiles(p);
        CHECK(std::find(cf.begin(), cf.end(), c) != cf.end());
      }
    }
  }
}

TEST_CASE("negative control: a one-piece set cannot reach I_p for odd p") {
  const std::int64_t N = 64;
  for (int p : {3, 5, 7}) {
    const auto A = single_class(FrequencySet::line({{double(N), double(N + 1)}}));
    const auto reach = window_reachability(p, A, odd_line_window(p));
    CHECK(reach.patterns_total > 0);
    CHECK(reach.patterns_reaching == 0);
    CHECK(reach.min_abs_sum >= N - p);
  }
}

TEST_CASE("explicit representations of I_p") {
  std::mt19937_64 rng(3);
  for (int p : {3, 5, 7, 9, 11}) {
    const std::int64_t N = 64;
    const Interval win = odd_line_window(p);
    const auto A = frequency_set(Domain::Line, p, N).with_side(Side::Both);
    std::uniform_real_distribution<double> U(win.lo, win.hi);
    for (int i = 0; i < 200; ++i) {
      const double xi = U(rng);
      const auto terms = construct_representation(xi, p, N);
      REQUIRE(terms.has_value());
      CHECK(terms->size() == static_cast<std::size_t>(p));
      double s = 0.0;
      for (double v : *terms) {
        CHECK(A.contains(v));
        s += v;
      }
      CHECK(s == doctest::Approx(xi).epsilon(1e-12));
    }
    const auto r = verify_representability(p, N, 200);
    CHECK(r.constructed == r.points);
    CHECK(r.membership_ok);
  }
}

TEST_CASE("budgets are enforced") {
  const auto A = classified_frequency_set(Domain::Line, 9, 16);
  CHECK_THROWS_AS(enumerate_patterns(9, A, 10), BudgetError);
  CHECK_THROWS_AS(count_ordered_torus(1, 6, FrequencySet::torus({4, 5}), 100), BudgetError);
}
