#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsq/witness.hpp"

namespace bsq {

/// Class counts of a representation:
///   n1 = #{+, Low}, n2 = #{-, Low}, n3 = #{+, High}, n4 = #{-, High}.
struct ClassCounts {
  int n1 = 0, n2 = 0, n3 = 0, n4 = 0;

  int total() const { return n1 + n2 + n3 + n4; }
  friend auto operator<=>(const ClassCounts&, const ClassCounts&) = default;
};

std::string to_string(const ClassCounts& c);

/// One signed slot xi_j = eps_j * a_j with a_j drawn from component `component` of the set.
struct Slot {
  int sign = 1;
  int component = 0;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

/// A multiset of p signed slots whose sum can reach the target. On the torus every
/// component is one integer, so the slots pin the tuple down exactly; on the line a
/// representation is a sign/class pattern. `multiplicity` counts the ordered tuples.
struct Representation {
  std::vector<Slot> slots;  // sorted
  ClassCounts counts;
  std::uint64_t multiplicity = 1;
};

inline constexpr std::uint64_t kDefaultTupleBudget = 100'000'000;

/// All representations of a target point or interval as a signed sum of p elements of A,
/// in lexicographic slot order.
std::vector<Representation> enumerate_representations(const Interval& target, int p, const ClassifiedSet& A,
                                                      std::uint64_t budget = kDefaultTupleBudget);
/// Same, without any target filter (every sign/class multiset).
std::vector<Representation> enumerate_patterns(int p, const ClassifiedSet& A,
                                               std::uint64_t budget = kDefaultTupleBudget);

/// Torus only: number of ordered p-tuples from +-A summing to `target`, by direct
/// enumeration of all (2|A|)^p tuples.
std::uint64_t count_ordered_torus(std::int64_t target, int p, const FrequencySet& A,
                                  std::uint64_t budget = kDefaultTupleBudget);

/// Interval range of sum eps_j a_j over the pattern.
Interval sum_range(const Representation& r, const ClassifiedSet& A);

struct BetaRange {
  double lo = 0.0;
  double hi = 0.0;
  bool sign_definite = false;
};

/// Enclosure of beta = -sum eps_j lambda(a_j) over all tuples of the pattern whose sum lies
/// in `xi_window`. Exact on the torus.
BetaRange beta_range(const Representation& r, const ClassifiedSet& A, const Interval& xi_window);
/// beta of one concrete tuple.
double beta_of(std::span<const double> signed_values);

struct ResonanceViolation {
  std::int64_t N = 0;
  std::string representation;
  BetaRange beta;
  std::string reason;
};

struct ResonanceRow {
  std::int64_t N = 0;
  std::size_t representations = 0;
  double beta_over_scale_min = 0.0;  // -beta/N (p even) or beta/N^2 (p odd)
  double beta_over_scale_max = 0.0;
  std::vector<ResonanceViolation> violations;
};

struct ResonanceReport {
  int p = 2;
  Domain domain = Domain::Torus;
  std::optional<std::int64_t> N0;  // smallest listed N from which every row is clean
  std::vector<ResonanceRow> rows;

  std::size_t violations_from_N0() const;
};

ResonanceReport verify_resonance_bounds(int p, Domain domain, std::span<const std::int64_t> N_list);
nlohmann::json to_json(const ResonanceReport& r);

/// How close a pattern set gets to a target window (negative controls).
struct Reachability {
  std::size_t patterns_total = 0;
  std::size_t patterns_reaching = 0;
  double min_abs_sum = 0.0;  // smallest |sum eps_j a_j| over all patterns
};
Reachability window_reachability(int p, const ClassifiedSet& A, const Interval& window);

/// Exhaustive solutions of n1+n2+n3+n4 = p, n1-n2+2(n3-n4) = 0 with n1 > n2, n3 < n4 and
/// n2 + n3 <= 2; p must be odd. Sorted by descending n1.
std::vector<ClassCounts> solve_diophantine(int p);
/// The generic profiles in closed form (one, three or two of them by p mod 3).
std::vector<ClassCounts> closed_form_profiles(int p);

/// Range of sum eps_j a_j for class counts on the odd-p line witness set at scale N.
Interval pattern_sum_range(const ClassCounts& c, int p, std::int64_t N);

struct ProfileRow {
  std::int64_t N = 0;
  std::size_t patterns_reaching = 0;
  std::vector<ClassCounts> reaching;
  std::vector<ClassCounts> offending;  // reach I_p but break n1>n2, n3<n4 or n2+n3<=2
};

struct ProfileReport {
  int p = 3;
  std::optional<std::int64_t> N0;
  std::vector<ProfileRow> rows;
};

ProfileReport verify_profiles(int p, std::span<const std::int64_t> N_list);

/// A concrete representation of xi in I_p built from triplets and (N - N) fillers on the
/// odd-p line witness set; values are the signed terms eps_j a_j.
std::optional<std::vector<double>> construct_representation(double xi, int p, std::int64_t N);

struct RepresentabilityReport {
  std::size_t points = 0;
  std::size_t constructed = 0;
  double max_residual = 0.0;
  bool membership_ok = true;  // every term lies in its claimed piece
};
RepresentabilityReport verify_representability(int p, std::int64_t N, std::size_t grid_points = 1000);

}  // namespace bsq
