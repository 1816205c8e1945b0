#pragma once

#include <cstdint>
#include <vector>

#include "bsq/spectral.hpp"

namespace bsq {

/// Size class of a witness frequency component: near N or near 2N.
enum class SlotClass { Low, High };

struct WitnessConfig {
  Domain domain = Domain::Torus;
  int p = 2;
  std::int64_t N = 16;
  double sigma = 0.0;
  double s_target = -1.0;

  /// sigma defaults to s_target + 1.
  static WitnessConfig make(Domain domain, int p, std::int64_t N, double s_target);
  void validate() const;
};

/// Where A_p is measured: an interval on the line, a single mode on the torus
/// (stored as a degenerate interval).
struct OutputWindow {
  Domain domain = Domain::Torus;
  Interval interval;

  std::int64_t mode() const;
};

/// A witness frequency set together with the Low/High class of each component.
struct ClassifiedSet {
  FrequencySet set;
  std::vector<SlotClass> classes;
};

FrequencySet frequency_set(Domain domain, int p, std::int64_t N);
inline FrequencySet frequency_set(const WitnessConfig& cfg) { return frequency_set(cfg.domain, cfg.p, cfg.N); }
ClassifiedSet classified_frequency_set(Domain domain, int p, std::int64_t N);
/// Every component tagged Low; used to probe sets that are not the witness choice.
ClassifiedSet single_class(const FrequencySet& set);

/// The odd-p line window I_p (three cases by p mod 3).
Interval odd_line_window(int p);
OutputWindow output_window(Domain domain, int p);
inline OutputWindow output_window(const WitnessConfig& cfg) { return output_window(cfg.domain, cfg.p); }

/// Range of a + b - c for a, b in the near-N piece and c in the near-2N piece (odd p, line).
Interval triplet_range(int p);
/// Number of (N + N - 2N) triplets in every generic odd-p profile: 2*floor((p-3)/6) + 1.
int triplet_count(int p);

struct WitnessPair {
  WitnessConfig config;
  SpectralData u0;
  SpectralData u1;
  OutputWindow window;

  /// ||u0||_{H^s} + ||u1||_{H^{s-2}}.
  double data_norm(double s) const;
};

WitnessPair build_witness(const WitnessConfig& cfg, int nodes_per_unit = 64);

nlohmann::json to_json(const WitnessPair& w);
WitnessPair witness_from_json(const nlohmann::json& j);

}  // namespace bsq
