#pragma once

#include <cstdint>
#include <vector>

#include "cfm/growth.hpp"
#include "cfm/sampler.hpp"
#include "cfm/tails.hpp"
#include "cfm/weights.hpp"

namespace cfm {

struct McConfig {
  long long samples = 1000;
  long long digits = 0;  // 0 derives the word length from the window
  Weights t;
  GrowthExpr psi;
  BaseMeasure base = BaseMeasure::Gauss;
  std::uint64_t seed = 0;
  long long n0 = 1;
  long long n1 = 100;
  int threads = 0;  // 0 uses the hardware concurrency
  std::int64_t bracket_cutoff = 100000;
};

struct McSummary {
  long long samples = 0;
  long long hit_samples = 0;
  long long total_hits = 0;
  double empirical_hit_prob = 0.0;
  double mean_hit_count = 0.0;
  // sum of the per-position event-measure brackets over the window; its
  // upper end bounds the per-sample hit probability by subadditivity (the
  // sum itself may exceed 1, in which case the bound is vacuous)
  Bracket analytic_bracket;
  std::vector<HitReport> reports;  // one per sample, in sample order
};

// Run the full experiment described by cfg. The summary is a pure function
// of cfg: samples are drawn from counter streams keyed by sample id and the
// aggregation order is fixed, so thread count cannot change any output.
McSummary mc_experiment(const McConfig& cfg);

}  // namespace cfm
