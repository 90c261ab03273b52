#include "cfm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>
#include <vector>

#include "cfm/errors.hpp"

namespace cfm {

McSummary mc_experiment(const McConfig& cfg) {
  if (cfg.samples < 1) throw DomainError("need at least one sample");
  if (!cfg.psi.root) throw DomainError("growth expression is empty");
  if (cfg.t.size() == 0) throw DomainError("weight vector must be nonempty");
  if (cfg.n0 < 1) throw DomainError("scan window must start at n >= 1");
  if (cfg.n1 < cfg.n0) throw DomainError("scan window is empty");
  long long m = static_cast<long long>(cfg.t.size());
  long long need = cfg.n1 + m - 1;
  long long length = cfg.digits > 0 ? cfg.digits : need;
  if (length < need) throw DomainError("sample length shorter than the scan window");

  int threads = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  McSummary out;
  out.samples = cfg.samples;
  out.reports.resize(static_cast<std::size_t>(cfg.samples));
  DigitSampler sampler{cfg.base, cfg.seed};

  // every sample has its own counter stream and its own slot, so the strided
  // split is only a work schedule: results cannot depend on it
  auto run_samples = [&](long long first) {
    for (long long i = first; i < cfg.samples; i += threads) {
      Word w = sample_digits(sampler, static_cast<std::uint64_t>(i),
                             static_cast<std::size_t>(length));
      out.reports[static_cast<std::size_t>(i)] =
          hit_scan(w, cfg.t, cfg.psi, cfg.n0, cfg.n1, static_cast<std::uint64_t>(i));
    }
  };
  {
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(threads));
    for (int j = 0; j < threads; ++j)
      futs.push_back(std::async(std::launch::async, run_samples, static_cast<long long>(j)));
    for (auto& f : futs) f.get();
  }
  for (const HitReport& r : out.reports) {
    if (!r.hits.empty()) ++out.hit_samples;
    out.total_hits += static_cast<long long>(r.hits.size());
  }
  out.empirical_hit_prob =
      static_cast<double>(out.hit_samples) / static_cast<double>(out.samples);
  out.mean_hit_count = static_cast<double>(out.total_hits) / static_cast<double>(out.samples);

  // per-position event measures, filled in any order but summed in one
  // fixed order afterwards
  long long count = cfg.n1 - cfg.n0 + 1;
  std::vector<Bracket> per(static_cast<std::size_t>(count));
  auto run_brackets = [&](long long first) {
    for (long long j = first; j < count; j += threads) {
      long long n = cfg.n0 + j;
      double lg = eval_log_growth(cfg.psi, n);
      if (lg <= 0.0)
        per[static_cast<std::size_t>(j)] = Bracket{1.0, 1.0};
      else
        per[static_cast<std::size_t>(j)] =
            measure_of_event_fast(cfg.t, lg, cfg.base, cfg.bracket_cutoff);
    }
  };
  {
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(threads));
    for (int j = 0; j < threads; ++j)
      futs.push_back(std::async(std::launch::async, run_brackets, static_cast<long long>(j)));
    for (auto& f : futs) f.get();
  }
  double lo = 0.0, lc = 0.0, hi = 0.0, hc = 0.0;
  for (const Bracket& b : per) {
    double yl = b.lo - lc;
    double tl = lo + yl;
    lc = (tl - lo) - yl;
    lo = tl;
    double yh = b.hi - hc;
    double th = hi + yh;
    hc = (th - hi) - yh;
    hi = th;
  }
  out.analytic_bracket = Bracket{lo, hi};
  return out;
}

}  // namespace cfm
