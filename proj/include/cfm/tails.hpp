#pragma once

#include <cstdint>

#include "cfm/cf.hpp"
#include "cfm/rational.hpp"
#include "cfm/weights.hpp"

namespace cfm {

enum class BaseMeasure { Lebesgue, Gauss };

// Two-sided enclosure: the quantity being estimated lies in [lo, hi].
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

// Exact-rational enclosure, available when every term is rational.
struct RatBracket {
  BigRat lo;
  BigRat hi;
  Bracket rounded() const;  // directed outward rounding to doubles
};

// Smallest integer a >= 1 with a^t >= g (t > 0, g >= 1). Decided exactly;
// returns kNoDigit when no a representable in 62 bits qualifies.
inline constexpr std::int64_t kNoDigit = -1;
std::int64_t min_digit_meeting(const BigRat& t, const BigRat& g);

// Exact value of sum over {a : a^t >= g} of 1/(a(a+1)), which telescopes
// to 1/min_digit_meeting(t, g).
BigRat tail_sum_1d(const BigRat& t, const BigRat& g);

// Bracket of  sum over {a_1..a_m : prod a_i^{t_i} >= g}  of prod 1/(a_i(a_i+1)).
// Coordinates with the smallest exponents are enumerated first (the sum is
// invariant under permutations of t); each enumeration stops either at the
// exact point where the condition holds for the whole remaining range
// (closed by the exact telescoping tail) or at `cutoff`, where the upper
// bound counts the unresolved tail 1/(cutoff+1) in full and the lower bound
// drops it.
Bracket weighted_tail_sum(const Weights& t, const BigRat& g, std::int64_t cutoff = 10000);

// Same enclosure with exact rational endpoints; m <= 2 only.
RatBracket weighted_tail_sum_exact(const Weights& t, const BigRat& g, std::int64_t cutoff = 10000);

// (ln g)^(ell-1) * g^(-1/t_max); the decay rate the weighted tail sum is
// expected to track up to bounded constant factors. Requires g >= e.
double asymptotic_envelope(const Weights& t, double g);

// Bracket of mu({x : prod_{i} a_{i+1}(x)^{t_i} >= threshold}) for mu the
// Lebesgue or Gauss measure. The event is a union of order-m cylinders;
// digits are enumerated in index order, ranges that qualify outright are
// closed with the exact measure of the cylinder tail-union interval, and
// truncation at `cutoff` widens only the upper endpoint.
Bracket measure_of_event(const Weights& t, const BigRat& threshold, BaseMeasure base,
                         std::int64_t cutoff = 10000);

// Exact-rational endpoints for the Lebesgue event measure; m <= 2 only.
RatBracket measure_of_event_exact(const Weights& t, const BigRat& threshold,
                                  std::int64_t cutoff = 10000);

// Double-precision variant taking ln(threshold), for scans over many
// thresholds too large for exact arithmetic to pay off. Endpoints are
// padded outward by a small multiple of the accumulated rounding error,
// so the enclosure stays valid; digit boundaries near ties are resolved
// conservatively in the direction that widens the bracket.
Bracket measure_of_event_fast(const Weights& t, double log_threshold, BaseMeasure base,
                              std::int64_t cutoff = 10000);

}  // namespace cfm
