#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfm/cf.hpp"
#include "cfm/growth.hpp"
#include "cfm/tails.hpp"
#include "cfm/weights.hpp"

namespace cfm {

// Counter-based generator: a pure function of (seed, stream, index). Any
// digit of any sample can be regenerated on its own, nothing is shared, and
// the same triple always yields the same value.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
// uniform draw in the open interval (0, 1)
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// draws beyond this are reported as the cap itself; the probability of
// reaching it is below 2^-60 per digit
inline constexpr Digit kDigitCap = Digit{1} << 62;

struct DigitSampler {
  BaseMeasure base = BaseMeasure::Gauss;
  std::uint64_t seed = 0;
};

// The conditional law of the next digit given a cylinder depends only on
// the continuant ratio y = q_{k-1}/q_k and, for the Gauss base, also on
// z = (q_{k-1}+p_{k-1})/(q_k+p_k). Both lie in [0, 1] and follow the same
// contracting update r -> 1/(a + r), so they carry no compounding error.
// These three functions expose that law: the probability of one digit, the
// closing tail probability P(next >= r), and the inverse-CDF draw from a
// uniform u in (0, 1).
double next_digit_prob(BaseMeasure base, double y, double z, Digit a);
double next_digit_tail_prob(BaseMeasure base, double y, double z, Digit r);
Digit draw_digit(BaseMeasure base, double y, double z, double u);

// First n digits of a point distributed by the sampler's base measure,
// drawn by sequential conditional sampling. Continuants are tracked as
// exact 63-bit integers while they fit and as ratios afterwards.
Word sample_digits(const DigitSampler& s, std::uint64_t sample_id, std::size_t n);

struct HitReport {
  std::uint64_t sample_id = 0;
  long long n0 = 0;
  long long n1 = 0;
  std::vector<long long> hits;  // ascending
  std::optional<long long> first_hit;
};

// Scan positions n in [n0, n1] for sum_i t_i ln a_{n+i} >= ln psi(n). The
// comparison is double precision with a relative guard band of 1e-12;
// anything inside the band is re-decided with 50-digit arithmetic and the
// exact weights.
HitReport hit_scan(const Word& w, const Weights& t, const GrowthExpr& e, long long n0,
                   long long n1, std::uint64_t sample_id = 0);

}  // namespace cfm
