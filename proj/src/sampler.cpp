#include "cfm/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "cfm/errors.hpp"

namespace cfm {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_state(double y, double z) {
  if (!(y >= 0.0 && y <= 1.0) || !(z >= 0.0 && z <= 1.0))
    throw DomainError("continuant ratios must lie in [0, 1]");
}

// antiderivative of the conditional density of the Gauss-base shifted
// point: A(u) = ln((1+y u)/(1+z u)) / (y - z), continuous through y == z
double gauss_A(double y, double z, double u) {
  double d = y - z;
  if (d == 0.0) return u / (1.0 + z * u);
  return std::log1p(d * u / (1.0 + z * u)) / d;
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // 53 high bits, centered: never exactly 0 or 1
  return (static_cast<double>(counter_hash(seed, stream, index) >> 11) + 0.5) * 0x1.0p-53;
}

double next_digit_prob(BaseMeasure base, double y, double z, Digit a) {
  check_state(y, z);
  if (a < 1) throw DomainError("digits start at 1");
  double ad = static_cast<double>(a);
  if (base == BaseMeasure::Lebesgue) return (1.0 + y) / ((ad + y) * (ad + 1.0 + y));
  return (gauss_A(y, z, 1.0 / ad) - gauss_A(y, z, 1.0 / (ad + 1.0))) / gauss_A(y, z, 1.0);
}

double next_digit_tail_prob(BaseMeasure base, double y, double z, Digit r) {
  check_state(y, z);
  if (r < 1) throw DomainError("digits start at 1");
  double rd = static_cast<double>(r);
  if (base == BaseMeasure::Lebesgue) return (1.0 + y) / (rd + y);
  return gauss_A(y, z, 1.0 / rd) / gauss_A(y, z, 1.0);
}

Digit draw_digit(BaseMeasure base, double y, double z, double u) {
  check_state(y, z);
  if (!(u > 0.0 && u < 1.0)) throw DomainError("uniform draw must lie strictly in (0, 1)");
  double r;
  if (base == BaseMeasure::Lebesgue) {
    // invert the tail law P(next >= R) = (1+y)/(R+y)
    r = (1.0 + y) / u - y;
  } else {
    // invert A(u*)/A(1) = u in closed form, then the digit is floor(1/u*)
    double d = y - z;
    double ustar;
    if (d == 0.0) {
      ustar = u / (1.0 + z * (1.0 - u));
    } else {
      double c = u * gauss_A(y, z, 1.0);
      double g = std::expm1(c * d);
      ustar = g / (d - z * g);
    }
    r = 1.0 / ustar;
  }
  if (!(r < static_cast<double>(kDigitCap))) return kDigitCap;
  return std::max<Digit>(1, static_cast<Digit>(r));
}

Word sample_digits(const DigitSampler& s, std::uint64_t sample_id, std::size_t n) {
  if (n == 0) throw DomainError("sample length must be at least 1");
  Word w;
  w.reserve(n);
  // continuants stay exact 63-bit integers as long as they fit; afterwards
  // only the ratios are kept, whose update is contracting and so drift-free
  constexpr std::int64_t kExactMax = std::int64_t{1} << 61;
  std::int64_t q_prev = 0, q = 1, p_prev = 1, p = 0;
  bool exact = true;
  double y = 0.0, z = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double u = counter_uniform(s.seed, sample_id, static_cast<std::uint64_t>(k));
    Digit a = draw_digit(s.base, y, z, u);
    w.push_back(a);
    if (exact && a <= (kExactMax - q_prev) / q) {
      std::int64_t qn = a * q + q_prev;
      std::int64_t pn = a * p + p_prev;
      q_prev = q;
      q = qn;
      p_prev = p;
      p = pn;
      y = static_cast<double>(q_prev) / static_cast<double>(q);
      z = static_cast<double>(q_prev + p_prev) / static_cast<double>(q + p);
    } else {
      exact = false;
      y = 1.0 / (static_cast<double>(a) + y);
      z = 1.0 / (static_cast<double>(a) + z);
    }
  }
  return w;
}

HitReport hit_scan(const Word& w, const Weights& t, const GrowthExpr& e, long long n0,
                   long long n1, std::uint64_t sample_id) {
  std::size_t m = t.size();
  if (m == 0) throw DomainError("weight vector must be nonempty");
  if (n0 < 1) throw DomainError("scan window must start at n >= 1");
  if (n1 < n0) throw DomainError("scan window is empty");
  if (static_cast<std::size_t>(n1) + m - 1 > w.size())
    throw DomainError("scan window needs digits beyond the end of the word");
  for (std::size_t i = static_cast<std::size_t>(n0) - 1; i < static_cast<std::size_t>(n1) + m - 1;
       ++i)
    if (w[i] < 1) throw DomainError("digits start at 1");

  HitReport rep;
  rep.sample_id = sample_id;
  rep.n0 = n0;
  rep.n1 = n1;
  const std::vector<double>& tv = t.approx_all();
  for (long long n = n0; n <= n1; ++n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      sum += tv[i] * std::log(static_cast<double>(w[n - 1 + i]));
    double lg = eval_log_growth(e, n);
    bool hit;
    double scale = std::max(1.0, std::abs(sum));
    if (std::isfinite(lg)) scale = std::max(scale, std::abs(lg));
    if (std::isfinite(lg) && std::abs(sum - lg) <= 1e-12 * scale) {
      // too close to call in doubles: redo with exact weights in high
      // precision
      HighFloat hs = 0;
      for (std::size_t i = 0; i < m; ++i)
        hs += static_cast<HighFloat>(t.exact(i)) *
              boost::multiprecision::log(HighFloat(w[n - 1 + i]));
      hit = hs >= eval_log_growth_hp(e, n);
    } else {
      hit = sum >= lg;
    }
    if (hit) rep.hits.push_back(n);
  }
  if (!rep.hits.empty()) rep.first_hit = rep.hits.front();
  return rep;
}

}  // namespace cfm
