#include "cfm/tails.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cfm/errors.hpp"

namespace cfm {
namespace {

using HighFloat2 =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>>;

constexpr std::int64_t kDigitCap = std::int64_t(1) << 61;

double to_double_down(const BigRat& x) {
  double d = static_cast<double>(static_cast<HighFloat>(x));
  return std::nextafter(d, -std::numeric_limits<double>::infinity());
}

double to_double_up(const BigRat& x) {
  double d = static_cast<double>(static_cast<HighFloat>(x));
  return std::nextafter(d, std::numeric_limits<double>::infinity());
}

BigRat sum_pairwise(std::vector<BigRat>& terms, std::size_t lo, std::size_t hi) {
  if (hi == lo) return BigRat(0);
  if (hi - lo == 1) return terms[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return sum_pairwise(terms, lo, mid) + sum_pairwise(terms, mid, hi);
}

// Decides  prod_i d_i^{e_i} >= g  for positive integer digits d_i.  A long
// double evaluation with a guard band settles almost every query; queries
// inside the band go to exact integer powers when the exponents share a
// moderate common denominator, and to 50- then 100-digit floats otherwise.
class ProductTest {
 public:
  ProductTest(std::vector<BigRat> exps, BigRat g) : exps_(std::move(exps)), g_(std::move(g)) {
    for (const BigRat& e : exps_) {
      exps_ld_.push_back(static_cast<long double>(static_cast<HighFloat>(e)));
    }
    log_g_ = static_cast<long double>(log(static_cast<HighFloat>(g_)));
    band_ = 1e-11L * (1.0L + std::abs(log_g_));

    BigInt l = 1;
    bool fits = true;
    for (const BigRat& e : exps_) {
      l = boost::multiprecision::lcm(l, denominator(e));
      if (l > (BigInt(1) << 20)) {
        fits = false;
        break;
      }
    }
    const BigInt p = numerator(g_);
    const BigInt q = denominator(g_);
    if (fits) {
      for (const BigRat& e : exps_) {
        if (numerator(e) * (l / denominator(e)) > (BigInt(1) << 40)) {
          fits = false;
          break;
        }
      }
    }
    if (fits) {
      double rhs_bits = static_cast<double>(l) * (msb(p) + 1.0);
      if (rhs_bits < 4e6) {
        L_ = l.convert_to<std::int64_t>();
        for (const BigRat& e : exps_) {
          w_.push_back((numerator(e) * (l / denominator(e))).convert_to<std::int64_t>());
        }
        pL_ = boost::multiprecision::pow(p, static_cast<unsigned>(L_));
        qL_ = boost::multiprecision::pow(q, static_cast<unsigned>(L_));
        exact_ok_ = true;
      }
    }
  }

  long double log_g() const { return log_g_; }
  long double exp_ld(std::size_t i) const { return exps_ld_[i]; }
  std::size_t arity() const { return exps_.size(); }

  // digits[i] is paired with exponent i; logsum must equal
  // sum_i exps_ld[i] * log(digits[i]) up to long double rounding
  bool at_least_g(const std::vector<std::int64_t>& digits, long double logsum) const {
    long double margin = logsum - log_g_;
    if (margin > band_) return true;
    if (margin < -band_) return false;
    return exact_at_least(digits);
  }

 private:
  bool exact_at_least(const std::vector<std::int64_t>& digits) const {
    if (exact_ok_) {
      double lhs_bits = msb(qL_) + 1.0;
      for (std::size_t i = 0; i < digits.size(); ++i) {
        lhs_bits += static_cast<double>(w_[i]) * std::log2(static_cast<double>(digits[i]));
      }
      if (lhs_bits < 4e6) {
        BigInt lhs = qL_;
        for (std::size_t i = 0; i < digits.size(); ++i) {
          if (w_[i] > 0) {
            lhs *= boost::multiprecision::pow(BigInt(digits[i]), static_cast<unsigned>(w_[i]));
          }
        }
        return lhs >= pL_;
      }
    }
    HighFloat m50 = high_margin<HighFloat>(digits);
    if (abs(m50) > HighFloat(1e-40)) return m50 > 0;
    HighFloat2 m100 = high_margin<HighFloat2>(digits);
    if (abs(m100) > HighFloat2(1e-90)) return m100 > 0;
    // a genuine tie would have been settled by the integer path; at this
    // point the sides agree to ~100 digits and either answer is sound
    return true;
  }

  template <typename F>
  F high_margin(const std::vector<std::int64_t>& digits) const {
    F s = -log(static_cast<F>(numerator(g_))) + log(static_cast<F>(denominator(g_)));
    for (std::size_t i = 0; i < digits.size(); ++i) {
      s += static_cast<F>(static_cast<HighFloat>(exps_[i])) * log(F(digits[i]));
    }
    return s;
  }

  std::vector<BigRat> exps_;
  BigRat g_;
  std::vector<long double> exps_ld_;
  long double log_g_ = 0;
  long double band_ = 0;
  bool exact_ok_ = false;
  std::int64_t L_ = 1;
  std::vector<std::int64_t> w_;
  BigInt pL_, qL_;
};

// Smallest digit a with prefix * a^{e_k} >= g, where `digits` holds the k
// prefix entries (it is used as scratch and restored). kNoDigit when even
// the 61-bit cap falls short.
std::int64_t min_qualifying_digit(const ProductTest& pt, std::vector<std::int64_t>& digits,
                                  long double prefix_logsum, std::size_t k) {
  auto ok = [&](std::int64_t a) {
    digits.push_back(a);
    bool r = pt.at_least_g(digits, prefix_logsum + pt.exp_ld(k) * std::log(static_cast<long double>(a)));
    digits.pop_back();
    return r;
  };
  if (ok(1)) return 1;
  long double need = (pt.log_g() - prefix_logsum) / pt.exp_ld(k);
  std::int64_t guess = kDigitCap;
  if (need < 42.0L) {
    guess = std::max<std::int64_t>(2, std::llround(std::exp(need)));
  }
  std::int64_t lo, hi;  // invariant: !ok(lo), ok(hi)
  if (ok(guess)) {
    hi = guess;
    lo = 1;
    std::int64_t step = 1;
    while (guess - step > 1) {
      std::int64_t probe = guess - step;
      if (!ok(probe)) {
        lo = probe;
        break;
      }
      hi = probe;
      step *= 2;
    }
  } else {
    lo = guess;
    hi = -1;
    while (lo < kDigitCap) {
      std::int64_t probe = lo > kDigitCap / 2 ? kDigitCap : lo * 2;
      if (ok(probe)) {
        hi = probe;
        break;
      }
      lo = probe;
    }
    if (hi < 0) return kNoDigit;
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<BigRat> sorted_exponents(const Weights& t) {
  std::vector<BigRat> e;
  e.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) e.push_back(t.exact(i));
  std::stable_sort(e.begin(), e.end());
  return e;
}

void check_tail_args(const Weights&, const BigRat& g, std::int64_t cutoff) {
  if (g < 1) throw DomainError("tail sums require g >= 1");
  if (cutoff < 2) throw DomainError("cutoff must be at least 2");
}

// recursion for weighted_tail_sum in 50-digit floats (any m)
class WeightedTailHp {
 public:
  WeightedTailHp(const ProductTest& pt, std::int64_t cutoff) : pt_(pt), cutoff_(cutoff) {}

  std::pair<HighFloat, HighFloat> run(std::size_t k, long double logsum) {
    std::int64_t r = min_qualifying_digit(pt_, digits_, logsum, k);
    if (k + 1 == pt_.arity()) {
      if (r == kNoDigit) return {HighFloat(0), HighFloat(1) / HighFloat(kDigitCap)};
      HighFloat v = HighFloat(1) / HighFloat(r);
      return {v, v};
    }
    HighFloat lo(0), hi(0);
    std::int64_t last = std::min(r == kNoDigit ? cutoff_ : r - 1, cutoff_);
    for (std::int64_t a = 1; a <= last; ++a) {
      digits_.push_back(a);
      auto [l, h] = run(k + 1, logsum + pt_.exp_ld(k) * std::log(static_cast<long double>(a)));
      digits_.pop_back();
      HighFloat mass = HighFloat(1) / (HighFloat(a) * HighFloat(a + 1));
      lo += mass * l;
      hi += mass * h;
    }
    if (r != kNoDigit && r <= cutoff_) {
      HighFloat closed = HighFloat(1) / HighFloat(r);
      lo += closed;
      hi += closed;
    } else {
      hi += HighFloat(1) / HighFloat(cutoff_ + 1);
    }
    return {lo, hi};
  }

 private:
  const ProductTest& pt_;
  std::int64_t cutoff_;
  std::vector<std::int64_t> digits_;
};

// recursion for measure_of_event; digits in index order, convergents exact
template <typename Acc>
class EventRec {
 public:
  // Acc must provide: zero(), tail_union(q, q_prev, p, p_prev, r) for the
  // measure of {next digit >= r} inside the current cylinder, and add-assign.
  EventRec(const ProductTest& pt, std::int64_t cutoff, const Acc& acc)
      : pt_(pt), cutoff_(cutoff), acc_(acc) {}

  std::pair<typename Acc::value_type, typename Acc::value_type> run(std::size_t k,
                                                                    const BigInt& p_prev,
                                                                    const BigInt& q_prev,
                                                                    const BigInt& p,
                                                                    const BigInt& q,
                                                                    long double logsum) {
    std::int64_t r = min_qualifying_digit(pt_, digits_, logsum, k);
    if (k + 1 == pt_.arity()) {
      if (r == kNoDigit) {
        return {acc_.zero(), acc_.tail_union(q, q_prev, p, p_prev, kDigitCap)};
      }
      auto v = acc_.tail_union(q, q_prev, p, p_prev, r);
      return {v, v};
    }
    auto lo = acc_.zero();
    auto hi = acc_.zero();
    std::int64_t last = std::min(r == kNoDigit ? cutoff_ : r - 1, cutoff_);
    for (std::int64_t a = 1; a <= last; ++a) {
      digits_.push_back(a);
      auto [l, h] = run(k + 1, p, q, a * p + p_prev, a * q + q_prev,
                        logsum + pt_.exp_ld(k) * std::log(static_cast<long double>(a)));
      digits_.pop_back();
      lo += l;
      hi += h;
    }
    if (r != kNoDigit && r <= cutoff_) {
      auto closed = acc_.tail_union(q, q_prev, p, p_prev, r);
      lo += closed;
      hi += closed;
    } else {
      hi += acc_.tail_union(q, q_prev, p, p_prev, cutoff_ + 1);
    }
    return {lo, hi};
  }

 private:
  const ProductTest& pt_;
  std::int64_t cutoff_;
  Acc acc_;
  std::vector<std::int64_t> digits_;
};

struct LebesgueExactAcc {
  using value_type = BigRat;
  BigRat zero() const { return BigRat(0); }
  BigRat tail_union(const BigInt& q, const BigInt& q_prev, const BigInt&, const BigInt&,
                    std::int64_t r) const {
    return BigRat(1, q * (r * q + q_prev));
  }
};

struct LebesgueHpAcc {
  using value_type = HighFloat;
  HighFloat zero() const { return HighFloat(0); }
  HighFloat tail_union(const BigInt& q, const BigInt& q_prev, const BigInt&, const BigInt&,
                       std::int64_t r) const {
    return HighFloat(1) / static_cast<HighFloat>(q * (r * q + q_prev));
  }
};

struct GaussHpAcc {
  using value_type = HighFloat;
  HighFloat zero() const { return HighFloat(0); }
  HighFloat tail_union(const BigInt& q, const BigInt& q_prev, const BigInt& p,
                       const BigInt& p_prev, std::int64_t r) const {
    BigRat x0(p, q);
    BigRat x1(r * p + p_prev, r * q + q_prev);
    return gauss_measure_hp(x0, x1);
  }
};

Bracket pad_outward(const HighFloat& lo, const HighFloat& hi) {
  // 50-digit accumulation error is far below double resolution; one ulp of
  // outward rounding on each endpoint absorbs it together with the final cast
  double l = std::nextafter(static_cast<double>(lo), -std::numeric_limits<double>::infinity());
  double h = std::nextafter(static_cast<double>(hi), std::numeric_limits<double>::infinity());
  if (l < 0) l = 0;
  return Bracket{l, h};
}

// single pass of the double-precision event recursion; `upper` selects the
// direction in which digit-boundary ties and truncation are resolved
class EventFast {
 public:
  EventFast(const Weights& t, double log_g, BaseMeasure base, std::int64_t cutoff, bool upper)
      : t_(t), log_g_(log_g), base_(base), cutoff_(cutoff), upper_(upper) {}

  double run(std::size_t k, double p_prev, double q_prev, double p, double q, double logsum) {
    double boundary = first_qualifying(k, logsum);
    if (k + 1 == t_.size()) {
      return tail_union(q, q_prev, p, p_prev, boundary);
    }
    double total = 0.0;
    double last_d = std::min(boundary - 1.0, static_cast<double>(cutoff_));
    std::int64_t last = last_d < 1.0 ? 0 : static_cast<std::int64_t>(last_d);
    for (std::int64_t a = 1; a <= last; ++a) {
      total += run(k + 1, p, q, a * p + p_prev, a * q + q_prev,
                   logsum + t_.approx(k) * std::log(static_cast<double>(a)));
    }
    if (boundary <= static_cast<double>(cutoff_)) {
      total += tail_union(q, q_prev, p, p_prev, boundary);
    } else if (upper_) {
      total += tail_union(q, q_prev, p, p_prev, static_cast<double>(cutoff_) + 1.0);
    }
    return total;
  }

 private:
  // smallest digit threshold r (as a real; may exceed any integer) such
  // that {a >= r} qualifies, rounded in this pass's safe direction
  double first_qualifying(std::size_t k, double logsum) const {
    double need = (log_g_ - logsum) / t_.approx(k);
    if (need <= 0) return 1.0;
    if (need > 708.0) return std::numeric_limits<double>::infinity();
    double a0 = std::exp(need);
    double r = upper_ ? std::ceil(a0 * (1.0 - 4e-12)) : std::ceil(a0 * (1.0 + 4e-12));
    return std::max(1.0, r);
  }

  double tail_union(double q, double q_prev, double p, double p_prev, double r) const {
    if (!(r < std::numeric_limits<double>::infinity())) return 0.0;
    double width = 1.0 / (q * (r * q + q_prev));
    if (base_ == BaseMeasure::Lebesgue) return width;
    // the union is an interval between p/q and (rp+p')/(rq+q'); the Gauss
    // density decreases, so evaluate at the left endpoint (the smaller one).
    // The second endpoint is computed in a form that cannot overflow for
    // large r.
    double x0 = p / q;
    double x1 = (p + p_prev / r) / (q + q_prev / r);
    double left = std::min(x0, x1);
    return std::log1p(width / (1.0 + left)) / std::numbers::ln2;
  }

  const Weights& t_;
  double log_g_;
  BaseMeasure base_;
  std::int64_t cutoff_;
  bool upper_;
};

}  // namespace

Bracket RatBracket::rounded() const {
  Bracket b{to_double_down(lo), to_double_up(hi)};
  if (b.lo < 0) b.lo = 0;
  return b;
}

std::int64_t min_digit_meeting(const BigRat& t, const BigRat& g) {
  if (t <= 0) throw DomainError("exponent must be positive");
  if (g < 1) throw DomainError("threshold g must be >= 1");
  ProductTest pt({t}, g);
  std::vector<std::int64_t> digits;
  return min_qualifying_digit(pt, digits, 0.0L, 0);
}

BigRat tail_sum_1d(const BigRat& t, const BigRat& g) {
  std::int64_t a = min_digit_meeting(t, g);
  if (a == kNoDigit) throw DomainError("tail_sum_1d: the qualifying digit exceeds 2^61");
  return BigRat(1, a);
}

RatBracket weighted_tail_sum_exact(const Weights& t, const BigRat& g, std::int64_t cutoff) {
  check_tail_args(t, g, cutoff);
  if (t.size() > 2) throw DomainError("exact weighted tail sums support m <= 2");
  ProductTest pt(sorted_exponents(t), g);
  std::vector<std::int64_t> digits;
  if (t.size() == 1) {
    std::int64_t r = min_qualifying_digit(pt, digits, 0.0L, 0);
    if (r == kNoDigit) return RatBracket{BigRat(0), BigRat(1, BigInt(kDigitCap))};
    return RatBracket{BigRat(1, r), BigRat(1, r)};
  }
  std::int64_t r0 = min_qualifying_digit(pt, digits, 0.0L, 0);
  std::vector<BigRat> lo_terms, hi_terms;
  std::int64_t last = std::min(r0 == kNoDigit ? cutoff : r0 - 1, cutoff);
  for (std::int64_t a = 1; a <= last; ++a) {
    digits.push_back(a);
    std::int64_t r1 = min_qualifying_digit(
        pt, digits, pt.exp_ld(0) * std::log(static_cast<long double>(a)), 1);
    digits.pop_back();
    BigRat mass(1, BigInt(a) * (a + 1));
    if (r1 == kNoDigit) {
      hi_terms.push_back(mass / kDigitCap);
    } else {
      BigRat term = mass / r1;
      lo_terms.push_back(term);
      hi_terms.push_back(term);
    }
  }
  BigRat lo = sum_pairwise(lo_terms, 0, lo_terms.size());
  BigRat hi = sum_pairwise(hi_terms, 0, hi_terms.size());
  if (r0 != kNoDigit && r0 <= cutoff) {
    lo += BigRat(1, r0);
    hi += BigRat(1, r0);
  } else {
    hi += BigRat(1, cutoff + 1);
  }
  return RatBracket{lo, hi};
}

Bracket weighted_tail_sum(const Weights& t, const BigRat& g, std::int64_t cutoff) {
  check_tail_args(t, g, cutoff);
  if (t.size() <= 2) return weighted_tail_sum_exact(t, g, cutoff).rounded();
  ProductTest pt(sorted_exponents(t), g);
  WeightedTailHp rec(pt, cutoff);
  auto [lo, hi] = rec.run(0, 0.0L);
  return pad_outward(lo, hi);
}

double asymptotic_envelope(const Weights& t, double g) {
  if (g < std::exp(1.0)) throw DomainError("asymptotic_envelope requires g >= e");
  double lg = std::log(g);
  return std::exp((t.ell() - 1) * std::log(lg) - lg / t.t_max());
}

RatBracket measure_of_event_exact(const Weights& t, const BigRat& threshold,
                                  std::int64_t cutoff) {
  check_tail_args(t, threshold, cutoff);
  if (t.size() > 2) throw DomainError("exact event measures support m <= 2");
  std::vector<BigRat> exps;
  for (std::size_t i = 0; i < t.size(); ++i) exps.push_back(t.exact(i));
  ProductTest pt(std::move(exps), threshold);
  EventRec<LebesgueExactAcc> rec(pt, cutoff, LebesgueExactAcc{});
  auto [lo, hi] = rec.run(0, BigInt(1), BigInt(0), BigInt(0), BigInt(1), 0.0L);
  return RatBracket{lo, hi};
}

Bracket measure_of_event(const Weights& t, const BigRat& threshold, BaseMeasure base,
                         std::int64_t cutoff) {
  check_tail_args(t, threshold, cutoff);
  if (base == BaseMeasure::Lebesgue && t.size() <= 2) {
    return measure_of_event_exact(t, threshold, cutoff).rounded();
  }
  std::vector<BigRat> exps;
  for (std::size_t i = 0; i < t.size(); ++i) exps.push_back(t.exact(i));
  ProductTest pt(std::move(exps), threshold);
  if (base == BaseMeasure::Lebesgue) {
    EventRec<LebesgueHpAcc> rec(pt, cutoff, LebesgueHpAcc{});
    auto [lo, hi] = rec.run(0, BigInt(1), BigInt(0), BigInt(0), BigInt(1), 0.0L);
    return pad_outward(lo, hi);
  }
  EventRec<GaussHpAcc> rec(pt, cutoff, GaussHpAcc{});
  auto [lo, hi] = rec.run(0, BigInt(1), BigInt(0), BigInt(0), BigInt(1), 0.0L);
  return pad_outward(lo, hi);
}

Bracket measure_of_event_fast(const Weights& t, double log_threshold, BaseMeasure base,
                              std::int64_t cutoff) {
  if (cutoff < 2) throw DomainError("cutoff must be at least 2");
  if (log_threshold < 0) throw DomainError("event thresholds must be >= 1");
  double lo, hi;
  if (std::isinf(log_threshold)) {
    lo = 0.0;
    hi = 0.0;
  } else {
    EventFast lower(t, log_threshold, base, cutoff, false);
    EventFast upper(t, log_threshold, base, cutoff, true);
    lo = lower.run(0, 1.0, 0.0, 0.0, 1.0, 0.0);
    hi = upper.run(0, 1.0, 0.0, 0.0, 1.0, 0.0);
  }
  // digit enumeration touches at most ~cutoff * m terms; 1e-9 relative
  // padding dwarfs the double rounding and the sub-denormal leaf losses
  lo = std::max(0.0, lo * (1.0 - 1e-9) - 1e-250);
  hi = hi * (1.0 + 1e-9) + 1e-250;
  return Bracket{lo, hi};
}

}  // namespace cfm
