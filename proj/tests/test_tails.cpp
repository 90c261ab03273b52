#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cfm/cf.hpp"
#include "cfm/tails.hpp"

using namespace cfm;

namespace {

BigRat rat(long long n, long long d = 1) { return BigRat(n, d); }

// independent slow check: smallest a with a^t >= g by direct bigint powers
// (integer exponents only)
long long min_digit_oracle(long long t_num, const BigRat& g) {
  for (long long a = 1;; ++a) {
    if (boost::multiprecision::pow(BigInt(a), static_cast<unsigned>(t_num)) >= g) return a;
  }
}

// exact weighted tail sum for m = 2 integer exponents: enumerate the first
// coordinate while it cannot qualify alone, close the second coordinate by
// its full telescoping value 1/r, and once a^t0 >= g close the remaining
// first-coordinate range outright (sum of 1/(a'(a'+1)) over a' >= a is 1/a)
HighFloat brute_pair_sum(long long t0, long long t1, const BigRat& g) {
  HighFloat total(0);
  for (long long a = 1;; ++a) {
    BigRat apow = boost::multiprecision::pow(BigInt(a), static_cast<unsigned>(t0));
    if (apow >= g) {
      total += HighFloat(1) / HighFloat(a);
      return total;
    }
    BigRat residual_rhs = g / apow;
    long long r = 1;
    while (boost::multiprecision::pow(BigInt(r), static_cast<unsigned>(t1)) < residual_rhs) ++r;
    total += HighFloat(1) / (HighFloat(a) * HighFloat(a + 1) * HighFloat(r));
  }
}

}  // namespace

TEST_CASE("tail_sum_1d frozen values") {
  CHECK(tail_sum_1d(rat(1), rat(10)) == rat(1, 10));
  CHECK(tail_sum_1d(rat(2), rat(100)) == rat(1, 10));
  CHECK(tail_sum_1d(rat(1), rat(1)) == rat(1));
  // a^1.5 >= 8 first holds at a = 4
  CHECK(tail_sum_1d(rat(3, 2), rat(8)) == rat(1, 4));
  // a^(1/2) >= 3 first holds at a = 9
  CHECK(tail_sum_1d(rat(1, 2), rat(3)) == rat(1, 9));
  // exact tie: 7^2 = 49 qualifies
  CHECK(tail_sum_1d(rat(2), rat(49)) == rat(1, 7));
  CHECK(tail_sum_1d(rat(2), rat(50)) == rat(1, 8));
  // fractional g
  CHECK(tail_sum_1d(rat(1), BigRat(19, 2)) == rat(1, 10));
}

TEST_CASE("min_digit_meeting matches the direct search") {
  for (long long t : {1, 2, 3}) {
    for (long long gn : {1, 2, 7, 50, 360, 1001}) {
      CHECK(min_digit_meeting(rat(t), rat(gn)) == min_digit_oracle(t, rat(gn)));
      CHECK(min_digit_meeting(rat(t), BigRat(2 * gn + 1, 2)) ==
            min_digit_oracle(t, BigRat(2 * gn + 1, 2)));
    }
  }
  // beyond the 61-bit digit cap
  BigRat huge = boost::multiprecision::pow(BigInt(10), 30);
  CHECK(min_digit_meeting(rat(1), BigRat(huge)) == kNoDigit);
  CHECK(min_digit_meeting(rat(2), BigRat(huge)) == 1000000000000000);
}

TEST_CASE("telescoping: partial sum plus exact remainder is exact") {
  // sum_{a=r}^{N} 1/(a(a+1)) + 1/(N+1) == 1/r as rationals
  for (long long t : {1, 2}) {
    for (long long g : {10, 123, 5000}) {
      long long r = min_digit_meeting(rat(t), rat(g));
      BigRat partial(0);
      const long long N = r + 2500;
      for (long long a = r; a <= N; ++a) partial += BigRat(1, BigInt(a) * (a + 1));
      CHECK(partial + BigRat(1, N + 1) == tail_sum_1d(rat(t), rat(g)));
    }
  }
}

TEST_CASE("weighted_tail_sum reduces to tail_sum_1d for m = 1") {
  Weights t = Weights::parse("1");
  auto b = weighted_tail_sum_exact(t, rat(10), 10000);
  CHECK(b.lo == rat(1, 10));
  CHECK(b.hi == rat(1, 10));
  auto d = weighted_tail_sum(t, rat(10), 10000);
  CHECK(d.lo == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(d.width() < 1e-15);
}

TEST_CASE("weighted_tail_sum m = 2 brackets the brute-force sum") {
  struct Case {
    const char* t;
    long long t0, t1;
    long long g;
  };
  // the oracle enumerates the smaller exponent first, matching the library
  for (const Case& c : {Case{"1,1", 1, 1, 100}, Case{"2,1", 1, 2, 1000}, Case{"1,2", 1, 2, 1000},
                        Case{"1,1", 1, 1, 7919}}) {
    Weights t = Weights::parse(c.t);
    auto b = weighted_tail_sum_exact(t, rat(c.g), 2000);
    HighFloat brute = brute_pair_sum(c.t0, c.t1, rat(c.g));
    HighFloat lo = static_cast<HighFloat>(b.lo), hi = static_cast<HighFloat>(b.hi);
    HighFloat slack = HighFloat("1e-35");
    CHECK(lo <= brute + slack);
    CHECK(brute <= hi + slack);
    CHECK(b.hi - b.lo <= rat(1, 2001));
  }
}

TEST_CASE("brackets are nested as the cutoff grows") {
  Weights t = Weights::parse("1,1");
  RatBracket prev = weighted_tail_sum_exact(t, rat(100000), 50);
  for (long long cutoff : {100, 400, 1600, 6400}) {
    RatBracket next = weighted_tail_sum_exact(t, rat(100000), cutoff);
    CHECK(next.lo >= prev.lo);
    CHECK(next.hi <= prev.hi);
    CHECK(next.lo <= next.hi);
    prev = next;
  }
  Weights t3 = Weights::parse("1,1,1");
  Bracket p3 = weighted_tail_sum(t3, rat(5000), 40);
  for (long long cutoff : {80, 160, 320}) {
    Bracket n3 = weighted_tail_sum(t3, rat(5000), cutoff);
    CHECK(n3.lo >= p3.lo - 1e-15);
    CHECK(n3.hi <= p3.hi + 1e-15);
    p3 = n3;
  }
}

TEST_CASE("weighted_tail_sum is invariant under permuting t") {
  auto a = weighted_tail_sum_exact(Weights::parse("2,1"), rat(5000), 3000);
  auto b = weighted_tail_sum_exact(Weights::parse("1,2"), rat(5000), 3000);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  auto c = weighted_tail_sum(Weights::parse("1,2,2"), rat(300), 200);
  auto d = weighted_tail_sum(Weights::parse("2,2,1"), rat(300), 200);
  CHECK(c.lo == d.lo);
  CHECK(c.hi == d.hi);
}

TEST_CASE("asymptotic_envelope frozen values") {
  double e10 = std::exp(10.0);
  CHECK(asymptotic_envelope(Weights::parse("1,1"), e10) ==
        doctest::Approx(10.0 * std::exp(-10.0)).epsilon(1e-12));
  CHECK(asymptotic_envelope(Weights::parse("2,1"), e10) ==
        doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
  CHECK(asymptotic_envelope(Weights::parse("1,1,1"), e10) ==
        doctest::Approx(100.0 * std::exp(-10.0)).epsilon(1e-12));
  CHECK_THROWS_AS(asymptotic_envelope(Weights::parse("1"), 2.0), DomainError);
}

TEST_CASE("midpoint-to-envelope ratios stay in a narrow band") {
  // the acceptance gate allows a span of 10; check it with margin here
  for (const char* tw : {"1,1", "2,1", "1,2", "1,1,1"}) {
    Weights t = Weights::parse(tw);
    double rmin = 1e300, rmax = 0;
    for (double g : {1e2, 1e3, 1e4, 1e5, 1e6}) {
      Bracket b = weighted_tail_sum(t, rat(static_cast<long long>(g)),
                                    t.size() > 2 ? 3000 : 10000);
      double ratio = b.midpoint() / asymptotic_envelope(t, g);
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    CHECK(rmax / rmin <= 10.0);
  }
}

TEST_CASE("measure_of_event frozen cases") {
  Weights t1 = Weights::parse("1");
  auto b = measure_of_event_exact(t1, rat(10), 10000);
  CHECK(b.lo == rat(1, 10));
  CHECK(b.hi == rat(1, 10));
  auto whole = measure_of_event_exact(t1, rat(1), 10000);
  CHECK(whole.lo == rat(1));
  CHECK(whole.hi == rat(1));
  // Gauss: {a_1 >= 10} = [0, 1/10), measure log2(11/10); the reference is
  // built in high precision because log2(1.1) in doubles is a few ulps high
  Bracket g = measure_of_event(t1, rat(10), BaseMeasure::Gauss, 10000);
  HighFloat expect = gauss_measure_hp(BigRat(0), BigRat(1, 10));
  CHECK(HighFloat(g.lo) <= expect);
  CHECK(HighFloat(g.hi) >= expect);
  CHECK(g.width() < 1e-14);
}

TEST_CASE("measure_of_event m = 2 against direct cylinder enumeration") {
  Weights t = Weights::parse("1,1");
  const long long threshold = 50;
  // oracle: for a1 < 50 the qualifying a2 form a tail {a2 >= ceil(50/a1)}
  // whose union is an interval with word-value endpoints; for a1 >= 50 the
  // whole cylinder qualifies and that region is the interval (0, 1/50)
  BigRat brute(0);
  for (long long a1 = 1; a1 < threshold; ++a1) {
    long long r = (threshold + a1 - 1) / a1;
    BigRat v0 = word_value({a1});
    BigRat v1 = word_value({a1, r});
    BigRat width = v0 > v1 ? v0 - v1 : v1 - v0;
    brute += width;
  }
  brute += BigRat(1, threshold);
  auto b = measure_of_event_exact(t, rat(threshold), 4000);
  CHECK(b.lo <= brute);
  CHECK(brute <= b.hi);
  CHECK(b.hi - b.lo <= rat(1, 4001));

  // fully resolved case: the boundary digits stay below the cutoff at every
  // level, so the bracket collapses onto the exact measure
  auto tight = measure_of_event_exact(t, rat(threshold), 64);
  CHECK(tight.lo == tight.hi);
  CHECK(tight.lo == brute);
}

TEST_CASE("Gauss and Lebesgue event measures satisfy the density sandwich") {
  const double ln2 = std::numbers::ln2;
  for (long long threshold : {5, 40, 300}) {
    for (const char* tw : {"1", "1,1", "2,1"}) {
      Weights t = Weights::parse(tw);
      Bracket leb = measure_of_event(t, rat(threshold), BaseMeasure::Lebesgue, 2000);
      Bracket gss = measure_of_event(t, rat(threshold), BaseMeasure::Gauss, 2000);
      CHECK(gss.hi >= leb.lo / (2.0 * ln2) - 1e-15);
      CHECK(gss.lo <= leb.hi / ln2 + 1e-15);
    }
  }
}

TEST_CASE("fast event measure agrees with the exact one") {
  for (long long threshold : {10, 100, 1000, 12345}) {
    for (const char* tw : {"1", "1,1", "2,1"}) {
      Weights t = Weights::parse(tw);
      double lg = std::log(static_cast<double>(threshold));
      Bracket fast = measure_of_event_fast(t, lg, BaseMeasure::Lebesgue, 5000);
      Bracket exact = measure_of_event(t, rat(threshold), BaseMeasure::Lebesgue, 5000);
      CHECK(fast.lo <= exact.lo + 1e-12);
      CHECK(fast.hi >= exact.hi - 1e-12);
      // an integer threshold sits exactly on a digit boundary, and the lower
      // pass then gives up one whole boundary cell, about hi/R of the value
      CHECK(fast.width() <= exact.width() + 0.1 * exact.hi + 1e-8);

      Bracket fg = measure_of_event_fast(t, lg, BaseMeasure::Gauss, 5000);
      Bracket eg = measure_of_event(t, rat(threshold), BaseMeasure::Gauss, 5000);
      CHECK(fg.lo <= eg.lo + 1e-12);
      CHECK(fg.hi >= eg.hi - 1e-12);
    }
  }
  // away from digit boundaries both passes pick the same digits and the fast
  // bracket is as tight as the exact one, up to its relative padding
  Weights t11 = Weights::parse("1,1");
  Bracket fme = measure_of_event_fast(t11, std::log(10.5), BaseMeasure::Lebesgue, 5000);
  Bracket eme = measure_of_event(t11, BigRat(21, 2), BaseMeasure::Lebesgue, 5000);
  CHECK(fme.lo <= eme.lo + 1e-12);
  CHECK(fme.hi >= eme.hi - 1e-12);
  CHECK(fme.width() <= eme.width() + 1e-6 * eme.hi + 1e-9);
}

TEST_CASE("fast event measure handles huge thresholds") {
  Weights t1 = Weights::parse("1");
  // {a_1 >= 2^50}: Lebesgue measure 2^-50 up to one part in 2^50
  Bracket b = measure_of_event_fast(t1, 50.0 * std::numbers::ln2, BaseMeasure::Lebesgue, 100);
  double expect = std::pow(2.0, -50.0);
  CHECK(b.lo <= expect * 1.001);
  CHECK(b.hi >= expect * 0.999);
  CHECK(b.hi <= expect * 1.1);
  // saturated threshold, two coordinates: the lower end collapses to zero,
  // while the upper end keeps the truncation tail {a_1 > cutoff}, about
  // 1.44/cutoff under the Gauss measure
  Bracket z = measure_of_event_fast(Weights::parse("1,1"), 5000.0, BaseMeasure::Gauss, 100);
  CHECK(z.lo == 0.0);
  CHECK(z.hi <= 0.015);
  Bracket z2 = measure_of_event_fast(Weights::parse("1,1"), 5000.0, BaseMeasure::Gauss, 10000);
  CHECK(z2.hi <= 1.6e-4);
  // one coordinate resolves exactly even when the boundary digit overflows
  Bracket inf = measure_of_event_fast(t1, std::numeric_limits<double>::infinity(),
                                      BaseMeasure::Gauss, 100);
  CHECK(inf.hi <= 1e-200);
}

TEST_CASE("argument validation") {
  Weights t = Weights::parse("1,1");
  CHECK_THROWS_AS(weighted_tail_sum(t, BigRat(1, 2), 100), DomainError);
  CHECK_THROWS_AS(weighted_tail_sum(t, rat(10), 1), DomainError);
  CHECK_THROWS_AS(weighted_tail_sum_exact(Weights::parse("1,1,1"), rat(10), 100), DomainError);
  CHECK_THROWS_AS(tail_sum_1d(rat(1), BigRat(1, 2)), DomainError);
  CHECK_THROWS_AS(measure_of_event(t, BigRat(1, 3), BaseMeasure::Gauss, 100), DomainError);
}
