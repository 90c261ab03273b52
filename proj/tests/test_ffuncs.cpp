#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfm/errors.hpp"
#include "cfm/ffuncs.hpp"

using namespace cfm;

TEST_CASE("f_single frozen values") {
  CHECK(f_single(2.0, 0.6) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(f_single(0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  for (double s : {0.0, 0.25, 0.5, 0.99, 1.0}) CHECK(f_single(1.0, s) == s);
}

TEST_CASE("f_pair frozen values and closed forms") {
  CHECK(f_pair(1.0, 1.0, 0.7) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(f_pair(2.0, 1.0, 0.6) == doctest::Approx(0.225).epsilon(1e-14));
  CHECK(f_pair(1.0, 2.0, 0.8) == doctest::Approx(0.4).epsilon(1e-14));
  for (int i = 0; i <= 100; ++i) {
    double s = i / 100.0;
    CHECK(f_pair(1.0, 1.0, s) == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(f_pair(2.0, 1.0, s) == doctest::Approx(s * s / (1.0 + s)).epsilon(1e-12));
    // exponents (1,2): piecewise with the kink at s = 2/3
    double expect = s > 2.0 / 3.0 ? s / 2.0 : s * s / (2.0 - s);
    CHECK(f_pair(1.0, 2.0, s) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("f_unit_iter frozen values") {
  CHECK(f_unit_iter(2, 0.7) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(f_unit_iter(3, 0.6) == doctest::Approx(0.216 / 0.76).epsilon(1e-14));
  for (double s : {0.0, 0.3, 1.0}) CHECK(f_unit_iter(1, s) == s);
  // s = 1 is a fixed point of the iteration
  for (std::size_t m : {2, 5, 9}) CHECK(f_unit_iter(m, 1.0) == doctest::Approx(1.0));
  CHECK(f_unit_iter(6, 0.0) == 0.0);
}

TEST_CASE("f_general_iter reduces to the special cases") {
  struct PairCase {
    const char* w;
    double t0, t1;
  };
  // two exponents reproduce f_pair across weights and s, kink included
  for (const PairCase& c : {PairCase{"1,1", 1, 1}, PairCase{"2,1", 2, 1}, PairCase{"1,2", 1, 2},
                            PairCase{"1.5,0.5", 1.5, 0.5}, PairCase{"0.3,2.7", 0.3, 2.7}}) {
    Weights t = Weights::parse(c.w);
    for (int i = 0; i <= 50; ++i) {
      double s = i / 50.0;
      CHECK(f_general_iter(t, s) == doctest::Approx(f_pair(c.t0, c.t1, s)).epsilon(1e-12));
    }
  }
  // all-ones weights reproduce the unit iteration
  for (std::size_t m = 1; m <= 6; ++m) {
    std::string ones_str = "1";
    for (std::size_t k = 1; k < m; ++k) ones_str += ",1";
    Weights ones = Weights::parse(ones_str);
    for (int i = 1; i <= 99; ++i) {
      double s = i / 100.0;
      CHECK(f_general_iter(ones, s) == doctest::Approx(f_unit_iter(m, s)).epsilon(1e-12));
    }
  }
  // one exponent is the single form
  Weights t3 = Weights::parse("3");
  for (double s : {0.1, 0.5, 1.0}) CHECK(f_general_iter(t3, s) == doctest::Approx(s / 3.0));
}

TEST_CASE("pair form lies strictly below the single form on (0,1)") {
  for (auto [t0, t1] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}, {0.5, 3.0}, {4.0, 0.25}}) {
    for (int i = 1; i <= 99; ++i) {
      double s = i / 100.0;
      CHECK(f_pair(t0, t1, s) < f_single(t0, s));
    }
  }
}

TEST_CASE("ordering the pair (2,1) below (1,2) on (1/2, 1)") {
  for (int i = 501; i < 1000; ++i) {
    double s = i / 1000.0;
    CHECK(f_pair(2.0, 1.0, s) < f_pair(1.0, 2.0, s));
  }
}

TEST_CASE("f functions are nondecreasing in s") {
  Weights t = Weights::parse("2,1,0.5");
  double prev_pair = -1, prev_gen = -1, prev_unit = -1;
  for (int i = 0; i <= 200; ++i) {
    double s = i / 200.0;
    double fp = f_pair(1.5, 1.0, s);
    double fg = f_general_iter(t, s);
    double fu = f_unit_iter(4, s);
    CHECK(fp >= prev_pair);
    CHECK(fg >= prev_gen);
    CHECK(fu >= prev_unit);
    prev_pair = fp;
    prev_gen = fg;
    prev_unit = fu;
  }
}

TEST_CASE("f_eval dispatch and argument validation") {
  Weights pair = Weights::parse("2,1");
  CHECK(f_eval(FKind::Single, pair, 0.6) == doctest::Approx(0.3));
  CHECK(f_eval(FKind::Pair, pair, 0.6) == doctest::Approx(0.225));
  CHECK(f_eval(FKind::UnitIter, pair, 0.7) == doctest::Approx(0.49));
  CHECK(f_eval(FKind::GeneralIter, pair, 0.6) == doctest::Approx(0.225));
  CHECK_THROWS_AS(f_eval(FKind::Pair, Weights::parse("1,1,1"), 0.5), DomainError);
  CHECK_THROWS_AS(f_single(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(f_pair(1.0, 1.0, 1.5), DomainError);
  CHECK_THROWS_AS(f_unit_iter(0, 0.5), DomainError);
  CHECK_THROWS_AS(f_general_iter(pair, std::nan("")), DomainError);
}
