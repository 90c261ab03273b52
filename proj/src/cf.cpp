#include "cfm/cf.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <limits>

namespace cfm {

void validate_word(const Word& word) {
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] < 1) {
      throw DomainError("digit a_" + std::to_string(i + 1) + " = " +
                        std::to_string(word[i]) + " is not a positive integer");
    }
  }
}

Word expand_rational(const BigRat& x, std::size_t max_depth) {
  if (x < 0 || x >= 1) throw DomainError("expand_rational: x must lie in [0,1)");
  Word w;
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  // x = num/den in (0,1); one Euclidean step emits a = floor(den/num) and
  // replaces x by den/num - a. The loop cannot emit a final digit 1: a zero
  // remainder means x = 1/a with a >= 2 because x < 1.
  while (num != 0 && w.size() < max_depth) {
    BigInt a = den / num;
    BigInt rem = den - a * num;
    if (a > std::numeric_limits<Digit>::max()) {
      throw DomainError("expand_rational: partial quotient exceeds 2^63-1");
    }
    w.push_back(static_cast<Digit>(a));
    den = num;
    num = rem;
  }
  return w;
}

std::vector<Convergent> convergents(const Word& word) {
  validate_word(word);
  std::vector<Convergent> out;
  out.reserve(word.size());
  BigInt p_prev = 1, q_prev = 0, p = 0, q = 1;
  int k = 0;
  for (Digit a : word) {
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    ++k;
    out.push_back(Convergent{p, q, k});
  }
  return out;
}

ConvergentPair final_convergents(const Word& word) {
  validate_word(word);
  BigInt p_prev = 1, q_prev = 0, p = 0, q = 1;
  for (Digit a : word) {
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  return ConvergentPair{p_prev, q_prev, p, q};
}

BigRat word_value(const Word& word) {
  ConvergentPair c = final_convergents(word);
  return BigRat(c.p, c.q);
}

Cylinder cylinder(const Word& word) {
  ConvergentPair c = final_convergents(word);
  BigRat at_word(c.p, c.q);
  BigRat at_next(c.p + c.p_prev, c.q + c.q_prev);
  Cylinder cyl;
  cyl.word = word;
  if (word.size() % 2 == 0) {
    cyl.left = at_word;
    cyl.right = at_next;
    cyl.closed = ClosedEnd::Left;
  } else {
    cyl.left = at_next;
    cyl.right = at_word;
    cyl.closed = ClosedEnd::Right;
  }
  return cyl;
}

BigRat lebesgue_measure(const Cylinder& c) { return c.right - c.left; }

HighFloat gauss_measure_hp(const BigRat& a, const BigRat& b) {
  const BigRat& lo = a <= b ? a : b;
  const BigRat& hi = a <= b ? b : a;
  BigRat ratio = (1 + hi) / (1 + lo);
  return log(static_cast<HighFloat>(ratio)) / log(HighFloat(2));
}

MeasureValue gauss_measure(const BigRat& a, const BigRat& b) {
  // (1/log 2) * log((1+hi)/(1+lo)), computed with 50-digit floats so the
  // only error that survives is the final rounding to double.
  double value = static_cast<double>(gauss_measure_hp(a, b));
  double bound = std::abs(value) * std::numeric_limits<double>::epsilon() +
                 std::numeric_limits<double>::denorm_min();
  return MeasureValue{value, bound};
}

MeasureValue gauss_measure(const Cylinder& c) { return gauss_measure(c.left, c.right); }

}  // namespace cfm
