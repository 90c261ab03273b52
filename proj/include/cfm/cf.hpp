#pragma once

#include <cstdint>
#include <vector>

#include "cfm/rational.hpp"

namespace cfm {

using Digit = std::int64_t;
using Word = std::vector<Digit>;

// Numerator/denominator of the k-th convergent of a word, with the
// standard seed p_{-1}=1, q_{-1}=0, p_0=0, q_0=1.
struct Convergent {
  BigInt p;
  BigInt q;
  int index = 0;
};

// Final two convergent rows of a word: (p_{n-1}, q_{n-1}, p_n, q_n).
struct ConvergentPair {
  BigInt p_prev;
  BigInt q_prev;
  BigInt p;
  BigInt q;
};

enum class ClosedEnd { Left, Right };

// The set of x in [0,1) whose expansion starts with `word`.
// Even order: [left, right); odd order: (left, right].
struct Cylinder {
  Word word;
  BigRat left;
  BigRat right;
  ClosedEnd closed = ClosedEnd::Left;
  BigRat length() const { return right - left; }
};

// An inexact quantity together with a bound on its absolute error.
struct MeasureValue {
  double value = 0.0;
  double abs_error_bound = 0.0;
};

// Throws DomainError unless every digit is >= 1.
void validate_word(const Word& word);

// Expansion of a rational x in [0,1) by the Euclidean algorithm.
// A complete expansion is canonical (never ends in digit 1), so
// word_value(expand_rational(x)) == x. If max_depth cuts the expansion
// short, the result is a plain prefix and may end in 1.
Word expand_rational(const BigRat& x, std::size_t max_depth = static_cast<std::size_t>(-1));

// Convergents p_k/q_k for k = 1..n.
std::vector<Convergent> convergents(const Word& word);

// (p_{n-1}, q_{n-1}, p_n, q_n); defined for the empty word too (n=0).
ConvergentPair final_convergents(const Word& word);

// Exact value p_n/q_n of a finite word.
BigRat word_value(const Word& word);

Cylinder cylinder(const Word& word);

// Exact Lebesgue measure 1/(q_n (q_n + q_{n-1})).
BigRat lebesgue_measure(const Cylinder& c);

// Gauss measure (1/log 2) * integral of 1/(1+x) over the cylinder or
// interval, evaluated in high precision and rounded once to double.
MeasureValue gauss_measure(const Cylinder& c);
MeasureValue gauss_measure(const BigRat& a, const BigRat& b);
HighFloat gauss_measure_hp(const BigRat& a, const BigRat& b);

}  // namespace cfm
