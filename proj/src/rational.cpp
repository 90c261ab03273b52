#include "cfm/rational.hpp"

#include <cctype>

namespace cfm {

BigRat parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = (text[i] == '-');
    ++i;
  }
  BigInt mantissa = 0;
  std::size_t int_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mantissa = mantissa * 10 + (text[i] - '0');
    ++int_digits;
    ++i;
  }
  std::size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mantissa = mantissa * 10 + (text[i] - '0');
      ++frac_digits;
      ++i;
    }
  }
  if (i != text.size() || (int_digits == 0 && frac_digits == 0)) {
    throw DomainError("not a decimal literal: '" + text + "'");
  }
  BigInt den = 1;
  for (std::size_t k = 0; k < frac_digits; ++k) den *= 10;
  BigRat r(mantissa, den);
  if (negative) r = -r;
  return r;
}

double to_double(const BigRat& r) {
  return static_cast<double>(static_cast<HighFloat>(r));
}

double to_double(const BigInt& n) {
  return static_cast<double>(static_cast<HighFloat>(n));
}

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;  // truncates toward zero
  if ((num < 0) != (den < 0) && q * den != num) --q;
  return q;
}

BigInt ceil_rat(const BigRat& x) {
  BigInt n = numerator(x);
  BigInt d = denominator(x);
  BigInt q = floor_div(n, d);
  if (q * d != n) ++q;
  if (q < 1) q = 1;
  return q;
}

}  // namespace cfm
