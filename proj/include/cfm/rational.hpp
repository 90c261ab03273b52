#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "cfm/errors.hpp"

namespace cfm {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
// 50 decimal digits; used where double rounding must be pushed far below
// the tolerances we report.
using HighFloat = boost::multiprecision::cpp_bin_float_50;

// Parses a plain decimal literal ("2", "1.5", "0.125", "-3.04") exactly.
// Scientific notation is deliberately not accepted: weights and thresholds
// are spec'd as decimal literals whose ties must be decided exactly.
BigRat parse_decimal(const std::string& text);

// Conversion through HighFloat so the only loss is the final rounding to
// double (<= 0.5 ulp); boost's direct rational->double path is avoided on
// purpose since its rounding is not documented.
double to_double(const BigRat& r);
double to_double(const BigInt& n);

// floor(num/den) for den > 0.
BigInt floor_div(const BigInt& num, const BigInt& den);

// Smallest integer a >= 1 with a >= x (x > 0), i.e. ceil(x) clamped to >= 1.
BigInt ceil_rat(const BigRat& x);

}  // namespace cfm
