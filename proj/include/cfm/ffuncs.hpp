#pragma once

#include <cstddef>

#include "cfm/weights.hpp"

namespace cfm {

// The penalty-exponent functions used by the pressure root equation. Each
// maps s in [0,1] to the exponent f(s) applied to the growth base, so the
// potential becomes -s ln|T'| - f(s) ln B. All of them vanish at s = 0 and
// are strictly positive on (0,1].
enum class FKind { Single, Pair, UnitIter, GeneralIter };

// s/t0
double f_single(double t0, double s);

// s^2 / (t0 t1 max{s/t1 + (1-s)/t0, s/t0})
double f_pair(double t0, double t1, double s);

// m-fold iteration f_1 = s, f_{k+1} = s f_k / (1 - s + f_k); at s = 0 the
// value is 0 by continuity (f_k ~ s^k near 0)
double f_unit_iter(std::size_t m, double s);

// starts from f_single(t_0, s) and folds in one exponent at a time with
// denominator t_l f_prev + max{0, s - (2s-1) t_l / max_{i<l} t_i}; agrees
// with f_pair for two exponents and with f_unit_iter on all-ones weights
double f_general_iter(const Weights& t, double s);

// dispatcher: Single uses t[0]; Pair requires exactly two exponents;
// UnitIter uses only the number of exponents
double f_eval(FKind kind, const Weights& t, double s);

}  // namespace cfm
