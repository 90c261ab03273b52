#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfm/errors.hpp"
#include "cfm/weights.hpp"

namespace cfm {

// Growth functions Psi: N -> [1, inf), given as expressions over n.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?
//   base   := number | 'n' | 'e' | 'log' '(' expr ')' | 'exp' '(' expr ')'
//           | 'pow' '(' expr ')' | 'poly' '(' expr ')'
//           | 'doubleexp' '(' expr ',' expr ')' | '(' expr ')'
//
// Presets expand at parse time: pow(B) = B^n, poly(a) = n^a,
// doubleexp(c, beta) = c^(beta^n).

struct GrowthNode;
using GrowthPtr = std::shared_ptr<const GrowthNode>;

struct GrowthNode {
  enum class Kind { Literal, Var, ConstE, Add, Sub, Mul, Div, Pow, Log, Exp };
  Kind kind;
  double literal = 0.0;
  GrowthPtr lhs;
  GrowthPtr rhs;
};

struct GrowthExpr {
  GrowthPtr root;
  std::string text;  // original source, echoed in outputs
};

GrowthExpr parse_growth(const std::string& text);

// Values are carried as sign plus log of absolute value so that doubly
// exponential growth never overflows until even its logarithm does; at that
// point the evaluation saturates to +infinity, which every consumer treats
// as "beyond any threshold".
template <class Real>
struct SignedLog {
  int sign = 0;    // -1, 0, +1
  Real log_abs{};  // ln|value|, meaningful only when sign != 0

  static SignedLog zero() { return SignedLog{0, Real(0)}; }
  static SignedLog from_value(Real v) {
    using std::abs;
    using std::log;
    if (v == 0) return zero();
    return SignedLog{v > 0 ? 1 : -1, Real(log(abs(v)))};
  }
  // sign * exp(log_abs), saturating on overflow
  Real value() const {
    using std::exp;
    if (sign == 0) return Real(0);
    Real v = exp(log_abs);
    return sign > 0 ? v : -v;
  }
};

template <class Real>
SignedLog<Real> eval_signed_log(const GrowthPtr& node, long long n);

// ln Psi(n). Throws DomainError (naming n) when Psi(n) < 1 or the expression
// hits a log/division domain error. +infinity means Psi(n) overflowed even
// in log space.
double eval_log_growth(const GrowthExpr& e, long long n);

// Same evaluation carried out with 50-digit floats, for guard-band rechecks.
HighFloat eval_log_growth_hp(const GrowthExpr& e, long long n);

struct ExponentEstimate {
  double value = 0.0;      // exp of the windowed minimum; +inf if saturated
  double log_value = 0.0;  // the windowed minimum itself
  bool is_infinite = false;
  std::vector<double> window_minima;  // running minima across the window
  long long window_lo = 0;
  long long window_hi = 0;
};

// Finite-horizon estimates of the growth exponents:
//   Bhat = exp( min_{N/2 <= n <= N} ln Psi(n) / n )
//   bhat = exp( min_{N/2 <= n <= N} ln ln Psi(n) / n ), skipping Psi(n) <= 1.
// These are windowed stand-ins for liminfs; they are labelled as estimates
// everywhere and never silently promoted to the true limits.
struct ExponentEstimates {
  ExponentEstimate B;
  ExponentEstimate b;
  long long horizon = 0;
};

ExponentEstimates estimate_exponents(const GrowthExpr& e, long long N);

// Convergence/divergence test for the series
//   sum_n (ln Psi(n))^(ell-1) / Psi(n)^(1/t_max).
// The verdict is Convergent or Divergent only when a certificate evaluated
// on the window [N/2, N] supports it; otherwise Undecided.
enum class SeriesVerdictKind { Convergent, Divergent, Undecided };

struct SeriesVerdict {
  SeriesVerdictKind verdict = SeriesVerdictKind::Undecided;
  double partial_sum = 0.0;             // sum of terms for n = 1..N
  std::optional<double> tail_bound;     // certified bound when Convergent
  std::string certificate;              // which test fired, with its numbers
  double t_max = 0.0;
  int ell = 0;
  long long horizon = 0;
};

SeriesVerdict series_test(const GrowthExpr& e, const Weights& t, long long N);

// Series term in log space: (ell-1)*ln(ln Psi(n)) - ln Psi(n)/t_max.
// Returns -inf for a zero term. Exposed for tests and the CLI.
double series_log_term(const GrowthExpr& e, const Weights& t, long long n);

}  // namespace cfm
