#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfm/ffuncs.hpp"
#include "cfm/growth.hpp"
#include "cfm/weights.hpp"

namespace cfm {

// ln of the sum over all words (a_1,...,a_n) in {1..M}^n of e^{-nc} q_n^{-2s},
// where q_n is the word's continuant. Exhaustive depth-first enumeration;
// refuses to start when M^n exceeds `budget` leaf visits (the spectral
// engine handles those sizes).
double wordsum(int M, int n, double s, double c, double budget = 1e8);

struct PressureResult {
  double value = 0.0;     // ln(leading eigenvalue) - c
  double residual = 0.0;  // relative half-width of the final eigenvalue-ratio
                          // bracket; a convergence diagnostic, not a certified
                          // enclosure
  int iterations = 0;
  int grid_size = 0;
};

// Pressure of the potential -s ln|T'| - c on the digit alphabet {1,...,M}:
// the log of the leading eigenvalue of
//   (Lv)(x) = sum_{a<=M} (a+x)^{-2s} v(1/(a+x))
// computed by power iteration on a Chebyshev-node discretization. Branches
// beyond the first 64 are aggregated through a Taylor expansion of the
// iterate around 0, so the cost is independent of M and M may be
// astronomically large (up to ~2^900 as a double).
PressureResult pressure_spectral(double M, double s, double c, int grid_size = 32);

// n applications of the discretized transfer operator to the constant-one
// function, evaluated at x = 0. Mathematically identical to
// exp(wordsum(M, n, s, 0)); serves as the cross-engine consistency oracle.
double transfer_iterate_at_zero(int M, int n, double s, int grid_size = 32);

// Root in s of P_{1..M}(T, -s ln|T'| - f(s) ln B) = 0, located by bisection
// over [0,1]; the pressure side is strictly decreasing in s. Returns 0 when
// the equation is already nonpositive at s = 0 (only happens for M = 1).
double solve_s(double M, double B, const Weights& t, FKind fkind, double tol = 1e-8,
               int grid_size = 32);

struct SOfBResult {
  double value = 0.0;        // limit estimate, schedule tail extrapolated
  double error_bound = 0.0;  // last increment plus the geometric-tail estimate
  double final_M = 0.0;
  int steps = 0;
  bool lower_bound_only = false;  // schedule budget ran out before stabilizing
  std::vector<double> schedule;   // per-M roots, nondecreasing
};

// Limit of solve_s over the doubling alphabet schedule M = 2, 4, 8, ...
// The schedule stops once successive roots differ by less than tol/2; the
// remaining tail is estimated from the empirical increment ratio. When the
// doubling budget runs out first, the result is flagged as a lower bound.
SOfBResult s_of_B(double B, const Weights& t, FKind fkind, double tol = 1e-8,
                  int grid_size = 32, int max_doublings = 800);

// Which dimension formula applies, when the caller wants to force it
// instead of trusting the finite-horizon exponent estimates.
enum class BranchKind { BEqualsOne, BInfinite, BFinite };

enum class DimBranch { BEqualsOne, BInfinite, FiniteExact, FiniteBracket };

struct DimensionResult {
  double lower = 0.0;
  double upper = 0.0;
  DimBranch branch = DimBranch::BEqualsOne;
  double B_hat = 0.0;  // estimated growth base (+inf when saturated)
  double b_hat = 0.0;  // estimated doubly-exponential rate
  double final_M = 0.0;
  double tol = 0.0;
  bool lower_bound_only = false;
  std::string note;
};

// Hausdorff dimension of the weighted limsup set for growth function e and
// exponents t. The branch comes from estimate_exponents unless overridden:
// base near 1 gives dimension 1; saturated base gives the closed form
// 1/(1+b); a finite base solves the pressure equation, exactly for one or
// two exponents and as a candidate bracket for more.
DimensionResult hdim_dispatch(const GrowthExpr& e, const Weights& t,
                              std::optional<BranchKind> branch_override = {},
                              double tol = 1e-8, long long n_max = 2000,
                              int grid_size = 32);

std::string to_string(DimBranch b);

}  // namespace cfm
