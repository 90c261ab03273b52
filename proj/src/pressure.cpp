#include "cfm/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "cfm/errors.hpp"

namespace cfm {

namespace {

constexpr int kDirectBranches = 64;  // branches applied through interpolation
constexpr int kTaylorTerms = 8;      // tail aggregation order around x = 0
constexpr int kPowerIterCap = 5000;

// sum of q_n^{-2s} over all words of length `depth` extending the current
// continuant pair (q_prev, q); continuants stay exact in doubles well past
// the enumeration budget (they would need to exceed 2^53)
double subtree_sum(int M, int depth, double two_s, double q_prev, double q) {
  if (depth == 0) return std::exp(-two_s * std::log(q));
  double sum = 0.0, comp = 0.0;
  for (int a = 1; a <= M; ++a) {
    double term = subtree_sum(M, depth - 1, two_s, q, a * q + q_prev);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Chebyshev-node discretization of the transfer operator
//   (Lv)(x) = sum_{a=1..M} (a+x)^{-2s} v(1/(a+x))
// as an explicit G x G matrix. The first min(M,64) branches evaluate the
// barycentric interpolant directly; the remaining ones contribute through
// the Taylor expansion of v at 0, turning the whole far tail into a handful
// of power sums that have closed Euler-Maclaurin forms.
struct SpectralOp {
  int G = 0;
  std::vector<double> x;
  std::vector<double> bw;  // barycentric weights for the nodes
  std::vector<double> L;   // row-major G*G

  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    for (int i = 0; i < G; ++i) {
      const double* row = &L[static_cast<std::size_t>(i) * G];
      double sum = 0.0, comp = 0.0;
      for (int j = 0; j < G; ++j) {
        double y = row[j] * v[j] - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
      out[i] = sum;
    }
  }

  double eval(double xq, const std::vector<double>& v) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < G; ++j) {
      double d = xq - x[j];
      if (d == 0.0) return v[j];
      double w = bw[j] / d;
      num += w * v[j];
      den += w;
    }
    return num / den;
  }
};

// Euler-Maclaurin closed form for sum_{a=n0..n1} (a+x)^{-p}, correct to
// ~1e-13 relative for n0 >= 65 and p <= 10 (the B_8 term is that small)
double tail_power_sum(double p, double x, double n0, double n1) {
  double A = n0 + x, B = n1 + x;
  double q1 = 1.0 - p;
  double lr = std::log(B / A);
  double integral = q1 == 0.0 ? lr : std::exp(q1 * std::log(A)) * std::expm1(q1 * lr) / q1;
  double gA = std::exp(-p * std::log(A));
  double gB = std::exp(-p * std::log(B));
  double S = integral + 0.5 * (gA + gB);
  double d1A = p * gA / A, d1B = p * gB / B;
  S += (d1A - d1B) / 12.0;
  double c3 = p * (p + 1.0) * (p + 2.0);
  double d3A = c3 * gA / (A * A * A), d3B = c3 * gB / (B * B * B);
  S -= (d3A - d3B) / 720.0;
  double c5 = c3 * (p + 3.0) * (p + 4.0);
  double d5A = c5 * gA / (A * A * A * A * A), d5B = c5 * gB / (B * B * B * B * B);
  S += (d5A - d5B) / 30240.0;
  return S;
}

SpectralOp build_operator(double M, double s, int G) {
  if (!(M >= 1.0) || !std::isfinite(M)) throw DomainError("alphabet bound M must be at least 1");
  if (M < 9007199254740992.0 && std::floor(M) != M)
    throw DomainError("alphabet bound M must be an integer");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s must lie in [0, 1]");
  if (G < 8) throw DomainError("grid size must be at least 8");
  if (G > 4096) throw DomainError("grid size too large");

  SpectralOp op;
  op.G = G;
  op.x.resize(G);
  op.bw.resize(G);
  std::vector<double> theta(G);
  for (int j = 0; j < G; ++j) {
    theta[j] = std::numbers::pi * (2 * j + 1) / (2.0 * G);
    op.x[j] = 0.5 * (1.0 + std::cos(theta[j]));
    op.bw[j] = ((j & 1) ? -1.0 : 1.0) * std::sin(theta[j]);
  }
  op.L.assign(static_cast<std::size_t>(G) * G, 0.0);

  int A0 = static_cast<int>(std::min(M, static_cast<double>(kDirectBranches)));
  double two_s = 2.0 * s;

  std::vector<double> ell(G);
  for (int i = 0; i < G; ++i) {
    double* row = &op.L[static_cast<std::size_t>(i) * G];
    for (int a = 1; a <= A0; ++a) {
      double y = 1.0 / (a + op.x[i]);
      double fac = std::exp(-two_s * std::log(a + op.x[i]));
      double den = 0.0;
      int hit = -1;
      for (int j = 0; j < G; ++j) {
        double d = y - op.x[j];
        if (d == 0.0) {
          hit = j;
          break;
        }
        ell[j] = op.bw[j] / d;
        den += ell[j];
      }
      if (hit >= 0) {
        row[hit] += fac;
        continue;
      }
      for (int j = 0; j < G; ++j) row[j] += fac * ell[j] / den;
    }
  }

  if (M > static_cast<double>(A0)) {
    // Taylor coefficients of the interpolant at x = 0 are linear in the node
    // values: c_d = sum_j C[d][j] v_j, obtained from the Chebyshev series
    // (derivatives of T_k at the left endpoint have a closed product form)
    std::vector<std::vector<double>> C(kTaylorTerms, std::vector<double>(G, 0.0));
    for (int d = 0; d < kTaylorTerms; ++d) {
      double fact = 1.0;
      for (int r = 2; r <= d; ++r) fact *= r;
      double scale = std::ldexp(1.0, d) / fact;
      for (int k = d; k < G; ++k) {
        double prod = 1.0;
        for (int r = 0; r < d; ++r)
          prod *= (static_cast<double>(k) * k - static_cast<double>(r) * r) / (2.0 * r + 1.0);
        double tkd = (((k + d) & 1) ? -1.0 : 1.0) * prod;
        double coefw = (k == 0 ? 1.0 : 2.0) / G;
        for (int j = 0; j < G; ++j) C[d][j] += scale * tkd * coefw * std::cos(k * theta[j]);
      }
    }
    for (int i = 0; i < G; ++i) {
      double* row = &op.L[static_cast<std::size_t>(i) * G];
      for (int d = 0; d < kTaylorTerms; ++d) {
        double Sp = tail_power_sum(two_s + d, op.x[i], static_cast<double>(A0) + 1.0, M);
        for (int j = 0; j < G; ++j) row[j] += Sp * C[d][j];
      }
    }
  }
  return op;
}

PressureResult leading_eigenvalue(const SpectralOp& op, double c) {
  const int G = op.G;
  std::vector<double> v(G, 1.0), w(G);
  double lam_lo = 0.0, lam_hi = 0.0;
  int it = 0;
  bool bracketed = false;
  for (it = 1; it <= kPowerIterCap; ++it) {
    op.apply(v, w);
    lam_lo = std::numeric_limits<double>::infinity();
    lam_hi = -lam_lo;
    bracketed = true;
    double wmax = 0.0;
    for (int i = 0; i < G; ++i) {
      if (!(w[i] > 0.0) || !(v[i] > 0.0)) {
        bracketed = false;
      } else {
        double r = w[i] / v[i];
        lam_lo = std::min(lam_lo, r);
        lam_hi = std::max(lam_hi, r);
      }
      wmax = std::max(wmax, std::abs(w[i]));
    }
    if (!(wmax > 0.0)) throw BudgetError("power iteration collapsed to zero");
    for (int i = 0; i < G; ++i) v[i] = w[i] / wmax;
    if (bracketed && it >= 3 && lam_hi - lam_lo <= 1e-12 * std::max(1.0, lam_hi)) break;
  }
  if (!bracketed || it > kPowerIterCap) {
    std::ostringstream os;
    os << "power iteration did not converge within " << kPowerIterCap
       << " steps; last eigenvalue-ratio spread " << (bracketed ? lam_hi - lam_lo : -1.0);
    throw BudgetError(os.str());
  }
  double lam = 0.5 * (lam_lo + lam_hi);
  PressureResult out;
  out.value = std::log(lam) - c;
  out.residual = 0.5 * (lam_hi - lam_lo) / lam;
  out.iterations = it;
  out.grid_size = G;
  return out;
}

// bisection for a strictly decreasing function with g(lo) > 0 >= g(hi)
template <class Fn>
double bisect_root(Fn&& g, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double wordsum(int M, int n, double s, double c, double budget) {
  if (M < 1) throw DomainError("alphabet bound M must be at least 1");
  if (n < 1) throw DomainError("depth n must be at least 1");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s must lie in [0, 1]");
  if (!(c >= 0.0)) throw DomainError("penalty c must be nonnegative");
  if (!(budget > 0.0)) throw DomainError("budget must be positive");
  if (n * std::log(static_cast<double>(M)) > std::log(budget)) {
    std::ostringstream os;
    os << "word enumeration would visit M^n = " << std::pow(static_cast<double>(M), n)
       << " leaves, over the budget " << budget << "; use the spectral engine for this size";
    throw BudgetError(os.str());
  }
  if (M == 1) {
    // single word (1,1,...,1); switch the continuant pair to log form once
    // it would overflow
    double q_prev = 1.0, q = 1.0;
    double lq_prev = 0.0, lq = 0.0;
    bool logged = false;
    for (int i = 2; i <= n; ++i) {
      if (!logged) {
        double next = q + q_prev;
        q_prev = q;
        q = next;
        if (q > 1e300) {
          lq_prev = std::log(q_prev);
          lq = std::log(q);
          logged = true;
        }
      } else {
        double lnext = lq + std::log1p(std::exp(lq_prev - lq));
        lq_prev = lq;
        lq = lnext;
      }
    }
    double logq = logged ? lq : std::log(q);
    return -2.0 * s * logq - n * c;
  }
  double two_s = 2.0 * s;
  // each first digit gets its own partial sum, and the parts are merged in
  // digit order, so the result does not depend on how work is scheduled
  std::vector<double> parts(M);
  auto fill_stride = [&](int first, int stride) {
    for (int a = first; a <= M; a += stride)
      parts[a - 1] = subtree_sum(M, n - 1, two_s, 1.0, static_cast<double>(a));
  };
  bool parallel = M > 1 && n * std::log(static_cast<double>(M)) > std::log(1e6);
  if (parallel) {
    int workers = static_cast<int>(std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(M)));
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (int w = 1; w <= workers; ++w)
      futs.push_back(std::async(std::launch::async, fill_stride, w, workers));
    for (auto& f : futs) f.get();
  } else {
    fill_stride(1, 1);
  }
  double sum = 0.0, comp = 0.0;
  for (double p : parts) {
    double y = p - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::log(sum) - n * c;
}

PressureResult pressure_spectral(double M, double s, double c, int grid_size) {
  if (!(c >= 0.0)) throw DomainError("penalty c must be nonnegative");
  SpectralOp op = build_operator(M, s, grid_size);
  return leading_eigenvalue(op, c);
}

double transfer_iterate_at_zero(int M, int n, double s, int grid_size) {
  if (M < 1) throw DomainError("alphabet bound M must be at least 1");
  if (n < 1) throw DomainError("depth n must be at least 1");
  SpectralOp op = build_operator(static_cast<double>(M), s, grid_size);
  std::vector<double> v(grid_size, 1.0), w(grid_size);
  for (int k = 0; k < n; ++k) {
    op.apply(v, w);
    v.swap(w);
  }
  return op.eval(0.0, v);
}

double solve_s(double M, double B, const Weights& t, FKind fkind, double tol, int grid_size) {
  if (!(B > 1.0)) throw DomainError("growth base B must exceed 1");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  double lnB = std::log(B);
  auto g = [&](double s) {
    return pressure_spectral(M, s, 0.0, grid_size).value - f_eval(fkind, t, s) * lnB;
  };
  if (g(0.0) <= 0.0) return 0.0;
  if (g(1.0) > 0.0)
    throw DomainError("pressure stays positive at s = 1; the root equation has no solution");
  return bisect_root(g, 0.0, 1.0, tol);
}

SOfBResult s_of_B(double B, const Weights& t, FKind fkind, double tol, int grid_size,
                  int max_doublings) {
  if (!(B > 1.0)) throw DomainError("growth base B must exceed 1");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_doublings < 2 || max_doublings > 900)
    throw DomainError("doubling budget must lie in [2, 900]");
  double lnB = std::log(B);
  // inner roots are resolved well below the stopping increment tol/2 so the
  // increment ratios used for extrapolation stay clean
  double inner = std::max(tol / 64.0, 1e-12);

  SOfBResult out;
  double prev = 0.0, dprev = 0.0;
  bool converged = false;
  for (int k = 1; k <= max_doublings; ++k) {
    double M = std::ldexp(1.0, k);
    auto g = [&](double s) {
      return pressure_spectral(M, s, 0.0, grid_size).value - f_eval(fkind, t, s) * lnB;
    };
    double s_k;
    if (out.schedule.empty()) {
      if (g(1.0) > 0.0)
        throw DomainError("pressure stays positive at s = 1; the root equation has no solution");
      s_k = g(0.0) <= 0.0 ? 0.0 : bisect_root(g, 0.0, 1.0, inner);
    } else {
      // the roots grow with the alphabet, so bracket near the previous one
      // and widen geometrically if the guess falls short
      double lo = std::max(0.0, prev - 16.0 * inner);
      double span = std::max(64.0 * inner, 4.0 * dprev);
      double hi = std::min(1.0, prev + span);
      while (hi < 1.0 && g(hi) > 0.0) {
        span *= 2.0;
        hi = std::min(1.0, hi + span);
      }
      if (g(lo) <= 0.0) lo = 0.0;
      s_k = bisect_root(g, lo, hi, inner);
    }
    if (s_k < prev - 8.0 * inner)
      throw DomainError("alphabet-schedule roots decreased; raise the grid size");
    s_k = std::max(s_k, prev);
    double delta = s_k - prev;
    out.schedule.push_back(s_k);
    out.final_M = M;
    prev = s_k;
    dprev = delta;
    if (k >= 2 && delta < tol / 2.0) {
      converged = true;
      break;
    }
  }
  out.steps = static_cast<int>(out.schedule.size());
  out.lower_bound_only = !converged;

  // the increments shrink geometrically; estimate the remaining tail from
  // the empirical ratio, sanity-bounded by the rate the truncated alphabet
  // imposes (each doubling scales the missing branch weight by 2^(1-2s))
  double delta_last = out.steps >= 2
                          ? out.schedule[out.steps - 1] - out.schedule[out.steps - 2]
                          : 0.0;
  double r_theory = std::min(0.9995, std::exp2(1.0 - 2.0 * prev));
  double r_emp = -1.0;
  {
    std::vector<double> ratios;
    int first = std::max(1, out.steps - 8);
    for (int i = first; i < out.steps; ++i) {
      double d0 = out.schedule[i - 1] - (i >= 2 ? out.schedule[i - 2] : 0.0);
      double d1 = out.schedule[i] - out.schedule[i - 1];
      // skip increments near the bisection resolution, their ratio is noise
      if (d0 > 16.0 * inner && d1 > 16.0 * inner) ratios.push_back(d1 / d0);
    }
    if (ratios.size() >= 2) {
      std::sort(ratios.begin(), ratios.end());
      r_emp = ratios[ratios.size() / 2];
      if (!(r_emp > 0.0 && r_emp < 1.05)) r_emp = -1.0;
    }
  }
  double r_use = r_emp > 0.0 ? std::min(r_emp, 0.9995) : r_theory;
  double corr = delta_last * r_use / (1.0 - r_use);
  out.value = std::min(1.0, prev + corr);
  double r_err = std::min(0.9995, std::max(r_use, r_theory));
  out.error_bound = delta_last * r_err / (1.0 - r_err) + delta_last + 2.0 * inner;
  return out;
}

}  // namespace cfm
