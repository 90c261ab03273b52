#include "cfm/ffuncs.hpp"

#include <algorithm>
#include <cmath>

#include "cfm/errors.hpp"

namespace cfm {

namespace {

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s must lie in [0, 1]");
}

}  // namespace

double f_single(double t0, double s) {
  check_s(s);
  if (!(t0 > 0)) throw DomainError("exponent must be positive");
  return s / t0;
}

double f_pair(double t0, double t1, double s) {
  check_s(s);
  if (!(t0 > 0) || !(t1 > 0)) throw DomainError("exponents must be positive");
  if (s == 0.0) return 0.0;
  double denom = t0 * t1 * std::max(s / t1 + (1.0 - s) / t0, s / t0);
  return s * s / denom;
}

double f_unit_iter(std::size_t m, double s) {
  check_s(s);
  if (m == 0) throw DomainError("iteration count must be at least 1");
  if (s == 0.0) return 0.0;
  double f = s;
  for (std::size_t k = 1; k < m; ++k) f = s * f / (1.0 - s + f);
  return f;
}

double f_general_iter(const Weights& t, double s) {
  check_s(s);
  if (s == 0.0) return 0.0;
  double f = s / t.approx(0);
  double t_seen = t.approx(0);
  for (std::size_t l = 1; l < t.size(); ++l) {
    double tl = t.approx(l);
    double kink = std::max(0.0, s - (2.0 * s - 1.0) * tl / t_seen);
    f = s * f / (tl * f + kink);
    t_seen = std::max(t_seen, tl);
  }
  return f;
}

double f_eval(FKind kind, const Weights& t, double s) {
  switch (kind) {
    case FKind::Single:
      return f_single(t.approx(0), s);
    case FKind::Pair:
      if (t.size() != 2) throw DomainError("pair form requires exactly two exponents");
      return f_pair(t.approx(0), t.approx(1), s);
    case FKind::UnitIter:
      return f_unit_iter(t.size(), s);
    case FKind::GeneralIter:
      return f_general_iter(t, s);
  }
  throw DomainError("unknown f kind");
}

}  // namespace cfm
