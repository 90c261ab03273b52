#pragma once

#include <string>
#include <vector>

#include "cfm/rational.hpp"

namespace cfm {

// Exponent weights (t_0, ..., t_{m-1}). Parsed from decimal literals and
// kept exact so "t_i == max t" ties are decided without rounding.
class Weights {
 public:
  static Weights parse(const std::string& comma_separated);
  static Weights from_literals(const std::vector<std::string>& literals);
  static Weights from_rationals(const std::vector<BigRat>& values);

  std::size_t size() const { return exact_.size(); }
  const BigRat& exact(std::size_t i) const { return exact_[i]; }
  double approx(std::size_t i) const { return approx_[i]; }
  const std::vector<double>& approx_all() const { return approx_; }

  const BigRat& t_max_exact() const { return t_max_; }
  double t_max() const { return t_max_approx_; }
  // multiplicity of the maximal weight, decided by exact comparison
  int ell() const { return ell_; }

  bool operator==(const Weights& other) const { return exact_ == other.exact_; }

  std::string to_string() const;

 private:
  std::vector<BigRat> exact_;
  std::vector<double> approx_;
  BigRat t_max_;
  double t_max_approx_ = 0.0;
  int ell_ = 0;

  void finish();  // validates positivity, fills the derived fields
};

}  // namespace cfm
