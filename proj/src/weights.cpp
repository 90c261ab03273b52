#include "cfm/weights.hpp"

#include <sstream>

namespace cfm {

Weights Weights::parse(const std::string& comma_separated) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : comma_separated) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return from_literals(parts);
}

Weights Weights::from_literals(const std::vector<std::string>& literals) {
  Weights w;
  for (const auto& lit : literals) {
    BigRat v = parse_decimal(lit);
    w.exact_.push_back(v);
  }
  w.finish();
  return w;
}

Weights Weights::from_rationals(const std::vector<BigRat>& values) {
  Weights w;
  w.exact_ = values;
  w.finish();
  return w;
}

void Weights::finish() {
  if (exact_.empty()) throw DomainError("weights: need at least one exponent");
  for (std::size_t i = 0; i < exact_.size(); ++i) {
    if (exact_[i] <= 0) {
      throw DomainError("weights: t_" + std::to_string(i) + " must be positive");
    }
  }
  t_max_ = exact_[0];
  for (const auto& v : exact_) {
    if (v > t_max_) t_max_ = v;
  }
  ell_ = 0;
  for (const auto& v : exact_) {
    if (v == t_max_) ++ell_;
  }
  approx_.clear();
  for (const auto& v : exact_) approx_.push_back(to_double(v));
  t_max_approx_ = to_double(t_max_);
}

std::string Weights::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < exact_.size(); ++i) {
    if (i) os << ",";
    os << exact_[i];
  }
  os << ")";
  return os.str();
}

}  // namespace cfm
