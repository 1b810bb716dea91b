#pragma once

#include "ldpot/core.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace ldpot {

/// Syntax error or unknown identifier in a weight expression.
class WeightParseError : public InvalidArgument {
 public:
  WeightParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// An admissible weight Q given by an arithmetic expression.
///
/// Variables: x, y (real and imaginary part of the first coordinate),
/// x1..xn, y1..yn, and r (Euclidean norm of the point). Functions: log, exp,
/// abs. Operators: + - * / and ^ with a numeric exponent; integer exponents
/// are evaluated by repeated multiplication. Unary minus is accepted.
///
/// NaN results count as +inf (the point is excluded); -inf is a domain error.
class Weight {
 public:
  static Weight parse(std::string_view source);
  static Weight zero();

  double operator()(const Point& z) const;
  Eigen::VectorXd evaluate(const PointSet& points) const;

  const std::string& source() const { return source_; }
  bool isZero() const { return zero_; }
  /// Hash of the canonical source text.
  std::string id() const;

  struct Node;

 private:
  Weight() = default;

  std::string source_;
  std::shared_ptr<const Node> root_;
  bool zero_ = false;
};

/// Fraction of the points where Q is finite.
double admissibilityFraction(const Weight& Q, const PointSet& points);

}  // namespace ldpot
