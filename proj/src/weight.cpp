#include "ldpot/weight.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace ldpot {

WeightParseError::WeightParseError(const std::string& what, std::size_t offset)
    : InvalidArgument(what + " at offset " + std::to_string(offset)), offset_(offset) {}

struct Weight::Node {
  enum class Op { Const, VarX, VarY, VarR, Add, Sub, Mul, Div, Neg, Pow, Log, Exp, Abs };
  Op op = Op::Const;
  double value = 0.0;  // constant, or the exponent of Pow
  int coord = 0;       // coordinate index for VarX / VarY
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Weight::Node>;
using Op = Weight::Node::Op;

NodePtr makeNode(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Weight::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skipSpace();
    if (pos_ == src_.size()) throw WeightParseError("empty weight expression", 0);
    NodePtr root = expr();
    skipSpace();
    if (pos_ != src_.size()) fail("unexpected character");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    if (pos_ >= src_.size()) throw WeightParseError("unexpected end of input", pos_);
    throw WeightParseError(what + " '" + std::string(1, src_[pos_]) + "'", pos_);
  }

  void skipSpace() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skipSpace();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = makeNode(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = makeNode(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = makeNode(Op::Mul, lhs, factor());
      } else if (accept('/')) {
        lhs = makeNode(Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr base = primary();
    while (accept('^')) {
      skipSpace();
      bool negative = false;
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
        negative = src_[pos_] == '-';
        ++pos_;
      }
      auto p = std::const_pointer_cast<Weight::Node>(makeNode(Op::Pow, base));
      p->value = negative ? -number() : number();
      base = p;
    }
    return base;
  }

  double number() {
    skipSpace();
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec != std::errc() || ptr == first) fail("expected a number, found");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  NodePtr primary() {
    skipSpace();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')', found");
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return makeNode(Op::Neg, factor());
    }
    if (c == '+') {
      ++pos_;
      return factor();
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      auto n = std::const_pointer_cast<Weight::Node>(makeNode(Op::Const));
      n->value = number();
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name == "log" || name == "exp" || name == "abs") {
      if (!accept('(')) fail("expected '(' after function name, found");
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')', found");
      const Op op = name == "log" ? Op::Log : name == "exp" ? Op::Exp : Op::Abs;
      return makeNode(op, arg);
    }
    if (name == "r") return makeNode(Op::VarR);
    if (name == "x" || name == "y") {
      auto n = std::const_pointer_cast<Weight::Node>(makeNode(name == "x" ? Op::VarX : Op::VarY));
      n->coord = 0;
      return n;
    }
    if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec == std::errc() && ptr == name.data() + name.size() && index >= 1) {
        auto n = std::const_pointer_cast<Weight::Node>(
            makeNode(name[0] == 'x' ? Op::VarX : Op::VarY));
        n->coord = index - 1;
        return n;
      }
    }
    throw WeightParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double integerPower(double base, long long e) {
  const bool invert = e < 0;
  unsigned long long n = static_cast<unsigned long long>(invert ? -e : e);
  double result = 1.0;
  double b = base;
  // Left-to-right repeated multiplication keeps small powers exact.
  if (n <= 16) {
    for (unsigned long long i = 0; i < n; ++i) result *= b;
  } else {
    while (n) {
      if (n & 1ULL) result *= b;
      b *= b;
      n >>= 1;
    }
  }
  return invert ? 1.0 / result : result;
}

double eval(const Weight::Node& node, const Point& z) {
  switch (node.op) {
    case Op::Const:
      return node.value;
    case Op::VarX:
    case Op::VarY: {
      if (node.coord >= z.size()) {
        throw InvalidArgument("weight refers to coordinate " + std::to_string(node.coord + 1) +
                              " of a point in dimension " + std::to_string(z.size()));
      }
      const Complex c = z(node.coord);
      return node.op == Op::VarX ? c.real() : c.imag();
    }
    case Op::VarR:
      return z.norm();
    case Op::Add:
      return eval(*node.lhs, z) + eval(*node.rhs, z);
    case Op::Sub:
      return eval(*node.lhs, z) - eval(*node.rhs, z);
    case Op::Mul:
      return eval(*node.lhs, z) * eval(*node.rhs, z);
    case Op::Div:
      return eval(*node.lhs, z) / eval(*node.rhs, z);
    case Op::Neg:
      return -eval(*node.lhs, z);
    case Op::Pow: {
      const double base = eval(*node.lhs, z);
      const double e = node.value;
      if (e == std::trunc(e) && std::abs(e) < 1e9) {
        return integerPower(base, static_cast<long long>(e));
      }
      return std::pow(base, e);
    }
    case Op::Log:
      return std::log(eval(*node.lhs, z));
    case Op::Exp:
      return std::exp(eval(*node.lhs, z));
    case Op::Abs:
      return std::abs(eval(*node.lhs, z));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Weight Weight::parse(std::string_view source) {
  if (source.empty()) throw WeightParseError("empty weight expression", 0);
  Weight w;
  w.source_ = std::string(source);
  w.root_ = Parser(source).parse();
  w.zero_ = w.root_->op == Op::Const && w.root_->value == 0.0;
  return w;
}

Weight Weight::zero() { return parse("0"); }

double Weight::operator()(const Point& z) const {
  if (zero_) return 0.0;
  const double v = eval(*root_, z);
  if (std::isnan(v)) return std::numeric_limits<double>::infinity();
  if (v == -std::numeric_limits<double>::infinity()) {
    throw InvalidArgument("weight '" + source_ + "' takes the value -inf");
  }
  return v;
}

Eigen::VectorXd Weight::evaluate(const PointSet& points) const {
  Eigen::VectorXd out(points.cols());
  for (Index j = 0; j < points.cols(); ++j) out(j) = (*this)(points.col(j));
  return out;
}

std::string Weight::id() const {
  std::string canonical;
  for (char c : source_) {
    if (c != ' ' && c != '\t') canonical.push_back(c);
  }
  return hexDigest(fnv1a(canonical));
}

double admissibilityFraction(const Weight& Q, const PointSet& points) {
  if (points.cols() == 0) return 0.0;
  const Eigen::VectorXd v = Q.evaluate(points);
  return static_cast<double>((v.array() < std::numeric_limits<double>::infinity()).count()) /
         static_cast<double>(points.cols());
}

}  // namespace ldpot
