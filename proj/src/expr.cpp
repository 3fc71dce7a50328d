#include "cis/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "cis/error.hpp"

namespace cis::expr {

struct Node {
  Kind kind;
  Op op = Op::Add;
  double value = 0.0;
  std::size_t index = 0;
  int exponent = 0;
  std::vector<Expr> children;
  std::size_t arity = 0;
};

namespace {

const char* op_name(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Neg: return "-";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
  }
  return "?";
}

bool is_unary(Op op) { return op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div; }

std::optional<Op> function_named(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, Op>, 7> kFunctions{{
      {"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan}, {"exp", Op::Exp},
      {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
  }};
  for (const auto& [n, op] : kFunctions) {
    if (n == name) return op;
  }
  return std::nullopt;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction and inspection

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index;
  n->arity = index + 1;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
  if (!is_unary(op)) throw Error("binary operator used as unary");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->op = op;
  n->arity = arg.arity();
  n->children.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (is_unary(op)) throw Error("unary operator used as binary");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->arity = std::max(lhs.arity(), rhs.arity());
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->exponent = exponent;
  n->arity = base.arity();
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
std::size_t Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
const Expr& Expr::arg() const { return node_->children.at(0); }
std::size_t Expr::arity() const { return node_->arity; }

std::string Expr::to_string() const {
  switch (kind()) {
    case Kind::Constant: return format_number(value());
    case Kind::Variable: return "x" + std::to_string(index() + 1);
    case Kind::Power: return "(" + arg().to_string() + "^" + std::to_string(exponent()) + ")";
    case Kind::Unary:
      if (op() == Op::Neg) return "(-" + arg().to_string() + ")";
      return std::string(op_name(op())) + "(" + arg().to_string() + ")";
    case Kind::Binary:
      return "(" + lhs().to_string() + " " + op_name(op()) + " " + rhs().to_string() + ")";
  }
  return {};
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Constant: return a.value() == b.value();
    case Kind::Variable: return a.index() == b.index();
    case Kind::Power: return a.exponent() == b.exponent() && a.arg() == b.arg();
    case Kind::Unary: return a.op() == b.op() && a.arg() == b.arg();
    case Kind::Binary: return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view src, std::size_t num_vars) : src_(src), num_vars_(num_vars) {}

  Expr run() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (accept('+')) {
        e = Expr::binary(Op::Add, e, parse_product());
      } else if (accept('-')) {
        e = Expr::binary(Op::Sub, e, parse_product());
      } else {
        return e;
      }
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = Expr::binary(Op::Mul, e, parse_unary());
      } else if (accept('/')) {
        e = Expr::binary(Op::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    bool negative = false;
    if (accept('-')) negative = true;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_ || (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))) {
      throw ParseError("exponent must be an integer literal", at);
    }
    int n = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, n);
    if (ec != std::errc()) throw ParseError("exponent out of range", at);
    if (accept('^')) throw ParseError("chained exponent; add parentheses", pos_ - 1);
    return Expr::power(std::move(base), negative ? -n : n);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", start);
    return Expr::constant(v);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      std::size_t k = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (k == 0 || k > num_vars_) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
      return Expr::variable(k - 1);
    }
    if (name == "pi") return Expr::constant(std::numbers::pi);

    auto fn = function_named(name);
    if (!fn) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    expect('(');
    std::vector<Expr> args;
    if (!accept(')')) {
      do {
        args.push_back(parse_sum());
      } while (accept(','));
      expect(')');
    }
    if (args.size() != 1) {
      throw ParseError(std::string(name) + " takes 1 argument, got " + std::to_string(args.size()), start);
    }
    return Expr::unary(*fn, std::move(args.front()));
  }

  std::string_view src_;
  std::size_t num_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source, std::size_t num_vars) { return Parser(source, num_vars).run(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " produced a non-finite value");
  return v;
}

// Scalar primitives. The double overloads enforce the operator domains that
// the Interval overloads enforce on whole ranges.
double div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}
Interval div(const Interval& a, const Interval& b) { return a / b; }

double fsin(double x) { return std::sin(x); }
double fcos(double x) { return std::cos(x); }
double ftan(double x) { return checked(std::tan(x), "tan"); }
double fexp(double x) { return checked(std::exp(x), "exp"); }
double flog(double x) {
  if (x <= 0.0) throw DomainError("log of a non-positive value");
  return std::log(x);
}
double fsqrt(double x) {
  if (x < 0.0) throw DomainError("sqrt of a negative value");
  return std::sqrt(x);
}
double fabs_(double x) { return std::abs(x); }
double fpow(double x, int n) {
  if (n < 0 && x == 0.0) throw DomainError("negative power of zero");
  return std::pow(x, n);
}
Interval fsin(const Interval& x) { return sin(x); }
Interval fcos(const Interval& x) { return cos(x); }
Interval ftan(const Interval& x) { return tan(x); }
Interval fexp(const Interval& x) { return exp(x); }
Interval flog(const Interval& x) { return log(x); }
Interval fsqrt(const Interval& x) { return sqrt(x); }
Interval fabs_(const Interval& x) { return abs(x); }
Interval fpow(const Interval& x, int n) { return pow(x, n); }

// Sign of the derivative of |x|; undefined where x can be zero.
double abs_slope(double x) {
  if (x == 0.0) throw DomainError("abs is not differentiable at 0");
  return x > 0.0 ? 1.0 : -1.0;
}
Interval abs_slope(const Interval& x) {
  if (x.lo() >= 0.0 && x.hi() > 0.0) return Interval(1.0);
  if (x.hi() <= 0.0 && x.lo() < 0.0) return Interval(-1.0);
  throw DomainError("abs is not differentiable on an interval containing 0");
}

/// Forward-mode dual number with a dense gradient.
template <class T>
struct Dual {
  T v;
  std::vector<T> d;
};

template <class T>
Dual<T> scale(const Dual<T>& a, const T& value, const T& slope) {
  Dual<T> r{value, a.d};
  for (auto& x : r.d) x = slope * x;
  return r;
}

template <class T>
Dual<T> add(const Dual<T>& a, const Dual<T>& b, bool subtract) {
  Dual<T> r{subtract ? a.v - b.v : a.v + b.v, a.d};
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = subtract ? a.d[i] - b.d[i] : a.d[i] + b.d[i];
  return r;
}

template <class T>
Dual<T> mul(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r{a.v * b.v, a.d};
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = a.v * b.d[i] + b.v * a.d[i];
  return r;
}

template <class T>
Dual<T> divide(const Dual<T>& a, const Dual<T>& b) {
  const T q = div(a.v, b.v);
  Dual<T> r{q, a.d};
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = div(a.d[i] - q * b.d[i], b.v);
  return r;
}

template <class T>
T eval_plain(const Expr& e, std::span<const T> x) {
  switch (e.kind()) {
    case Kind::Constant: return T(e.value());
    case Kind::Variable: return x[e.index()];
    case Kind::Power: return fpow(eval_plain(e.arg(), x), e.exponent());
    case Kind::Unary: {
      const T a = eval_plain(e.arg(), x);
      switch (e.op()) {
        case Op::Neg: return -a;
        case Op::Sin: return fsin(a);
        case Op::Cos: return fcos(a);
        case Op::Tan: return ftan(a);
        case Op::Exp: return fexp(a);
        case Op::Log: return flog(a);
        case Op::Sqrt: return fsqrt(a);
        case Op::Abs: return fabs_(a);
        default: break;
      }
      break;
    }
    case Kind::Binary: {
      const T a = eval_plain(e.lhs(), x);
      const T b = eval_plain(e.rhs(), x);
      switch (e.op()) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return div(a, b);
        default: break;
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

template <class T>
Dual<T> eval_dual(const Expr& e, std::span<const Dual<T>> x) {
  const std::size_t n = x.size();
  switch (e.kind()) {
    case Kind::Constant: return Dual<T>{T(e.value()), std::vector<T>(n, T(0.0))};
    case Kind::Variable: return x[e.index()];
    case Kind::Power: {
      const Dual<T> a = eval_dual(e.arg(), x);
      const int k = e.exponent();
      if (k == 0) return Dual<T>{T(1.0), std::vector<T>(n, T(0.0))};
      return scale(a, fpow(a.v, k), T(static_cast<double>(k)) * fpow(a.v, k - 1));
    }
    case Kind::Unary: {
      const Dual<T> a = eval_dual(e.arg(), x);
      switch (e.op()) {
        case Op::Neg: return scale(a, -a.v, T(-1.0));
        case Op::Sin: return scale(a, fsin(a.v), fcos(a.v));
        case Op::Cos: return scale(a, fcos(a.v), -fsin(a.v));
        case Op::Tan: {
          const T c = fcos(a.v);
          return scale(a, ftan(a.v), div(T(1.0), c * c));
        }
        case Op::Exp: {
          const T v = fexp(a.v);
          return scale(a, v, v);
        }
        case Op::Log: return scale(a, flog(a.v), div(T(1.0), a.v));
        case Op::Sqrt: {
          const T v = fsqrt(a.v);
          return scale(a, v, div(T(1.0), T(2.0) * v));
        }
        case Op::Abs: return scale(a, fabs_(a.v), abs_slope(a.v));
        default: break;
      }
      break;
    }
    case Kind::Binary: {
      const Dual<T> a = eval_dual(e.lhs(), x);
      const Dual<T> b = eval_dual(e.rhs(), x);
      switch (e.op()) {
        case Op::Add: return add(a, b, false);
        case Op::Sub: return add(a, b, true);
        case Op::Mul: return mul(a, b);
        case Op::Div: return divide(a, b);
        default: break;
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

void require_bound(const Expr& e, std::size_t n) {
  if (e.arity() > n) {
    throw DimensionError("expression references x" + std::to_string(e.arity()) + " but only " +
                         std::to_string(n) + " values are bound");
  }
}

template <class T>
std::vector<Dual<T>> seed(std::span<const T> x) {
  std::vector<Dual<T>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Dual<T> d{x[i], std::vector<T>(x.size(), T(0.0))};
    d.d[i] = T(1.0);
    out.push_back(std::move(d));
  }
  return out;
}

Interval mean_value_form(const Expr& e, const Box& box) {
  const auto mid = box.midpoint();
  const Interval center = eval_interval(e, Box::point(mid), Inclusion::natural);
  const Box grad = eval_gradient_interval(e, box);
  Interval out = center;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    out += grad[i] * (box[i] - Interval(mid[i]));
  }
  return out;
}

}  // namespace

double eval_real(const Expr& e, std::span<const double> x) {
  require_bound(e, x.size());
  return checked(eval_plain<double>(e, x), "evaluation");
}

Interval eval_interval(const Expr& e, const Box& box, Inclusion mode) {
  require_bound(e, box.dim());
  switch (mode) {
    case Inclusion::natural: return eval_plain<Interval>(e, box.axes());
    case Inclusion::mean_value: return mean_value_form(e, box);
    case Inclusion::best: {
      const Interval nat = eval_plain<Interval>(e, box.axes());
      try {
        if (auto both = intersect(nat, mean_value_form(e, box))) return *both;
      } catch (const DomainError&) {
      }
      return nat;
    }
  }
  return eval_plain<Interval>(e, box.axes());
}

std::vector<double> eval_gradient(const Expr& e, std::span<const double> x) {
  require_bound(e, x.size());
  const auto vars = seed<double>(x);
  auto r = eval_dual<double>(e, vars);
  for (double g : r.d) checked(g, "gradient");
  return r.d;
}

Box eval_gradient_interval(const Expr& e, const Box& box) {
  require_bound(e, box.dim());
  const auto vars = seed<Interval>(box.axes());
  return Box(eval_dual<Interval>(e, vars).d);
}

}  // namespace cis::expr
