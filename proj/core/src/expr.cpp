#include "salvage/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "salvage/error.hpp"

namespace salvage {

namespace {

const Expr::Node& zero_node() {
  static const Expr::Node node{};
  return node;
}

constexpr std::array<std::pair<std::string_view, Builtin>, 7> kBuiltins{{
    {"exp", Builtin::Exp},
    {"log", Builtin::Log},
    {"sqrt", Builtin::Sqrt},
    {"abs", Builtin::Abs},
    {"phi", Builtin::Phi},
    {"sign", Builtin::Sign},
    {"bump", Builtin::Bump},
}};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
  return v;
}

// Polynomial coefficients (ascending powers) of N_k where the k-th
// derivative of exp(-1/s), s = 1 - u^2, equals exp(-1/s) * N_k(u) / s^(2k).
// Recurrence: N_{k+1} = -2u N_k + s^2 N_k' + 4k u s N_k.
const std::vector<double>& bump_numerator(int order) {
  static std::vector<std::vector<double>> cache{{1.0}};
  static const std::vector<double> s{1.0, 0.0, -1.0};
  static const std::vector<double> s2{1.0, 0.0, -2.0, 0.0, 1.0};
  auto mul = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  auto add_into = [](std::vector<double>& acc, const std::vector<double>& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += p[i];
  };
  while (static_cast<int>(cache.size()) <= order) {
    const int k = static_cast<int>(cache.size()) - 1;
    const std::vector<double> nk = cache.back();
    std::vector<double> dnk(nk.size() > 1 ? nk.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < nk.size(); ++i) dnk[i - 1] = static_cast<double>(i) * nk[i];
    std::vector<double> next;
    add_into(next, mul({0.0, -2.0}, nk));
    add_into(next, mul(s2, dnk));
    add_into(next, mul(mul({0.0, 4.0 * k}, s), nk));
    cache.push_back(std::move(next));
  }
  return cache[static_cast<std::size_t>(order)];
}

}  // namespace

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double bump_derivative(double u, int order) {
  if (!(u > -1.0 && u < 1.0)) return 0.0;
  const double s = 1.0 - u * u;
  const double b = std::exp(-1.0 / s);
  if (b == 0.0) return 0.0;
  if (order == 0) return b;
  const auto& poly = bump_numerator(order);
  double p = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * u + *it;
  return b * p / std::pow(s, 2 * order);
}

std::string_view builtin_name(Builtin fn) {
  for (const auto& [name, b] : kBuiltins)
    if (b == fn) return name;
  return "?";
}

// ---------------------------------------------------------------------------
// Construction

Expr::Expr() = default;

Expr Expr::make(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

Expr Expr::number(double value) {
  Node n;
  n.op = Op::Number;
  n.value = value;
  return make(std::move(n));
}

Expr Expr::var() {
  Node n;
  n.op = Op::Var;
  return make(std::move(n));
}

Expr Expr::param(std::string name, double value) {
  Node n;
  n.op = Op::Param;
  n.name = std::move(name);
  n.value = value;
  return make(std::move(n));
}

Expr Expr::call(Builtin fn, Expr arg, int order) {
  Node n;
  n.op = Op::Call;
  n.fn = fn;
  n.order = fn == Builtin::Bump ? order : 0;
  n.lhs = std::move(arg);
  return make(std::move(n));
}

namespace {
Expr::Node binary_node(Op op, const Expr& a, const Expr& b) {
  Expr::Node n;
  n.op = op;
  n.lhs = a;
  n.rhs = b;
  return n;
}
}  // namespace

Expr operator-(const Expr& a) {
  Expr::Node n;
  n.op = Op::Neg;
  n.lhs = a;
  return Expr::make(std::move(n));
}
Expr operator+(const Expr& a, const Expr& b) { return Expr::make(binary_node(Op::Add, a, b)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(binary_node(Op::Sub, a, b)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(binary_node(Op::Mul, a, b)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(binary_node(Op::Div, a, b)); }
Expr Expr::pow(const Expr& base, const Expr& exponent) {
  return make(binary_node(Op::Pow, base, exponent));
}

// Folding builders. Only literal numbers are folded; parameters stay named.

Expr Expr::neg(const Expr& a) {
  if (a.is_number()) return number(-a.value());
  if (a.op() == Op::Neg) return a.lhs();
  return -a;
}

Expr Expr::add(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return number(a.value() + b.value());
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  if (b.is_number() && b.value() < 0.0) return a - number(-b.value());
  if (b.op() == Op::Neg) return a - b.lhs();
  return a + b;
}

Expr Expr::sub(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return number(a.value() - b.value());
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return neg(b);
  if (b.is_number() && b.value() < 0.0) return a + number(-b.value());
  if (b.op() == Op::Neg) return a + b.lhs();
  return a - b;
}

Expr Expr::mul(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return number(a.value() * b.value());
  if (a.is_number(0.0) || b.is_number(0.0)) return number(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.is_number(-1.0)) return neg(b);
  if (b.is_number(-1.0)) return neg(a);
  if (b.is_number() && !a.is_number()) return mul(b, a);
  if (a.is_number() && b.op() == Op::Mul && b.lhs().is_number())
    return mul(number(a.value() * b.lhs().value()), b.rhs());
  if (a.op() == Op::Neg) return neg(mul(a.lhs(), b));
  if (b.op() == Op::Neg) return neg(mul(a, b.lhs()));
  if (a.is_number() && a.value() < 0.0) return neg(mul(number(-a.value()), b));
  return a * b;
}

Expr Expr::div(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number() && b.value() != 0.0) return number(a.value() / b.value());
  if (a.is_number(0.0)) return number(0.0);
  if (b.is_number(1.0)) return a;
  if (a.op() == Op::Neg) return neg(div(a.lhs(), b));
  return a / b;
}

Expr Expr::power(const Expr& base, const Expr& exponent) {
  if (exponent.is_number(0.0)) return number(1.0);
  if (exponent.is_number(1.0)) return base;
  if (base.is_number() && exponent.is_number()) {
    const double v = std::pow(base.value(), exponent.value());
    if (std::isfinite(v)) return number(v);
  }
  return pow(base, exponent);
}

// ---------------------------------------------------------------------------
// Accessors

namespace {
const Expr::Node& node_of(const std::shared_ptr<const Expr::Node>& p) { return p ? *p : zero_node(); }
}  // namespace

Op Expr::op() const { return node_of(node_).op; }
double Expr::value() const { return node_of(node_).value; }
const std::string& Expr::name() const { return node_of(node_).name; }
Builtin Expr::builtin() const { return node_of(node_).fn; }
int Expr::order() const { return node_of(node_).order; }
const Expr& Expr::lhs() const { return node_of(node_).lhs; }
const Expr& Expr::rhs() const { return node_of(node_).rhs; }

bool Expr::is_number() const { return op() == Op::Number; }
bool Expr::is_number(double v) const { return op() == Op::Number && value() == v; }

bool Expr::depends_on_x() const {
  switch (op()) {
    case Op::Number:
    case Op::Param:
      return false;
    case Op::Var:
      return true;
    case Op::Neg:
    case Op::Call:
      return lhs().depends_on_x();
    default:
      return lhs().depends_on_x() || rhs().depends_on_x();
  }
}

std::vector<Expr> Expr::kink_arguments() const {
  std::vector<Expr> out;
  auto walk = [&out](const Expr& e, auto&& self) -> void {
    switch (e.op()) {
      case Op::Number:
      case Op::Param:
      case Op::Var:
        return;
      case Op::Call:
        if ((e.builtin() == Builtin::Abs || e.builtin() == Builtin::Sign) && e.lhs().depends_on_x())
          out.push_back(e.lhs());
        self(e.lhs(), self);
        return;
      case Op::Neg:
        self(e.lhs(), self);
        return;
      default:
        self(e.lhs(), self);
        self(e.rhs(), self);
    }
  };
  walk(*this, walk);
  return out;
}

bool Expr::same_as(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (op() != other.op()) return false;
  switch (op()) {
    case Op::Number:
      return value() == other.value();
    case Op::Var:
      return true;
    case Op::Param:
      return name() == other.name() && value() == other.value();
    case Op::Neg:
      return lhs().same_as(other.lhs());
    case Op::Call:
      return builtin() == other.builtin() && order() == other.order() &&
             lhs().same_as(other.lhs());
    default:
      return lhs().same_as(other.lhs()) && rhs().same_as(other.rhs());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

double Expr::eval(double x) const {
  const Node& n = node_of(node_);
  switch (n.op) {
    case Op::Number:
    case Op::Param:
      return n.value;
    case Op::Var:
      return x;
    case Op::Neg:
      return -n.lhs.eval(x);
    case Op::Add:
      return checked(n.lhs.eval(x) + n.rhs.eval(x), "+");
    case Op::Sub:
      return checked(n.lhs.eval(x) - n.rhs.eval(x), "-");
    case Op::Mul:
      return checked(n.lhs.eval(x) * n.rhs.eval(x), "*");
    case Op::Div: {
      const double den = n.rhs.eval(x);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(n.lhs.eval(x) / den, "/");
    }
    case Op::Pow: {
      const double b = n.lhs.eval(x);
      const double e = n.rhs.eval(x);
      if (b == 0.0 && e < 0.0) throw EvalError("division by zero in ^");
      if (b < 0.0 && e != std::trunc(e)) throw EvalError("negative base with non-integer exponent");
      return checked(std::pow(b, e), "^");
    }
    case Op::Call: {
      const double u = n.lhs.eval(x);
      switch (n.fn) {
        case Builtin::Exp:
          return checked(std::exp(u), "exp");
        case Builtin::Log:
          if (u <= 0.0) throw EvalError("log of non-positive argument");
          return std::log(u);
        case Builtin::Sqrt:
          if (u < 0.0) throw EvalError("sqrt of negative argument");
          return std::sqrt(u);
        case Builtin::Abs:
          return std::fabs(u);
        case Builtin::Phi:
          return normal_pdf(u);
        case Builtin::Sign:
          return static_cast<double>((u > 0.0) - (u < 0.0));
        case Builtin::Bump:
          return checked(bump_derivative(u, n.order), "bump");
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr Expr::derivative() const {
  const Node& n = node_of(node_);
  switch (n.op) {
    case Op::Number:
    case Op::Param:
      return number(0.0);
    case Op::Var:
      return number(1.0);
    case Op::Neg:
      return neg(n.lhs.derivative());
    case Op::Add:
      return add(n.lhs.derivative(), n.rhs.derivative());
    case Op::Sub:
      return sub(n.lhs.derivative(), n.rhs.derivative());
    case Op::Mul:
      return add(mul(n.lhs.derivative(), n.rhs), mul(n.lhs, n.rhs.derivative()));
    case Op::Div: {
      const Expr num = sub(mul(n.lhs.derivative(), n.rhs), mul(n.lhs, n.rhs.derivative()));
      return div(num, power(n.rhs, number(2.0)));
    }
    case Op::Pow: {
      const Expr& u = n.lhs;
      const Expr& v = n.rhs;
      if (!v.depends_on_x()) {
        // v * u^(v-1) * u'
        return mul(mul(v, power(u, sub(v, number(1.0)))), u.derivative());
      }
      if (!u.depends_on_x()) {
        return mul(mul(*this, call(Builtin::Log, u)), v.derivative());
      }
      const Expr inner = add(mul(v.derivative(), call(Builtin::Log, u)),
                             div(mul(v, u.derivative()), u));
      return mul(*this, inner);
    }
    case Op::Call: {
      const Expr& u = n.lhs;
      const Expr du = u.derivative();
      Expr outer;
      switch (n.fn) {
        case Builtin::Exp:
          outer = *this;
          break;
        case Builtin::Log:
          return div(du, u);
        case Builtin::Sqrt:
          return div(du, mul(number(2.0), *this));
        case Builtin::Abs:
          outer = call(Builtin::Sign, u);
          break;
        case Builtin::Phi:
          outer = neg(mul(u, *this));
          break;
        case Builtin::Sign:
          return number(0.0);
        case Builtin::Bump:
          outer = call(Builtin::Bump, u, n.order + 1);
          break;
      }
      return mul(outer, du);
    }
  }
  return number(0.0);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength per grammar level: expr 1, term 2, factor 3, unary 4, atom 5.
int level(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Pow:
      return 3;
    case Op::Neg:
      return 4;
    case Op::Number:
      return e.value() < 0.0 ? 0 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

void print(const Expr& e, std::string& out);

void print_at(const Expr& e, int min_level, std::string& out) {
  if (level(e) < min_level) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Number:
      out += format_number(e.value());
      return;
    case Op::Var:
      out += 'x';
      return;
    case Op::Param:
      out += e.name();
      return;
    case Op::Neg:
      out += '-';
      print_at(e.lhs(), 4, out);
      return;
    case Op::Add:
    case Op::Sub:
      print_at(e.lhs(), 1, out);
      out += e.op() == Op::Add ? " + " : " - ";
      print_at(e.rhs(), 2, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_at(e.lhs(), 2, out);
      out += e.op() == Op::Mul ? "*" : "/";
      print_at(e.rhs(), 3, out);
      return;
    case Op::Pow:
      print_at(e.lhs(), 4, out);
      out += '^';
      print_at(e.rhs(), 3, out);
      return;
    case Op::Call:
      out += builtin_name(e.builtin());
      if (e.builtin() == Builtin::Bump && e.order() > 0) out += std::to_string(e.order());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParamMap& params) : text_(text), params_(params) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = lhs + term();
      else if (accept('-'))
        lhs = lhs - term();
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = lhs * factor();
      else if (accept('/'))
        lhs = lhs / factor();
      else
        return lhs;
    }
  }

  Expr factor() {
    Expr base = unary();
    if (accept('^')) return Expr::pow(base, factor());
    return base;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return atom();
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return Expr::number(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);
    skip_ws();
    const bool is_call = pos_ < text_.size() && text_[pos_] == '(';
    if (is_call) {
      const auto [fn, order] = lookup_builtin(id, start);
      expect('(');
      Expr arg = expr();
      expect(')');
      return Expr::call(fn, std::move(arg), order);
    }
    if (id == "x") return Expr::var();
    if (auto it = params_.find(id); it != params_.end()) return Expr::param(std::string(id), it->second);
    throw ParseError("unbound parameter '" + std::string(id) + "'", start);
  }

  static std::pair<Builtin, int> lookup_builtin(std::string_view id, std::size_t at) {
    for (const auto& [name, fn] : kBuiltins)
      if (id == name) return {fn, 0};
    if (id.starts_with("bump") && id.size() > 4) {
      int order = 0;
      auto [ptr, ec] = std::from_chars(id.data() + 4, id.data() + id.size(), order);
      if (ec == std::errc() && ptr == id.data() + id.size() && order > 0) return {Builtin::Bump, order};
    }
    throw ParseError("unknown function '" + std::string(id) + "'", at);
  }

  std::string_view text_;
  const ParamMap& params_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const ParamMap& params) { return Parser(text, params).parse(); }

}  // namespace salvage
