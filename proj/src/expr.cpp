#include "gkdv/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "gkdv/errors.hpp"

namespace gkdv {

struct Expr::Node {
  NodeKind kind;
  double value = 0.0;            // constant nodes only
  std::vector<Expr> kids;
};

namespace {

std::shared_ptr<const Expr::Node> build(NodeKind kind, double value,
                                        std::vector<Expr> kids) {
  auto node = std::make_shared<Expr::Node>();
  node->kind = kind;
  node->value = value;
  node->kids = std::move(kids);
  return node;
}

const std::vector<Expr>& no_children() {
  static const std::vector<Expr> empty;
  return empty;
}

}  // namespace

NodeKind Expr::kind() const { return node_->kind; }

double Expr::constant_value() const { return node_->value; }

const std::vector<Expr>& Expr::children() const {
  return node_ ? node_->kids : no_children();
}

Expr Expr::constant(double value) {
  return Expr(build(NodeKind::constant, value, {}));
}

Expr Expr::variable() { return Expr(build(NodeKind::variable, 0.0, {})); }

Expr Expr::add(std::vector<Expr> terms) {
  return Expr(build(NodeKind::add, 0.0, std::move(terms)));
}

Expr Expr::mul(std::vector<Expr> factors) {
  return Expr(build(NodeKind::mul, 0.0, std::move(factors)));
}

Expr Expr::neg(Expr inner) {
  return Expr(build(NodeKind::neg, 0.0, {std::move(inner)}));
}

Expr Expr::div(Expr numerator, Expr denominator) {
  return Expr(build(NodeKind::div, 0.0, {std::move(numerator), std::move(denominator)}));
}

Expr Expr::pow(Expr base, Expr exponent) {
  return Expr(build(NodeKind::pow, 0.0, {std::move(base), std::move(exponent)}));
}

Expr Expr::call(NodeKind fn, Expr argument) {
  return Expr(build(fn, 0.0, {std::move(argument)}));
}

namespace {

// ---------------------------------------------------------------- parsing

struct Parser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool at(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (!at(c)) return false;
    ++pos;
    return true;
  }

  [[noreturn]] void syntax(const std::string& what, size_t where) {
    fail(Errc::syntax_error, what + " at byte " + std::to_string(where));
  }

  Expr parse_expr() {
    std::vector<Expr> terms;
    terms.push_back(parse_term());
    for (;;) {
      if (consume('+')) {
        terms.push_back(parse_term());
      } else if (consume('-')) {
        terms.push_back(Expr::neg(parse_term()));
      } else {
        break;
      }
    }
    if (terms.size() == 1) return terms[0];
    return Expr::add(std::move(terms));
  }

  Expr parse_term() {
    std::vector<Expr> factors;
    factors.push_back(parse_factor());
    for (;;) {
      if (consume('*')) {
        factors.push_back(parse_factor());
      } else if (consume('/')) {
        Expr lhs = factors.size() == 1 ? factors[0] : Expr::mul(std::move(factors));
        factors.clear();
        factors.push_back(Expr::div(std::move(lhs), parse_factor()));
      } else {
        break;
      }
    }
    if (factors.size() == 1) return factors[0];
    return Expr::mul(std::move(factors));
  }

  Expr parse_factor() {
    if (consume('-')) return Expr::neg(parse_factor());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (consume('^')) return Expr::pow(std::move(base), parse_factor());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) syntax("unexpected end of input", pos);
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr inner = parse_expr();
      if (!consume(')')) syntax("expected ')'", pos);
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    syntax(std::string("unexpected character '") + c + "'", pos);
  }

  Expr parse_number() {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos == start || (pos == start + 1 && text[start] == '.'))
      syntax("malformed number", start);
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      size_t mark = pos++;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      size_t digits = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == digits) syntax("malformed exponent", mark);
    }
    double value = 0.0;
    auto res = std::from_chars(text.data() + start, text.data() + pos, value);
    if (res.ec != std::errc()) syntax("malformed number", start);
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string_view name = text.substr(start, pos - start);
    if (name == "u") return Expr::variable();
    NodeKind fn;
    if (name == "exp") fn = NodeKind::exp_fn;
    else if (name == "log") fn = NodeKind::log_fn;
    else if (name == "sin") fn = NodeKind::sin_fn;
    else if (name == "cos") fn = NodeKind::cos_fn;
    else if (name == "abs") fn = NodeKind::abs_fn;
    else
      fail(Errc::unknown_identifier,
           "unknown identifier '" + std::string(name) + "' at byte " + std::to_string(start));
    if (!consume('(')) syntax("expected '(' after function name", pos);
    Expr arg = parse_expr();
    if (!consume(')')) syntax("expected ')'", pos);
    return Expr::call(fn, std::move(arg));
  }
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p{text};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.syntax("unexpected trailing input", p.pos);
  return e;
}

// ------------------------------------------------------------- evaluation

namespace {

bool is_integer_valued(double x) {
  return std::nearbyint(x) == x && std::abs(x) < 9.0e15;
}

[[noreturn]] void domain(const Expr& node, const std::string& why) {
  fail(Errc::domain_error, why + " in '" + to_string(node) + "'");
}

}  // namespace

double eval(const Expr& e, double u) {
  const auto& kids = e.children();
  switch (e.kind()) {
    case NodeKind::constant: return e.constant_value();
    case NodeKind::variable: return u;
    case NodeKind::add: {
      double s = 0.0;
      for (const auto& k : kids) s += eval(k, u);
      return s;
    }
    case NodeKind::mul: {
      double p = 1.0;
      for (const auto& k : kids) p *= eval(k, u);
      return p;
    }
    case NodeKind::neg: return -eval(kids[0], u);
    case NodeKind::div: {
      double den = eval(kids[1], u);
      if (den == 0.0) domain(e, "division by zero");
      return eval(kids[0], u) / den;
    }
    case NodeKind::pow: {
      double b = eval(kids[0], u);
      double x = eval(kids[1], u);
      if (b > 0.0) return std::pow(b, x);
      if (b == 0.0) {
        if (x > 0.0) return 0.0;
        if (x == 0.0) return 1.0;
        domain(e, "zero base with negative exponent");
      }
      if (is_integer_valued(x)) return std::pow(b, x);
      domain(e, "negative base with non-integer exponent");
    }
    case NodeKind::exp_fn: return std::exp(eval(kids[0], u));
    case NodeKind::log_fn: {
      double x = eval(kids[0], u);
      if (x <= 0.0) domain(e, "log of a non-positive value");
      return std::log(x);
    }
    case NodeKind::sin_fn: return std::sin(eval(kids[0], u));
    case NodeKind::cos_fn: return std::cos(eval(kids[0], u));
    case NodeKind::abs_fn: return std::abs(eval(kids[0], u));
  }
  fail(Errc::invalid_argument, "malformed expression node");
}

// ---------------------------------------------------------------- derivative

namespace {

Expr raw_diff(const Expr& e) {
  const auto& kids = e.children();
  switch (e.kind()) {
    case NodeKind::constant: return Expr::constant(0.0);
    case NodeKind::variable: return Expr::constant(1.0);
    case NodeKind::add: {
      std::vector<Expr> terms;
      terms.reserve(kids.size());
      for (const auto& k : kids) terms.push_back(raw_diff(k));
      return Expr::add(std::move(terms));
    }
    case NodeKind::mul: {
      // product rule, one term per factor
      std::vector<Expr> terms;
      for (size_t i = 0; i < kids.size(); ++i) {
        std::vector<Expr> fs;
        for (size_t j = 0; j < kids.size(); ++j)
          fs.push_back(i == j ? raw_diff(kids[j]) : kids[j]);
        terms.push_back(Expr::mul(std::move(fs)));
      }
      return Expr::add(std::move(terms));
    }
    case NodeKind::neg: return Expr::neg(raw_diff(kids[0]));
    case NodeKind::div: {
      const Expr& a = kids[0];
      const Expr& b = kids[1];
      Expr num = Expr::add({Expr::mul({raw_diff(a), b}),
                            Expr::neg(Expr::mul({a, raw_diff(b)}))});
      return Expr::div(std::move(num), Expr::pow(b, Expr::constant(2.0)));
    }
    case NodeKind::pow: {
      const Expr& b = kids[0];
      const Expr& x = kids[1];
      if (x.kind() == NodeKind::constant) {
        double n = x.constant_value();
        return Expr::mul({Expr::constant(n),
                          Expr::pow(b, Expr::constant(n - 1.0)),
                          raw_diff(b)});
      }
      // general power via b^x = exp(x log b)
      Expr inner = Expr::add({Expr::mul({raw_diff(x), Expr::call(NodeKind::log_fn, b)}),
                              Expr::div(Expr::mul({x, raw_diff(b)}), b)});
      return Expr::mul({e, std::move(inner)});
    }
    case NodeKind::exp_fn: return Expr::mul({e, raw_diff(kids[0])});
    case NodeKind::log_fn: return Expr::div(raw_diff(kids[0]), kids[0]);
    case NodeKind::sin_fn:
      return Expr::mul({Expr::call(NodeKind::cos_fn, kids[0]), raw_diff(kids[0])});
    case NodeKind::cos_fn:
      return Expr::neg(Expr::mul({Expr::call(NodeKind::sin_fn, kids[0]), raw_diff(kids[0])}));
    case NodeKind::abs_fn:
      // sign(g) * g', written g/|g| so that g = 0 raises domain_error
      return Expr::mul({Expr::div(kids[0], e), raw_diff(kids[0])});
  }
  fail(Errc::invalid_argument, "malformed expression node");
}

}  // namespace

Expr diff(const Expr& e) { return simplify(raw_diff(e)); }

Expr nth_derivative(const Expr& e, int n) {
  Expr d = simplify(e);
  for (int i = 0; i < n; ++i) d = diff(d);
  return d;
}

// ---------------------------------------------------------------- simplify

namespace {

bool is_const(const Expr& e, double v) {
  return e.kind() == NodeKind::constant && e.constant_value() == v;
}

// Fold a node whose children are all constants; bail out (return the node
// unchanged) when evaluation fails or produces a non-finite value.
Expr try_fold(const Expr& e) {
  for (const auto& k : e.children())
    if (k.kind() != NodeKind::constant) return e;
  try {
    double v = eval(e, 0.0);
    if (!std::isfinite(v)) return e;
    return Expr::constant(v);
  } catch (const Error&) {
    return e;
  }
}

Expr simplify_node(const Expr& e);

Expr simplify_rec(const Expr& e) {
  const auto& kids = e.children();
  if (kids.empty()) return e;
  std::vector<Expr> sk;
  sk.reserve(kids.size());
  bool changed = false;
  for (const auto& k : kids) {
    sk.push_back(simplify_rec(k));
    changed = changed || sk.back().id() != k.id();
  }
  Expr base = e;
  if (changed) {
    switch (e.kind()) {
      case NodeKind::add: base = Expr::add(std::move(sk)); break;
      case NodeKind::mul: base = Expr::mul(std::move(sk)); break;
      case NodeKind::neg: base = Expr::neg(sk[0]); break;
      case NodeKind::div: base = Expr::div(sk[0], sk[1]); break;
      case NodeKind::pow: base = Expr::pow(sk[0], sk[1]); break;
      default: base = Expr::call(e.kind(), sk[0]); break;
    }
  }
  return simplify_node(base);
}

Expr simplify_node(const Expr& e) {
  const auto& kids = e.children();
  switch (e.kind()) {
    case NodeKind::add: {
      std::vector<Expr> terms;
      double c = 0.0;
      for (const auto& k : kids) {
        if (k.kind() == NodeKind::add) {
          for (const auto& kk : k.children()) {
            if (kk.kind() == NodeKind::constant) c += kk.constant_value();
            else terms.push_back(kk);
          }
        } else if (k.kind() == NodeKind::constant) {
          c += k.constant_value();
        } else {
          terms.push_back(k);
        }
      }
      if (c != 0.0 || terms.empty()) terms.push_back(Expr::constant(c));
      if (terms.size() == 1) return terms[0];
      return Expr::add(std::move(terms));
    }
    case NodeKind::mul: {
      std::vector<Expr> factors;
      double c = 1.0;
      for (const auto& k : kids) {
        if (k.kind() == NodeKind::mul) {
          for (const auto& kk : k.children()) {
            if (kk.kind() == NodeKind::constant) c *= kk.constant_value();
            else factors.push_back(kk);
          }
        } else if (k.kind() == NodeKind::constant) {
          c *= k.constant_value();
        } else {
          factors.push_back(k);
        }
      }
      if (c == 0.0) return Expr::constant(0.0);
      if (factors.empty()) return Expr::constant(c);
      if (c != 1.0) factors.insert(factors.begin(), Expr::constant(c));
      if (factors.size() == 1) return factors[0];
      return Expr::mul(std::move(factors));
    }
    case NodeKind::neg: {
      if (kids[0].kind() == NodeKind::constant)
        return Expr::constant(-kids[0].constant_value());
      if (kids[0].kind() == NodeKind::neg) return kids[0].children()[0];
      return e;
    }
    case NodeKind::div: {
      if (is_const(kids[0], 0.0)) return Expr::constant(0.0);
      if (is_const(kids[1], 1.0)) return kids[0];
      return try_fold(e);
    }
    case NodeKind::pow: {
      if (is_const(kids[1], 1.0)) return kids[0];
      if (is_const(kids[1], 0.0)) return Expr::constant(1.0);
      return try_fold(e);
    }
    case NodeKind::exp_fn:
    case NodeKind::log_fn:
    case NodeKind::sin_fn:
    case NodeKind::cos_fn:
    case NodeKind::abs_fn:
      return try_fold(e);
    default:
      return e;
  }
}

}  // namespace

Expr simplify(const Expr& e) { return simplify_rec(e); }

// ---------------------------------------------------------------- printing

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::add: return 1;
    case NodeKind::neg: return 2;
    case NodeKind::mul:
    case NodeKind::div: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
  }
}

void print(const Expr& e, std::string& out, int parent_prec);

void print_wrapped(const Expr& e, std::string& out, int parent_prec) {
  bool parens = precedence(e) < parent_prec;
  if (parens) out += '(';
  print(e, out, 0);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out, int parent_prec) {
  const auto& kids = e.children();
  switch (e.kind()) {
    case NodeKind::constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.constant_value());
      out += buf;
      return;
    }
    case NodeKind::variable: out += 'u'; return;
    case NodeKind::add:
      for (size_t i = 0; i < kids.size(); ++i) {
        if (kids[i].kind() == NodeKind::neg) {
          out += i == 0 ? "-" : " - ";
          print_wrapped(kids[i].children()[0], out, 3);
        } else {
          if (i > 0) out += " + ";
          print_wrapped(kids[i], out, 2);
        }
      }
      return;
    case NodeKind::mul:
      for (size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out += '*';
        print_wrapped(kids[i], out, 3);
      }
      return;
    case NodeKind::neg:
      out += '-';
      print_wrapped(kids[0], out, 3);
      return;
    case NodeKind::div:
      print_wrapped(kids[0], out, 3);
      out += '/';
      print_wrapped(kids[1], out, 4);
      return;
    case NodeKind::pow:
      print_wrapped(kids[0], out, 5);
      out += '^';
      print_wrapped(kids[1], out, 5);
      return;
    case NodeKind::exp_fn: out += "exp("; break;
    case NodeKind::log_fn: out += "log("; break;
    case NodeKind::sin_fn: out += "sin("; break;
    case NodeKind::cos_fn: out += "cos("; break;
    case NodeKind::abs_fn: out += "abs("; break;
  }
  print(kids[0], out, 0);
  out += ')';
  (void)parent_prec;
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out, 0);
  return out;
}

}  // namespace gkdv
