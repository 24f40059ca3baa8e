#include "actionforge/expr.hpp"

#include <cctype>
#include <cmath>
#include <utility>

namespace actionforge::expr {

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

constexpr int kMaxDepth = 256;

// --------------------------------------------------------------------------
// Lexer
// --------------------------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  int pos;
  double number = 0;
  std::string ident;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const int start = static_cast<int>(pos_);
    if (pos_ >= src_.size()) return {Tok::End, start};
    const char c = src_[pos_];
    switch (c) {
      case '+': ++pos_; return {Tok::Plus, start};
      case '-': ++pos_; return {Tok::Minus, start};
      case '*': ++pos_; return {Tok::Star, start};
      case '/': ++pos_; return {Tok::Slash, start};
      case '^': ++pos_; return {Tok::Caret, start};
      case '(': ++pos_; return {Tok::LParen, start};
      case ')': ++pos_; return {Tok::RParen, start};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(start);
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  Token lex_number(int start) {
    std::size_t p = pos_;
    while (p < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[p])) || src_[p] == '.')) ++p;
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
        p = q;
        while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
      }
    }
    const std::string text(src_.substr(pos_, p - pos_));
    std::size_t consumed = 0;
    double v = 0;
    try {
      v = std::stod(text, &consumed);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + text + "'", start);
    }
    if (consumed != text.size()) throw ParseError("malformed number '" + text + "'", start);
    pos_ = p;
    Token t{Tok::Number, start};
    t.number = v;
    return t;
  }

  Token lex_ident(int start) {
    std::size_t p = pos_;
    while (p < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[p])) || src_[p] == '_')) {
      ++p;
    }
    Token t{Tok::Ident, start};
    t.ident = std::string(src_.substr(pos_, p - pos_));
    pos_ = p;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// --------------------------------------------------------------------------
// Parser: precedence climbing over  + -  |  * /  |  unary -  |  ^
// --------------------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view src, int dim) : lexer_(src), dim_(dim) { advance(); }

  NodePtr run() {
    NodePtr e = parse_sum(0);
    if (cur_.kind != Tok::End) throw ParseError("unexpected trailing input", cur_.pos);
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) throw ParseError(std::string("expected ") + what, cur_.pos);
    advance();
  }

  NodePtr parse_sum(int depth) {
    check_depth(depth);
    NodePtr lhs = parse_product(depth + 1);
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Kind op = (cur_.kind == Tok::Plus) ? Kind::Add : Kind::Sub;
      const int pos = cur_.pos;
      advance();
      NodePtr rhs = parse_product(depth + 1);
      Node n{op, pos};
      n.lhs = std::move(lhs);
      n.rhs = std::move(rhs);
      lhs = make(std::move(n));
    }
    return lhs;
  }

  NodePtr parse_product(int depth) {
    check_depth(depth);
    NodePtr lhs = parse_unary(depth + 1);
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Kind op = (cur_.kind == Tok::Star) ? Kind::Mul : Kind::Div;
      const int pos = cur_.pos;
      advance();
      NodePtr rhs = parse_unary(depth + 1);
      Node n{op, pos};
      n.lhs = std::move(lhs);
      n.rhs = std::move(rhs);
      lhs = make(std::move(n));
    }
    return lhs;
  }

  NodePtr parse_unary(int depth) {
    check_depth(depth);
    if (cur_.kind == Tok::Minus) {
      const int pos = cur_.pos;
      advance();
      NodePtr operand = parse_unary(depth + 1);
      Node n{Kind::Neg, pos};
      n.lhs = std::move(operand);
      return make(std::move(n));
    }
    return parse_power(depth + 1);
  }

  NodePtr parse_power(int depth) {
    check_depth(depth);
    NodePtr base = parse_atom(depth + 1);
    if (cur_.kind != Tok::Caret) return base;
    const int pos = cur_.pos;
    advance();
    const long e = parse_integer_exponent();
    if (cur_.kind == Tok::Caret) {
      throw ParseError("chained '^' needs parentheses; exponents are integer literals", cur_.pos);
    }
    Node n{Kind::Pow, pos};
    n.exponent = e;
    n.lhs = std::move(base);
    return make(std::move(n));
  }

  long parse_integer_exponent() {
    bool parens = false;
    if (cur_.kind == Tok::LParen) {
      parens = true;
      advance();
    }
    bool negative = false;
    if (cur_.kind == Tok::Minus) {
      negative = true;
      advance();
    }
    if (cur_.kind != Tok::Number) throw ParseError("expected integer exponent", cur_.pos);
    const double v = cur_.number;
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v) throw ParseError("exponent must be an integer literal", cur_.pos);
    advance();
    if (parens) expect(Tok::RParen, "')'");
    return negative ? -n : n;
  }

  NodePtr parse_atom(int depth) {
    check_depth(depth);
    switch (cur_.kind) {
      case Tok::Number: {
        Node n{Kind::Constant, cur_.pos};
        n.value = cur_.number;
        advance();
        return make(std::move(n));
      }
      case Tok::LParen: {
        advance();
        NodePtr e = parse_sum(depth + 1);
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        return parse_ident(depth);
      default:
        throw ParseError("expected a number, variable, function or '('", cur_.pos);
    }
  }

  NodePtr parse_ident(int depth) {
    const Token tok = cur_;
    advance();
    const std::string& id = tok.ident;
    if (id == "t") {
      Node n{Kind::VarT, tok.pos};
      return make(std::move(n));
    }
    if (id.size() >= 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1]))) {
      int idx = 0;
      for (std::size_t i = 1; i < id.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) {
          throw ParseError("unknown identifier '" + id + "'", tok.pos);
        }
        idx = idx * 10 + (id[i] - '0');
      }
      if (idx < 1 || idx > dim_) {
        throw ParseError("coordinate " + id + " out of range (dimension is " +
                             std::to_string(dim_) + ")",
                         tok.pos);
      }
      Node n{Kind::VarX, tok.pos};
      n.index = idx;
      return make(std::move(n));
    }
    Func f;
    if (id == "sin") f = Func::Sin;
    else if (id == "cos") f = Func::Cos;
    else if (id == "exp") f = Func::Exp;
    else if (id == "log") f = Func::Log;
    else if (id == "abs_sq") f = Func::AbsSq;
    else throw ParseError("unknown identifier '" + id + "'", tok.pos);

    expect(Tok::LParen, "'(' after function name");
    NodePtr arg = parse_sum(depth + 1);
    expect(Tok::RParen, "')'");
    Node n{Kind::Call, tok.pos};
    n.func = f;
    n.lhs = std::move(arg);
    return make(std::move(n));
  }

  void check_depth(int depth) const {
    if (depth > kMaxDepth) throw ParseError("expression nested too deeply", cur_.pos);
  }

  Lexer lexer_;
  int dim_;
  Token cur_{Tok::End, 0};
};

double int_pow(double base, long e, int pos) {
  if (e < 0) {
    if (base == 0.0) throw EvalError("zero base raised to a negative power", pos);
    return 1.0 / int_pow(base, -e, pos);
  }
  double result = 1.0;
  double b = base;
  for (long n = e; n > 0; n >>= 1) {
    if (n & 1) result *= b;
    b *= b;
  }
  return result;
}

}  // namespace

NodePtr parse(std::string_view source, int dim) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  return Parser(source, dim).run();
}

double eval(const NodePtr& ast, double t, const Vec& x) {
  const Node& n = *ast;
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::VarT: return t;
    case Kind::VarX:
      if (n.index > x.size()) throw EvalError("coordinate out of range for evaluation point", n.pos);
      return x[n.index - 1];
    case Kind::Add: return eval(n.lhs, t, x) + eval(n.rhs, t, x);
    case Kind::Sub: return eval(n.lhs, t, x) - eval(n.rhs, t, x);
    case Kind::Mul: return eval(n.lhs, t, x) * eval(n.rhs, t, x);
    case Kind::Div: {
      const double denom = eval(n.rhs, t, x);
      if (denom == 0.0) throw EvalError("division by zero", n.pos);
      return eval(n.lhs, t, x) / denom;
    }
    case Kind::Pow: return int_pow(eval(n.lhs, t, x), n.exponent, n.pos);
    case Kind::Neg: return -eval(n.lhs, t, x);
    case Kind::Call: {
      const double a = eval(n.lhs, t, x);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Log:
          if (!(a > 0.0)) throw EvalError("log of non-positive value", n.pos);
          return std::log(a);
        case Func::AbsSq: return a * a;
      }
      break;
    }
  }
  throw EvalError("corrupt expression node", n.pos);
}

NodePtr constant(double v) {
  Node n{Kind::Constant, 0};
  n.value = v;
  return make(std::move(n));
}

NodePtr var_t() { return make(Node{Kind::VarT, 0}); }

NodePtr var_x(int index) {
  Node n{Kind::VarX, 0};
  n.index = index;
  return make(std::move(n));
}

NodePtr binary(Kind kind, NodePtr lhs, NodePtr rhs) {
  Node n{kind, lhs ? lhs->pos : 0};
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return make(std::move(n));
}

NodePtr power(NodePtr base, long exponent) {
  Node n{Kind::Pow, base ? base->pos : 0};
  n.exponent = exponent;
  n.lhs = std::move(base);
  return make(std::move(n));
}

NodePtr negate(NodePtr operand) {
  Node n{Kind::Neg, operand ? operand->pos : 0};
  n.lhs = std::move(operand);
  return make(std::move(n));
}

NodePtr call(Func f, NodePtr operand) {
  Node n{Kind::Call, operand ? operand->pos : 0};
  n.func = f;
  n.lhs = std::move(operand);
  return make(std::move(n));
}

NodePtr differentiate(const NodePtr& ast, int coordinate) {
  if (coordinate < 1) throw std::invalid_argument("coordinate must be >= 1");
  const Node& n = *ast;
  switch (n.kind) {
    case Kind::Constant:
    case Kind::VarT:
      return constant(0.0);
    case Kind::VarX:
      return constant(n.index == coordinate ? 1.0 : 0.0);
    case Kind::Add:
      return binary(Kind::Add, differentiate(n.lhs, coordinate), differentiate(n.rhs, coordinate));
    case Kind::Sub:
      return binary(Kind::Sub, differentiate(n.lhs, coordinate), differentiate(n.rhs, coordinate));
    case Kind::Mul:
      return binary(Kind::Add,
                    binary(Kind::Mul, differentiate(n.lhs, coordinate), n.rhs),
                    binary(Kind::Mul, n.lhs, differentiate(n.rhs, coordinate)));
    case Kind::Div:
      // (f/g)' = (f'g - fg') / g^2
      return binary(Kind::Div,
                    binary(Kind::Sub,
                           binary(Kind::Mul, differentiate(n.lhs, coordinate), n.rhs),
                           binary(Kind::Mul, n.lhs, differentiate(n.rhs, coordinate))),
                    power(n.rhs, 2));
    case Kind::Pow:
      if (n.exponent == 0) return constant(0.0);
      // (f^m)' = m f^(m-1) f'
      return binary(Kind::Mul,
                    binary(Kind::Mul, constant(static_cast<double>(n.exponent)),
                           power(n.lhs, n.exponent - 1)),
                    differentiate(n.lhs, coordinate));
    case Kind::Neg:
      return negate(differentiate(n.lhs, coordinate));
    case Kind::Call: {
      NodePtr inner = differentiate(n.lhs, coordinate);
      switch (n.func) {
        case Func::Sin:
          return binary(Kind::Mul, call(Func::Cos, n.lhs), std::move(inner));
        case Func::Cos:
          return binary(Kind::Mul, negate(call(Func::Sin, n.lhs)), std::move(inner));
        case Func::Exp:
          return binary(Kind::Mul, call(Func::Exp, n.lhs), std::move(inner));
        case Func::Log:
          return binary(Kind::Div, std::move(inner), n.lhs);
        case Func::AbsSq:
          return binary(Kind::Mul, binary(Kind::Mul, constant(2.0), n.lhs), std::move(inner));
      }
      break;
    }
  }
  throw std::logic_error("corrupt expression node");
}

namespace {

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

void print(const Node& n, std::string& out);

void print_child(const Node& parent, const Node& child, bool is_right, std::string& out) {
  const int pp = precedence(parent);
  const int cp = precedence(child);
  // Equal-precedence right children need parens (left associativity), and a
  // Pow base that is itself a Pow does too (chained ^ is not parseable).
  bool parens = cp < pp;
  if (cp == pp && is_right) parens = true;
  if (parent.kind == Kind::Pow && child.kind == Kind::Pow) parens = true;
  if (parens) out.push_back('(');
  print(child, out);
  if (parens) out.push_back(')');
}

std::string format_number(double v) {
  std::string s = std::to_string(v);
  // trim trailing zeros, keep at least one digit after '.'
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Constant: out += format_number(n.value); return;
    case Kind::VarT: out += "t"; return;
    case Kind::VarX: out += "x" + std::to_string(n.index); return;
    case Kind::Add:
      print_child(n, *n.lhs, false, out);
      out += " + ";
      print_child(n, *n.rhs, true, out);
      return;
    case Kind::Sub:
      print_child(n, *n.lhs, false, out);
      out += " - ";
      print_child(n, *n.rhs, true, out);
      return;
    case Kind::Mul:
      print_child(n, *n.lhs, false, out);
      out += "*";
      print_child(n, *n.rhs, true, out);
      return;
    case Kind::Div:
      print_child(n, *n.lhs, false, out);
      out += "/";
      print_child(n, *n.rhs, true, out);
      return;
    case Kind::Pow:
      print_child(n, *n.lhs, false, out);
      out += "^" + std::to_string(n.exponent);
      return;
    case Kind::Neg:
      out += "-";
      print_child(n, *n.lhs, true, out);
      return;
    case Kind::Call:
      switch (n.func) {
        case Func::Sin: out += "sin("; break;
        case Func::Cos: out += "cos("; break;
        case Func::Exp: out += "exp("; break;
        case Func::Log: out += "log("; break;
        case Func::AbsSq: out += "abs_sq("; break;
      }
      print(*n.lhs, out);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const NodePtr& ast) {
  std::string out;
  print(*ast, out);
  return out;
}

}  // namespace actionforge::expr
