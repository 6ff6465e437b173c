#include "hspace/scalar_field.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <utility>

namespace hspace {

namespace {

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 6> kFunctions{{
    {"sin", Func::kSin},
    {"cos", Func::kCos},
    {"exp", Func::kExp},
    {"log", Func::kLog},
    {"sqrt", Func::kSqrt},
    {"tanh", Func::kTanh},
}};

std::string_view func_name(Func f) {
  for (const auto& entry : kFunctions)
    if (entry.func == f) return entry.name;
  return "?";
}

std::unique_ptr<Node> make_binary(Node::Kind kind, std::unique_ptr<Node> lhs, std::unique_ptr<Node> rhs) {
  auto n = std::make_unique<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// Recursive descent, lowest precedence first:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right-associative
//   primary := number | x1..x6 | func '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::unique_ptr<Node> parse_all() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    auto n = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return n;
  }

  std::uint8_t mask() const { return mask_; }

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
      if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::unique_ptr<Node> expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(Node::Kind::kAdd, std::move(lhs), term());
      else if (accept('-'))
        lhs = make_binary(Node::Kind::kSub, std::move(lhs), term());
      else
        return lhs;
    }
  }

  std::unique_ptr<Node> term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(Node::Kind::kMul, std::move(lhs), unary());
      else if (accept('/'))
        lhs = make_binary(Node::Kind::kDiv, std::move(lhs), unary());
      else
        return lhs;
    }
  }

  std::unique_ptr<Node> unary() {
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::kNeg;
      n->lhs = unary();
      return n;
    }
    return power();
  }

  std::unique_ptr<Node> power() {
    auto base = primary();
    if (accept('^')) return make_binary(Node::Kind::kPow, std::move(base), unary());
    return base;
  }

  std::unique_ptr<Node> primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::unique_ptr<Node> number() {
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
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::kConstant;
    n->constant = value;
    return n;
  }

  std::unique_ptr<Node> identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '6') {
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::kCoord;
      n->coord = name[1] - '0';
      mask_ |= static_cast<std::uint8_t>(1u << (n->coord - 1));
      return n;
    }
    for (const auto& entry : kFunctions) {
      if (entry.name != name) continue;
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != '(')
        throw ParseError("function '" + std::string(name) + "' must be called with one argument", pos_);
      ++pos_;
      std::vector<std::unique_ptr<Node>> args;
      skip_ws();
      if (!accept(')')) {
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        expect(')');
      }
      if (args.size() != 1)
        throw ParseError("arity mismatch: '" + std::string(name) + "' takes 1 argument, got " +
                             std::to_string(args.size()),
                         start);
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::kCall;
      n->func = entry.func;
      n->lhs = std::move(args.front());
      return n;
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint8_t mask_ = 0;
};

std::string format_constant(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScalarField::ScalarField() : root_(std::make_shared<Node>()), source_("0") {}

ScalarField parse(std::string_view source) {
  Parser parser(source);
  ScalarField f;
  f.root_ = parser.parse_all();
  f.source_ = std::string(source);
  f.mask_ = parser.mask();
  return f;
}

std::string render(const Node& n) {
  switch (n.kind) {
    case Node::Kind::kConstant:
      return format_constant(n.constant);
    case Node::Kind::kCoord:
      return "x" + std::to_string(n.coord);
    case Node::Kind::kNeg:
      return "(-" + render(*n.lhs) + ")";
    case Node::Kind::kCall:
      return std::string(func_name(n.func)) + "(" + render(*n.lhs) + ")";
    default:
      break;
  }
  const char* op = "?";
  switch (n.kind) {
    case Node::Kind::kAdd: op = " + "; break;
    case Node::Kind::kSub: op = " - "; break;
    case Node::Kind::kMul: op = " * "; break;
    case Node::Kind::kDiv: op = " / "; break;
    case Node::Kind::kPow: op = " ^ "; break;
    default: break;
  }
  return "(" + render(*n.lhs) + op + render(*n.rhs) + ")";
}

std::string render(const ScalarField& f) { return render(f.root()); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::kConstant:
      return a.constant == b.constant;
    case Node::Kind::kCoord:
      return a.coord == b.coord;
    case Node::Kind::kCall:
      if (a.func != b.func) return false;
      [[fallthrough]];
    case Node::Kind::kNeg:
      return structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

namespace detail {

bool is_integer_constant(const Node& n, long* out) {
  if (n.kind == Node::Kind::kNeg) {
    long inner = 0;
    if (!is_integer_constant(*n.lhs, &inner)) return false;
    *out = -inner;
    return true;
  }
  if (n.kind != Node::Kind::kConstant) return false;
  if (std::trunc(n.constant) != n.constant || std::fabs(n.constant) > 1e6) return false;
  *out = static_cast<long>(n.constant);
  return true;
}

}  // namespace detail

double eval(const ScalarField& f, const Point6& x) { return f.evaluate<double>(x); }

Dual6 eval_dual(const ScalarField& f, const Point6& x) { return f.evaluate<Dual6>(seed_dual(x)); }

Point6 fd_grad(const ScalarField& f, const Point6& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_grad: step must be positive");
  Point6 grad;
  for (int i = 0; i < 6; ++i) {
    Point6 fwd = x;
    Point6 bwd = x;
    fwd[i] += step;
    bwd[i] -= step;
    grad[i] = (eval(f, fwd) - eval(f, bwd)) / (2.0 * step);
  }
  return grad;
}

}  // namespace hspace
