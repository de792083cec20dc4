#include "xlag/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace xlag {
namespace detail {

enum class NodeKind { constant, var_x, var_u, var_z, unary, binary, call2 };
enum class UnaryOp { negate, exp, abs, sin, cos, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Call2Op { min, max };

struct ExprNode {
  NodeKind kind;
  double value = 0.0;      // constant
  int index = 0;           // var_x / var_z, 1-based
  UnaryOp uop{};
  BinaryOp bop{};
  Call2Op cop{};
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::constant;
  n->value = v;
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::unary;
  n->uop = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr e = term();
    for (;;) {
      if (consume('+')) {
        e = make_binary(BinaryOp::add, e, term());
      } else if (consume('-')) {
        e = make_binary(BinaryOp::sub, e, term());
      } else {
        return e;
      }
    }
  }

  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (consume('*')) {
        e = make_binary(BinaryOp::mul, e, unary());
      } else if (consume('/')) {
        e = make_binary(BinaryOp::div, e, unary());
      } else {
        return e;
      }
    }
  }

  NodePtr unary() {
    if (consume('-')) return make_unary(UnaryOp::negate, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (consume('^')) return make_binary(BinaryOp::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = expression();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    skip_ws();
    const size_t start = pos_;
    size_t end = pos_;
    double v = 0.0;
    try {
      v = std::stod(std::string(src_.substr(pos_)), &end);
    } catch (const std::exception&) {
      throw ParseError("malformed number", start);
    }
    pos_ += end;
    return make_const(v);
  }

  NodePtr identifier() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "u") {
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::var_u;
      return n;
    }
    if (name == "pi") return make_const(std::numbers::pi);
    if ((name[0] == 'x' || name[0] == 'z') && name.size() > 1) {
      bool digits = true;
      for (size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      }
      if (digits) {
        const int idx = std::stoi(name.substr(1));
        if (idx < 1) throw ParseError("variable index must be >= 1", start);
        auto n = std::make_shared<ExprNode>();
        n->kind = name[0] == 'x' ? NodeKind::var_x : NodeKind::var_z;
        n->index = idx;
        return n;
      }
    }
    static const std::pair<const char*, UnaryOp> unary_fns[] = {
        {"exp", UnaryOp::exp}, {"abs", UnaryOp::abs},   {"sin", UnaryOp::sin},
        {"cos", UnaryOp::cos}, {"sqrt", UnaryOp::sqrt},
    };
    for (const auto& [fname, op] : unary_fns) {
      if (name == fname) {
        if (!consume('(')) throw ParseError("expected '(' after function name", pos_);
        NodePtr a = expression();
        if (!consume(')')) throw ParseError("expected ')'", pos_);
        return make_unary(op, std::move(a));
      }
    }
    if (name == "min" || name == "max") {
      if (!consume('(')) throw ParseError("expected '(' after function name", pos_);
      NodePtr a = expression();
      if (!consume(',')) throw ParseError("expected ','", pos_);
      NodePtr b = expression();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::call2;
      n->cop = name == "min" ? Call2Op::min : Call2Op::max;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

double eval_node(const ExprNode& n, const EvalContext& ctx) {
  switch (n.kind) {
    case NodeKind::constant:
      return n.value;
    case NodeKind::var_x:
      if (n.index > static_cast<int>(ctx.x.size())) {
        throw std::out_of_range("expression references x" + std::to_string(n.index) +
                                " but only " + std::to_string(ctx.x.size()) + " coordinates given");
      }
      return ctx.x[n.index - 1];
    case NodeKind::var_u:
      return ctx.u;
    case NodeKind::var_z:
      if (n.index > static_cast<int>(ctx.z.size())) {
        throw std::out_of_range("expression references z" + std::to_string(n.index) +
                                " but gradient slot has " + std::to_string(ctx.z.size()) +
                                " components");
      }
      return ctx.z[n.index - 1];
    case NodeKind::unary: {
      const double a = eval_node(*n.a, ctx);
      switch (n.uop) {
        case UnaryOp::negate: return -a;
        case UnaryOp::exp: return std::exp(a);
        case UnaryOp::abs: return std::abs(a);
        case UnaryOp::sin: return std::sin(a);
        case UnaryOp::cos: return std::cos(a);
        case UnaryOp::sqrt: return std::sqrt(a);
      }
      break;
    }
    case NodeKind::binary: {
      const double a = eval_node(*n.a, ctx);
      const double b = eval_node(*n.b, ctx);
      switch (n.bop) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: return a * b;
        case BinaryOp::div: return a / b;
        case BinaryOp::pow: return std::pow(a, b);
      }
      break;
    }
    case NodeKind::call2: {
      const double a = eval_node(*n.a, ctx);
      const double b = eval_node(*n.b, ctx);
      return n.cop == Call2Op::min ? std::min(a, b) : std::max(a, b);
    }
  }
  throw std::logic_error("expr: unreachable");
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::constant: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::var_x:
      out += "x" + std::to_string(n.index);
      return;
    case NodeKind::var_u:
      out += "u";
      return;
    case NodeKind::var_z:
      out += "z" + std::to_string(n.index);
      return;
    case NodeKind::unary: {
      const char* fn = nullptr;
      switch (n.uop) {
        case UnaryOp::negate: fn = nullptr; break;
        case UnaryOp::exp: fn = "exp"; break;
        case UnaryOp::abs: fn = "abs"; break;
        case UnaryOp::sin: fn = "sin"; break;
        case UnaryOp::cos: fn = "cos"; break;
        case UnaryOp::sqrt: fn = "sqrt"; break;
      }
      if (fn == nullptr) {
        out += "(-";
        print_node(*n.a, out);
        out += ")";
      } else {
        out += fn;
        out += "(";
        print_node(*n.a, out);
        out += ")";
      }
      return;
    }
    case NodeKind::binary: {
      const char* op = nullptr;
      switch (n.bop) {
        case BinaryOp::add: op = "+"; break;
        case BinaryOp::sub: op = "-"; break;
        case BinaryOp::mul: op = "*"; break;
        case BinaryOp::div: op = "/"; break;
        case BinaryOp::pow: op = "^"; break;
      }
      out += "(";
      print_node(*n.a, out);
      out += op;
      print_node(*n.b, out);
      out += ")";
      return;
    }
    case NodeKind::call2:
      out += n.cop == Call2Op::min ? "min(" : "max(";
      print_node(*n.a, out);
      out += ",";
      print_node(*n.b, out);
      out += ")";
      return;
  }
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::constant: return a.value == b.value;
    case NodeKind::var_x:
    case NodeKind::var_z: return a.index == b.index;
    case NodeKind::var_u: return true;
    case NodeKind::unary: return a.uop == b.uop && nodes_equal(*a.a, *b.a);
    case NodeKind::binary:
      return a.bop == b.bop && nodes_equal(*a.a, *b.a) && nodes_equal(*a.b, *b.b);
    case NodeKind::call2:
      return a.cop == b.cop && nodes_equal(*a.a, *b.a) && nodes_equal(*a.b, *b.b);
  }
  return false;
}

void scan(const ExprNode& n, bool& uses_u, int& max_x, int& max_z) {
  switch (n.kind) {
    case NodeKind::var_u: uses_u = true; break;
    case NodeKind::var_x: max_x = std::max(max_x, n.index); break;
    case NodeKind::var_z: max_z = std::max(max_z, n.index); break;
    default: break;
  }
  if (n.a) scan(*n.a, uses_u, max_x, max_z);
  if (n.b) scan(*n.b, uses_u, max_x, max_z);
}

}  // namespace
}  // namespace detail

Expr Expr::parse(std::string_view source) {
  if (source.empty()) throw ParseError("empty expression", 0);
  Expr e;
  e.root_ = detail::Parser(source).parse();
  detail::scan(*e.root_, e.uses_u_, e.max_x_index_, e.max_z_index_);
  return e;
}

Expr Expr::constant(double value) {
  Expr e;
  e.root_ = detail::make_const(value);
  return e;
}

double Expr::eval(const EvalContext& ctx) const { return detail::eval_node(*root_, ctx); }

std::string Expr::print() const {
  std::string out;
  detail::print_node(*root_, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const {
  return detail::nodes_equal(*root_, *other.root_);
}

}  // namespace xlag
