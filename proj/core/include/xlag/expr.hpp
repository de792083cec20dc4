#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xlag {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  size_t position;
};

/// Arguments for one expression evaluation: spatial point, function value,
/// gradient slot. Unused slots may be empty.
struct EvalContext {
  std::span<const double> x;
  double u = 0.0;
  std::span<const double> z;
};

namespace detail {
struct ExprNode;
}

/// Immutable scalar expression over x1..xN, u, z1..zM with +,-,*,/,^,
/// exp, abs, sin, cos, sqrt, min, max and the constant pi.
class Expr {
 public:
  static Expr parse(std::string_view source);
  static Expr constant(double value);

  double eval(const EvalContext& ctx) const;
  std::string print() const;  // canonical, reparses to the same tree

  bool uses_u() const { return uses_u_; }
  int max_x_index() const { return max_x_index_; }  // 0 when no x reference
  int max_z_index() const { return max_z_index_; }

  bool structurally_equal(const Expr& other) const;

 private:
  Expr() = default;
  std::shared_ptr<const detail::ExprNode> root_;
  bool uses_u_ = false;
  int max_x_index_ = 0;
  int max_z_index_ = 0;
};

}  // namespace xlag
