#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "xlag/expr.hpp"
#include "xlag/fields.hpp"

namespace xlag {

enum class LagKind { euclidean, anisotropic };

/// Integrand f(x, u, z). Euclidean Lagrangians take the full gradient
/// (z in R^n); anisotropic ones take the X-gradient (z in R^m). Bodies come
/// from the expression DSL, the parametric catalog, or a transform.
class Lagrangian {
 public:
  using Body = std::function<double(std::span<const double>, double, std::span<const double>)>;

  static Lagrangian from_expr(Expr body, LagKind kind, std::optional<int> zdim = std::nullopt);
  static Lagrangian parse(std::string_view source, LagKind kind,
                          std::optional<int> zdim = std::nullopt);
  static Lagrangian zero(LagKind kind, int zdim);
  /// Catalog entries. "p_dirichlet" (params: p) is the euclidean integrand
  /// |C(x) xi|^p and needs the field; "p_dirichlet_u" adds b|u|^p; "zero".
  static Lagrangian from_catalog(const std::string& name, const nlohmann::json& params,
                                 const CoefficientField* field);
  static Lagrangian from_json(const nlohmann::json& j, const CoefficientField* field = nullptr);
  static Lagrangian from_body(Body body, LagKind kind, bool with_u, int zdim,
                              std::string description);

  double eval(std::span<const double> x, double u, std::span<const double> z) const;

  LagKind kind() const { return kind_; }
  bool with_u() const { return with_u_; }
  int zdim() const { return zdim_; }
  /// Present when the body is a DSL expression.
  const std::optional<Expr>& expr() const { return expr_; }
  nlohmann::json to_json() const;

 private:
  Lagrangian(Body body, LagKind kind, bool with_u, int zdim, std::string description);
  Body body_;
  LagKind kind_;
  bool with_u_;
  int zdim_;
  std::string description_;
  std::optional<Expr> expr_;
};

/// Constant-coefficient growth data: f <= a + b|u|^p + c|C xi|^p above,
/// d|C xi|^p <= f below.
struct GrowthCertificate {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double p = 2.0;
};

void to_json(nlohmann::json& j, const GrowthCertificate& c);
void from_json(const nlohmann::json& j, GrowthCertificate& c);

struct Witness {
  Vec x;
  double u = 0.0;
  Vec z;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CheckReport {
  std::string name;
  bool pass = true;
  double worst_residual = 0.0;
  Witness witness;
  double tol = 0.0;
  int samples = 0;
  uint64_t seed = 0;
  nlohmann::json to_json() const;
};

/// f(x, u, eta) = f_e(x, u, C_P(x) eta); the anisotropic representative of a
/// kernel-invariant euclidean integrand.
Lagrangian transform(const Lagrangian& f_e, const CoefficientField& field);

/// Samples whether f_e ignores the kernel component of its gradient slot:
/// f_e(x,u,xi) = f_e(x,u,Pi_x xi).
CheckReport check_kernel_invariance(const Lagrangian& f_e, const CoefficientField& field,
                                    int sample_count, double tol, uint64_t seed = 1);

/// Samples constancy of f off the range of C(x): f(x,u,eta) = f(x,u,C xi_eta)
/// with xi_eta the minimal-norm representative C_P(x) eta.
CheckReport check_costonker(const Lagrangian& f, const CoefficientField& field, int sample_count,
                            double tol, uint64_t seed = 1);

/// Samples the representation identity f_e(x,u,xi) = f(x,u,C(x) xi).
CheckReport check_representation(const Lagrangian& f_e, const Lagrangian& f,
                                 const CoefficientField& field, int sample_count, double tol,
                                 uint64_t seed = 1);

/// Samples the growth and coercivity inequalities for f on range-restricted
/// arguments eta = C(x) xi; with range_restricted = false, eta is sampled
/// freely (the bounds are then expected to fail for degenerate fields).
CheckReport check_growth_transfer(const Lagrangian& f, const CoefficientField& field,
                                  const GrowthCertificate& cert, int sample_count,
                                  uint64_t seed = 1, bool range_restricted = true);

enum class ConvexityMode { gradient_slot, joint };

/// Sampled midpoint convexity in the gradient slot or jointly in (u, z).
CheckReport check_convexity(const Lagrangian& f, const Box& x_domain, int sample_count,
                            double tol, uint64_t seed = 1,
                            ConvexityMode mode = ConvexityMode::gradient_slot);

}  // namespace xlag
