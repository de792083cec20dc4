#include "xlag/lagrangian.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "xlag/linalg.hpp"

namespace xlag {

Lagrangian::Lagrangian(Body body, LagKind kind, bool with_u, int zdim, std::string description)
    : body_(std::move(body)), kind_(kind), with_u_(with_u), zdim_(zdim),
      description_(std::move(description)) {
  if (zdim_ < 1) throw std::invalid_argument("Lagrangian: gradient slot must have >= 1 component");
}

Lagrangian Lagrangian::from_expr(Expr body, LagKind kind, std::optional<int> zdim) {
  const int inferred = body.max_z_index();
  const int dim = zdim.value_or(inferred == 0 ? 1 : inferred);
  if (inferred > dim) {
    throw std::invalid_argument("Lagrangian: expression references z" + std::to_string(inferred) +
                                " beyond the declared gradient dimension " + std::to_string(dim));
  }
  const bool with_u = body.uses_u();
  auto eval = [body](std::span<const double> x, double u, std::span<const double> z) {
    return body.eval(EvalContext{x, u, z});
  };
  Lagrangian l(std::move(eval), kind, with_u, dim, body.print());
  l.expr_ = std::move(body);
  return l;
}

Lagrangian Lagrangian::from_body(Body body, LagKind kind, bool with_u, int zdim,
                                 std::string description) {
  return Lagrangian(std::move(body), kind, with_u, zdim, std::move(description));
}

Lagrangian Lagrangian::parse(std::string_view source, LagKind kind, std::optional<int> zdim) {
  return from_expr(Expr::parse(source), kind, zdim);
}

Lagrangian Lagrangian::zero(LagKind kind, int zdim) {
  return from_expr(Expr::constant(0.0), kind, zdim);
}

Lagrangian Lagrangian::from_catalog(const std::string& name, const nlohmann::json& params,
                                    const CoefficientField* field) {
  if (name == "zero") {
    const int zdim = params.value("zdim", field != nullptr ? field->n() : 1);
    return zero(LagKind::euclidean, zdim);
  }
  if (name == "p_dirichlet" || name == "p_dirichlet_u") {
    if (field == nullptr) {
      throw std::invalid_argument("catalog '" + name + "' needs a coefficient field");
    }
    const double p = params.value("p", 2.0);
    const double b = name == "p_dirichlet_u" ? params.value("b", 1.0) : 0.0;
    if (p < 1.0) throw std::invalid_argument("p_dirichlet: p must be >= 1");
    CoefficientField f = *field;
    auto eval = [f, p, b](std::span<const double> x, double u, std::span<const double> xi) {
      const Vec cxi = f.eval(x) * xi;
      double val = std::pow(norm2(cxi), p);
      if (b != 0.0) val += b * std::pow(std::abs(u), p);
      return val;
    };
    return Lagrangian(std::move(eval), LagKind::euclidean, b != 0.0, field->n(),
                      name + "(p=" + std::to_string(p) + ")");
  }
  throw std::invalid_argument("unknown catalog Lagrangian '" + name + "'");
}

Lagrangian Lagrangian::from_json(const nlohmann::json& j, const CoefficientField* field) {
  if (j.contains("catalog")) {
    return from_catalog(j.at("catalog").get<std::string>(),
                        j.value("params", nlohmann::json::object()), field);
  }
  const std::string kind_str = j.at("kind").get<std::string>();
  LagKind kind;
  if (kind_str == "euclidean") {
    kind = LagKind::euclidean;
  } else if (kind_str == "anisotropic") {
    kind = LagKind::anisotropic;
  } else {
    throw std::invalid_argument("Lagrangian: kind must be 'euclidean' or 'anisotropic'");
  }
  std::optional<int> zdim;
  if (j.contains("zdim")) zdim = j.at("zdim").get<int>();
  if (field != nullptr && !zdim) zdim = kind == LagKind::euclidean ? field->n() : field->m();
  Lagrangian l = parse(j.at("source").get<std::string>(), kind, zdim);
  if (j.contains("arity")) {
    const std::string arity = j.at("arity").get<std::string>();
    const bool declared_u = arity == "with-u";
    if (declared_u != l.with_u()) {
      throw std::invalid_argument("Lagrangian: declared arity disagrees with expression");
    }
  }
  return l;
}

double Lagrangian::eval(std::span<const double> x, double u, std::span<const double> z) const {
  if (static_cast<int>(z.size()) != zdim_) {
    throw std::invalid_argument("Lagrangian: gradient slot has wrong dimension");
  }
  return body_(x, u, z);
}

nlohmann::json Lagrangian::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_ == LagKind::euclidean ? "euclidean" : "anisotropic";
  j["arity"] = with_u_ ? "with-u" : "without-u";
  j["zdim"] = zdim_;
  if (expr_) {
    j["source"] = expr_->print();
  } else {
    j["description"] = description_;
  }
  return j;
}

void to_json(nlohmann::json& j, const GrowthCertificate& c) {
  j = nlohmann::json{{"a", c.a}, {"b", c.b}, {"c", c.c}, {"d", c.d}, {"p", c.p}};
}

void from_json(const nlohmann::json& j, GrowthCertificate& c) {
  c.a = j.value("a", 0.0);
  c.b = j.value("b", 0.0);
  c.c = j.value("c", 0.0);
  c.d = j.value("d", 0.0);
  c.p = j.value("p", 2.0);
  if (c.a < 0 || c.b < 0 || c.c < 0 || c.d < 0 || c.p < 1) {
    throw std::invalid_argument("GrowthCertificate: coefficients must be >= 0 and p >= 1");
  }
}

nlohmann::json CheckReport::to_json() const {
  return nlohmann::json{
      {"name", name},
      {"pass", pass},
      {"worst_residual", worst_residual},
      {"witness", {{"x", witness.x}, {"u", witness.u}, {"z", witness.z},
                   {"lhs", witness.lhs}, {"rhs", witness.rhs}}},
      {"tol", tol},
      {"samples", samples},
      {"seed", seed}};
}

Lagrangian transform(const Lagrangian& f_e, const CoefficientField& field) {
  if (f_e.kind() != LagKind::euclidean) {
    throw std::invalid_argument("transform: input must be a euclidean Lagrangian");
  }
  if (f_e.zdim() != field.n()) {
    throw std::invalid_argument("transform: Lagrangian gradient dimension != field dimension");
  }
  Lagrangian fe = f_e;
  CoefficientField f = field;
  auto eval = [fe, f](std::span<const double> x, double u, std::span<const double> eta) {
    const Mat c_pinv = pinv_svd(f.eval(x));
    const Vec xi = c_pinv * eta;
    return fe.eval(x, u, xi);
  };
  return Lagrangian::from_body(std::move(eval), LagKind::anisotropic, f_e.with_u(), field.m(),
                               "transform(" + field.name() + ")");
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  std::uniform_real_distribution<double> sym{-2.0, 2.0};

  explicit Sampler(uint64_t seed) : rng(seed) {}

  Vec point_in(const Box& box) {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]);
    return x;
  }

  Vec vector(int dim) {
    Vec v(dim);
    for (double& e : v) e = sym(rng);
    return v;
  }

  double scalar() { return sym(rng); }
};

void record(CheckReport& rep, double residual, const Vec& x, double u, const Vec& z, double lhs,
            double rhs) {
  if (residual > rep.worst_residual) {
    rep.worst_residual = residual;
    rep.witness = Witness{x, u, z, lhs, rhs};
  }
}

}  // namespace

CheckReport check_kernel_invariance(const Lagrangian& f_e, const CoefficientField& field,
                                    int sample_count, double tol, uint64_t seed) {
  if (f_e.kind() != LagKind::euclidean) {
    throw std::invalid_argument("check_kernel_invariance: euclidean Lagrangian required");
  }
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  CheckReport rep{.name = "kernel_invariance", .tol = tol, .samples = sample_count, .seed = seed};
  Sampler s(seed);
  for (int i = 0; i < sample_count; ++i) {
    const Vec x = s.point_in(field.domain());
    const double u = f_e.with_u() ? s.scalar() : 0.0;
    const Vec xi = s.vector(field.n());
    const PointAlgebra pa = point_algebra(field.eval(x));
    const Vec xi_v = pa.projector_v * xi;
    const double lhs = f_e.eval(x, u, xi);
    const double rhs = f_e.eval(x, u, xi_v);
    const double residual = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    record(rep, residual, x, u, xi, lhs, rhs);
  }
  rep.pass = rep.worst_residual <= tol;
  return rep;
}

CheckReport check_costonker(const Lagrangian& f, const CoefficientField& field, int sample_count,
                            double tol, uint64_t seed) {
  if (f.kind() != LagKind::anisotropic) {
    throw std::invalid_argument("check_costonker: anisotropic Lagrangian required");
  }
  CheckReport rep{.name = "kernel_constancy", .tol = tol, .samples = sample_count, .seed = seed};
  Sampler s(seed);
  for (int i = 0; i < sample_count; ++i) {
    const Vec x = s.point_in(field.domain());
    const double u = f.with_u() ? s.scalar() : 0.0;
    const Vec eta = s.vector(field.m());
    const Mat c = field.eval(x);
    const Vec xi_eta = pinv_svd(c) * eta;
    const Vec on_range = c * xi_eta;
    const double lhs = f.eval(x, u, eta);
    const double rhs = f.eval(x, u, on_range);
    const double residual = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    record(rep, residual, x, u, eta, lhs, rhs);
  }
  rep.pass = rep.worst_residual <= tol;
  return rep;
}

CheckReport check_representation(const Lagrangian& f_e, const Lagrangian& f,
                                 const CoefficientField& field, int sample_count, double tol,
                                 uint64_t seed) {
  if (f_e.kind() != LagKind::euclidean || f.kind() != LagKind::anisotropic) {
    throw std::invalid_argument("check_representation: expects (euclidean, anisotropic) pair");
  }
  CheckReport rep{.name = "representation", .tol = tol, .samples = sample_count, .seed = seed};
  Sampler s(seed);
  for (int i = 0; i < sample_count; ++i) {
    const Vec x = s.point_in(field.domain());
    const double u = (f_e.with_u() || f.with_u()) ? s.scalar() : 0.0;
    const Vec xi = s.vector(field.n());
    const Vec c_xi = field.eval(x) * xi;
    const double lhs = f_e.eval(x, u, xi);
    const double rhs = f.eval(x, u, c_xi);
    const double residual = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    record(rep, residual, x, u, xi, lhs, rhs);
  }
  rep.pass = rep.worst_residual <= tol;
  return rep;
}

CheckReport check_growth_transfer(const Lagrangian& f, const CoefficientField& field,
                                  const GrowthCertificate& cert, int sample_count, uint64_t seed,
                                  bool range_restricted) {
  if (f.kind() != LagKind::anisotropic) {
    throw std::invalid_argument("check_growth_transfer: anisotropic Lagrangian required");
  }
  CheckReport rep{.name = range_restricted ? "growth_transfer" : "growth_global",
                  .tol = 0.0, .samples = sample_count, .seed = seed};
  Sampler s(seed);
  constexpr double slack = 1e-9;
  for (int i = 0; i < sample_count; ++i) {
    const Vec x = s.point_in(field.domain());
    const double u = f.with_u() ? s.scalar() : 0.0;
    Vec eta;
    if (range_restricted) {
      const Vec xi = s.vector(field.n());
      eta = field.eval(x) * xi;
    } else {
      eta = s.vector(field.m());
    }
    const double val = f.eval(x, u, eta);
    const double power = std::pow(norm2(eta), cert.p);
    const double upper = cert.a + cert.b * std::pow(std::abs(u), cert.p) + cert.c * power;
    const double lower = cert.d * power;
    const double scale = 1.0 + std::abs(val) + upper;
    const double upper_violation = (val - upper) / scale;
    const double lower_violation = (lower - val) / scale;
    if (upper_violation > rep.worst_residual) {
      rep.worst_residual = upper_violation;
      rep.witness = Witness{x, u, eta, val, upper};
    }
    if (lower_violation > rep.worst_residual) {
      rep.worst_residual = lower_violation;
      rep.witness = Witness{x, u, eta, lower, val};
    }
  }
  rep.tol = slack;
  rep.pass = rep.worst_residual <= slack;
  return rep;
}

CheckReport check_convexity(const Lagrangian& f, const Box& x_domain, int sample_count, double tol,
                            uint64_t seed, ConvexityMode mode) {
  CheckReport rep{.name = mode == ConvexityMode::gradient_slot ? "convexity_gradient"
                                                               : "convexity_joint",
                  .tol = tol, .samples = sample_count, .seed = seed};
  Sampler s(seed);
  for (int i = 0; i < sample_count; ++i) {
    const Vec x = s.point_in(x_domain);
    const Vec za = s.vector(f.zdim());
    const Vec zb = s.vector(f.zdim());
    double ua = 0.0, ub = 0.0;
    if (f.with_u()) {
      if (mode == ConvexityMode::gradient_slot) {
        ua = ub = s.scalar();
      } else {
        ua = s.scalar();
        ub = s.scalar();
      }
    }
    Vec zm(f.zdim());
    for (int k = 0; k < f.zdim(); ++k) zm[k] = 0.5 * (za[k] + zb[k]);
    const double um = 0.5 * (ua + ub);
    const double fm = f.eval(x, um, zm);
    const double avg = 0.5 * (f.eval(x, ua, za) + f.eval(x, ub, zb));
    const double residual = (fm - avg) / (1.0 + std::abs(avg));
    record(rep, residual, x, um, zm, fm, avg);
  }
  rep.pass = rep.worst_residual <= tol;
  return rep;
}

}  // namespace xlag
