#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xlag/expr.hpp"
#include "xlag/functional.hpp"

namespace xlag {

struct MinimizeOptions {
  int max_iterations = 100000;
  double rel_tol = 1e-10;
  int convexity_samples = 2000;
  uint64_t seed = 1;
};

struct MinimizeResult {
  GridFunction u;
  double energy = 0.0;
  int iterations = 0;
};

/// Projected gradient descent on the interior nodal values with Dirichlet
/// data from the boundary expression. The energy uses a cell-midpoint
/// discretization so that affine data is reproduced exactly; gradients of the
/// energy are taken by local finite differences. Rejects integrands that fail
/// the sampled convexity check.
MinimizeResult minimize(const FunctionalSpec& spec, const GridDomain& grid, const Expr& boundary,
                        const MinimizeOptions& opts = {});
MinimizeResult minimize_from(const FunctionalSpec& spec, GridFunction start,
                             const std::vector<bool>& free_mask, const MinimizeOptions& opts = {});

/// Cell-midpoint energy used by the minimizer (exposed for testing).
double cell_energy(const FunctionalSpec& spec, const GridFunction& u);

struct GammaProbe {
  std::string name;
  Expr expression;
};

struct GammaConfig {
  std::vector<int> h_values;
  std::vector<CoefficientField> fields;  // one per h value
  CoefficientField limit_field;
  Lagrangian lagrangian;        // anisotropic, shared across h
  Lagrangian limit_lagrangian;  // candidate Gamma-limit integrand
  GridDomain grid;
  Expr boundary;
  std::vector<GammaProbe> probes;
  std::vector<GammaProbe> perturbations;
  double p = 2.0;
  double tol = 1e-6;
  uint64_t seed = 1;

  static GammaConfig from_json(const nlohmann::json& j);
};

struct GammaProbeResult {
  std::string name;
  std::vector<double> f_h;   // F_h(u) per h
  double f_limit = 0.0;
  std::vector<double> gap;   // |F_h(u) - F(u)|
  bool recovery_pass = true;
};

struct LiminfResult {
  std::string probe;
  std::string perturbation;
  std::string alpha_rule;  // "1/h" or "1/h^2"
  double margin = 0.0;     // min over the tail of F_h(u_h) - F(u)
  bool pass = true;
};

struct GammaReport {
  std::vector<int> h_values;
  std::vector<double> min_energies;
  double limit_min_energy = 0.0;
  bool energies_monotone = true;
  bool energies_converge = true;
  std::vector<GammaProbeResult> probe_results;
  std::vector<LiminfResult> liminf_results;
  double tol = 0.0;
  uint64_t seed = 0;
  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string csv() const;  // columns: h, E_h, per-probe F_h and gap
};

GammaReport run_gamma_experiment(const GammaConfig& config);

/// Per-probe table of F_h(u) against F(u), CSV-exportable.
std::string pointwise_vs_gamma_table(const GammaReport& report);

}  // namespace xlag
