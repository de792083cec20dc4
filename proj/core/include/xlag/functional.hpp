#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xlag/grid.hpp"
#include "xlag/lagrangian.hpp"

namespace xlag {

/// Integral functional F(u, A) = int_A f(x, u(x), Xu(x)) dx.
struct FunctionalSpec {
  Lagrangian lagrangian;  // anisotropic, zdim = field.m()
  CoefficientField field;
  double p = 2.0;
};

struct FunctionalReport {
  double value = 0.0;
  Vec contributions;  // per-node trapezoid-weighted integrand values
  nlohmann::json to_json() const;
};

double eval_functional(const FunctionalSpec& spec, const GridFunction& u, const Box& a);
double eval_functional(const FunctionalSpec& spec, const GridFunction& u);
FunctionalReport eval_functional_detailed(const FunctionalSpec& spec, const GridFunction& u,
                                          const Box& a);

/// Corpus item: a grid function together with the sub-box it is measured on.
using Corpus = std::vector<std::pair<GridFunction, Box>>;

/// Deterministic corpus of smooth grid functions on the full domain box.
Corpus default_corpus(const GridDomain& domain, int count, uint64_t seed = 1);

struct CompareReport {
  bool pass = true;
  double max_rel_diff = 0.0;
  int witness_index = -1;
  std::vector<double> values1;
  std::vector<double> values2;
  double tol = 0.0;
  nlohmann::json to_json() const;
};

/// Per-pair relative difference of two functionals over a shared corpus.
CompareReport compare_functionals(const FunctionalSpec& spec1, const FunctionalSpec& spec2,
                                  const Corpus& corpus, double tol);

struct StructureReport {
  bool additivity_pass = true;
  double additivity_residual = 0.0;
  bool locality_pass = true;
  double locality_residual = 0.0;
  bool translation_pass = true;
  double translation_residual = 0.0;
  bool all_pass() const { return additivity_pass && locality_pass && translation_pass; }
  nlohmann::json to_json() const;
};

/// Finite additivity over node-aligned splits, locality, and translation
/// invariance F(u + k, A) = F(u, A) for u-free integrands.
StructureReport check_measure_locality_translation(const FunctionalSpec& spec,
                                                   const Corpus& corpus, double tol,
                                                   uint64_t seed = 1);

struct BoundsReport {
  bool upper_pass = true;
  double upper_violation = 0.0;
  int upper_witness = -1;
  bool lower_pass = true;
  double lower_violation = 0.0;
  int lower_witness = -1;
  bool all_pass() const { return upper_pass && lower_pass; }
  nlohmann::json to_json() const;
};

/// Functional-level growth bounds: F(u,A) <= int_A a + b|u|^p + c|Xu|^p and
/// d int_A |Xu|^p <= F(u,A), with the same quadrature on both sides.
BoundsReport check_bounds(const FunctionalSpec& spec, const GrowthCertificate& cert,
                          const Corpus& corpus, double tol);

}  // namespace xlag
