#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xlag/matrix.hpp"

namespace xlag {

/// Axis-aligned open box in R^n. Containment checks allow a small slack so
/// grid nodes on the topological boundary still evaluate.
struct Box {
  Vec lo;
  Vec hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x, double slack = 1e-12) const;
  double volume() const;
};

void to_json(nlohmann::json& j, const Box& b);
void from_json(const nlohmann::json& j, Box& b);

/// A family of m Lipschitz vector fields on a box in R^n, presented as the
/// map x -> C(x) with the j-th row holding the components of the j-th field.
class CoefficientField {
 public:
  using Evaluator = std::function<Mat(std::span<const double>)>;

  CoefficientField(std::string name, int n, int m, Box domain, Evaluator evaluator,
                   std::optional<double> lipschitz_hint = std::nullopt);

  Mat eval(std::span<const double> x) const;

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int m() const { return m_; }
  const Box& domain() const { return domain_; }
  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }

 private:
  std::string name_;
  int n_;
  int m_;
  Box domain_;
  Evaluator evaluator_;
  std::optional<double> lipschitz_hint_;
};

struct FieldSequence {
  std::function<CoefficientField(int)> generator;  // index h >= 1
  CoefficientField limit;
};

/// Named constructors. Accepted specs: "euclidean:N", "grushin", "heisenberg",
/// "cc_example", "seq_example:H", "degenerate_pair". Throws on unknown names.
CoefficientField make_field(const std::string& spec);
std::vector<std::string> catalog_names();

FieldSequence seq_example_sequence();

/// Custom field from JSON: {"n":..,"m":..,"domain":{"lo":[..],"hi":[..]},
/// "entries":[["expr",..],..]}; also accepts {"name":"grushin"} style specs.
CoefficientField field_from_json(const nlohmann::json& j);

/// Max sampled difference quotient of the matrix entries over random point
/// pairs. Deterministic for a fixed seed.
double estimate_lipschitz(const CoefficientField& field, int samples, uint64_t seed = 1);

}  // namespace xlag
