#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xlag/fields.hpp"
#include "xlag/matrix.hpp"

namespace xlag {

/// Uniform tensor grid on a box, 1 to 3 axes, >= 3 nodes per axis.
/// Node ordering is row-major with the last axis fastest.
struct GridDomain {
  Box box;
  std::vector<int> resolution;

  GridDomain() = default;
  GridDomain(Box b, std::vector<int> res);

  int dim() const { return box.dim(); }
  double spacing(int axis) const;
  size_t node_count() const;
  Vec node(std::span<const int> idx) const;
  size_t flat_index(std::span<const int> idx) const;
  bool compatible(const GridDomain& other) const;
};

void to_json(nlohmann::json& j, const GridDomain& d);
void from_json(const nlohmann::json& j, GridDomain& d);

struct GridFunction {
  GridDomain domain;
  Vec values;  // one per node
};

void to_json(nlohmann::json& j, const GridFunction& g);
void from_json(const nlohmann::json& j, GridFunction& g);
std::string grid_function_csv(const GridFunction& g);

struct GridVectorField {
  GridDomain domain;
  int components = 0;
  Vec values;  // node-major: values[node*components + c]
};

/// Nodal evaluation of a scalar function of x; rejects non-finite samples.
GridFunction sample(const GridDomain& domain, const std::function<double(std::span<const double>)>& f);

/// Central differences at interior nodes, second-order one-sided at the
/// boundary. Exact on affine functions.
GridVectorField gradient_fd(const GridFunction& u);

/// Nodewise X-gradient C(x) * Du(x).
GridVectorField x_gradient(const GridFunction& u, const CoefficientField& field);

/// Node indices of a node-aligned sub-box; throws when corners miss nodes.
struct SubBoxIndex {
  std::vector<int> lo_idx;
  std::vector<int> hi_idx;
};
SubBoxIndex align_sub_box(const GridDomain& domain, const Box& sub);

/// Tensor-product trapezoid rule over a node-aligned sub-box.
double integrate(const GridFunction& g, const Box& sub);
double integrate(const GridFunction& g);  // whole domain

/// Trapezoid weight of one node restricted to a sub-box.
double trapezoid_weight(const GridDomain& domain, const SubBoxIndex& sub,
                        std::span<const int> idx);

/// Visits every node with its multi-index and flat index.
void for_each_node(const GridDomain& domain,
                   const std::function<void(std::span<const int>, size_t)>& visit);

}  // namespace xlag
