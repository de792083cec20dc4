#include "xlag/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace xlag {

GridDomain::GridDomain(Box b, std::vector<int> res) : box(std::move(b)), resolution(std::move(res)) {
  if (box.dim() < 1 || box.dim() > 3) {
    throw std::invalid_argument("GridDomain: dimension must be 1..3");
  }
  if (static_cast<int>(resolution.size()) != box.dim()) {
    throw std::invalid_argument("GridDomain: resolution length != dimension");
  }
  for (int r : resolution) {
    if (r < 3) throw std::invalid_argument("GridDomain: need >= 3 nodes per axis");
  }
}

double GridDomain::spacing(int axis) const {
  return (box.hi[axis] - box.lo[axis]) / (resolution[axis] - 1);
}

size_t GridDomain::node_count() const {
  size_t n = 1;
  for (int r : resolution) n *= static_cast<size_t>(r);
  return n;
}

Vec GridDomain::node(std::span<const int> idx) const {
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = box.lo[a] + idx[a] * spacing(a);
  return x;
}

size_t GridDomain::flat_index(std::span<const int> idx) const {
  size_t f = 0;
  for (int a = 0; a < dim(); ++a) f = f * resolution[a] + idx[a];
  return f;
}

bool GridDomain::compatible(const GridDomain& other) const {
  return resolution == other.resolution && box.lo == other.box.lo && box.hi == other.box.hi;
}

void to_json(nlohmann::json& j, const GridDomain& d) {
  j = nlohmann::json{{"box", d.box}, {"resolution", d.resolution}};
}

void from_json(const nlohmann::json& j, GridDomain& d) {
  d = GridDomain(j.at("box").get<Box>(), j.at("resolution").get<std::vector<int>>());
}

void to_json(nlohmann::json& j, const GridFunction& g) {
  j = nlohmann::json{{"domain", g.domain}, {"values", g.values}};
}

void from_json(const nlohmann::json& j, GridFunction& g) {
  g.domain = j.at("domain").get<GridDomain>();
  g.values = j.at("values").get<Vec>();
  if (g.values.size() != g.domain.node_count()) {
    throw std::invalid_argument("GridFunction: value count != node count");
  }
}

void for_each_node(const GridDomain& domain,
                   const std::function<void(std::span<const int>, size_t)>& visit) {
  const int d = domain.dim();
  std::vector<int> idx(d, 0);
  size_t flat = 0;
  for (;;) {
    visit(idx, flat);
    ++flat;
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] < domain.resolution[a]) break;
      idx[a] = 0;
      --a;
    }
    if (a < 0) return;
  }
}

std::string grid_function_csv(const GridFunction& g) {
  std::ostringstream out;
  const int d = g.domain.dim();
  for (int a = 0; a < d; ++a) out << "x" << (a + 1) << ",";
  out << "value\n";
  out.precision(17);
  for_each_node(g.domain, [&](std::span<const int> idx, size_t flat) {
    const Vec x = g.domain.node(idx);
    for (double c : x) out << c << ",";
    out << g.values[flat] << "\n";
  });
  return out.str();
}

GridFunction sample(const GridDomain& domain,
                    const std::function<double(std::span<const double>)>& f) {
  GridFunction g{domain, Vec(domain.node_count())};
  for_each_node(domain, [&](std::span<const int> idx, size_t flat) {
    const double v = f(domain.node(idx));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "sample: non-finite value at node (";
      for (int a = 0; a < domain.dim(); ++a) msg << (a ? "," : "") << idx[a];
      msg << ")";
      throw std::runtime_error(msg.str());
    }
    g.values[flat] = v;
  });
  return g;
}

GridVectorField gradient_fd(const GridFunction& u) {
  const GridDomain& dom = u.domain;
  const int d = dom.dim();
  GridVectorField g{dom, d, Vec(dom.node_count() * d)};
  std::vector<int> nbr(d);
  for_each_node(dom, [&](std::span<const int> idx, size_t flat) {
    for (int a = 0; a < d; ++a) {
      const double s = dom.spacing(a);
      const int i = idx[a];
      const int n = dom.resolution[a];
      nbr.assign(idx.begin(), idx.end());
      double der;
      auto at = [&](int j) {
        nbr[a] = j;
        return u.values[dom.flat_index(nbr)];
      };
      if (i == 0) {
        der = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * s);
      } else if (i == n - 1) {
        der = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * s);
      } else {
        der = (at(i + 1) - at(i - 1)) / (2.0 * s);
      }
      g.values[flat * d + a] = der;
    }
  });
  return g;
}

GridVectorField x_gradient(const GridFunction& u, const CoefficientField& field) {
  const GridDomain& dom = u.domain;
  if (field.n() != dom.dim()) {
    throw std::invalid_argument("x_gradient: field dimension != grid dimension");
  }
  const GridVectorField du = gradient_fd(u);
  const int n = dom.dim();
  const int m = field.m();
  GridVectorField xu{dom, m, Vec(dom.node_count() * m)};
  for_each_node(dom, [&](std::span<const int> idx, size_t flat) {
    const Mat c = field.eval(dom.node(idx));
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += c(j, k) * du.values[flat * n + k];
      xu.values[flat * m + j] = s;
    }
  });
  return xu;
}

SubBoxIndex align_sub_box(const GridDomain& domain, const Box& sub) {
  if (sub.dim() != domain.dim()) throw std::invalid_argument("sub-box dimension mismatch");
  SubBoxIndex s;
  for (int a = 0; a < domain.dim(); ++a) {
    const double h = domain.spacing(a);
    const double flo = (sub.lo[a] - domain.box.lo[a]) / h;
    const double fhi = (sub.hi[a] - domain.box.lo[a]) / h;
    const int ilo = static_cast<int>(std::lround(flo));
    const int ihi = static_cast<int>(std::lround(fhi));
    if (std::abs(flo - ilo) > 1e-9 || std::abs(fhi - ihi) > 1e-9) {
      throw std::invalid_argument("sub-box corner does not lie on grid nodes");
    }
    if (ilo < 0 || ihi > domain.resolution[a] - 1 || ilo >= ihi) {
      throw std::invalid_argument("sub-box outside grid or empty");
    }
    s.lo_idx.push_back(ilo);
    s.hi_idx.push_back(ihi);
  }
  return s;
}

double trapezoid_weight(const GridDomain& domain, const SubBoxIndex& sub,
                        std::span<const int> idx) {
  double w = 1.0;
  for (int a = 0; a < domain.dim(); ++a) {
    const int i = idx[a];
    if (i < sub.lo_idx[a] || i > sub.hi_idx[a]) return 0.0;
    const double h = domain.spacing(a);
    w *= (i == sub.lo_idx[a] || i == sub.hi_idx[a]) ? h / 2.0 : h;
  }
  return w;
}

double integrate(const GridFunction& g, const Box& sub) {
  const SubBoxIndex s = align_sub_box(g.domain, sub);
  double total = 0.0;
  for_each_node(g.domain, [&](std::span<const int> idx, size_t flat) {
    const double w = trapezoid_weight(g.domain, s, idx);
    if (w != 0.0) total += w * g.values[flat];
  });
  return total;
}

double integrate(const GridFunction& g) { return integrate(g, g.domain.box); }

}  // namespace xlag
