#include <doctest.h>

#include <cmath>
#include <numbers>

#include "xlag/grid.hpp"

using namespace xlag;
using std::numbers::pi;

namespace {

GridDomain unit_square(int res) {
  return GridDomain(Box{{0.0, 0.0}, {1.0, 1.0}}, {res, res});
}

double sup_gradient_error(const GridFunction& u, const GridVectorField& exact) {
  const GridVectorField g = gradient_fd(u);
  double worst = 0.0;
  for (size_t i = 0; i < g.values.size(); ++i) {
    worst = std::max(worst, std::abs(g.values[i] - exact.values[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("domain bookkeeping") {
  const GridDomain d = unit_square(33);
  CHECK(d.dim() == 2);
  CHECK(d.node_count() == 33u * 33u);
  CHECK(d.spacing(0) == doctest::Approx(1.0 / 32).epsilon(1e-15));
  const int idx[] = {1, 2};
  const Vec x = d.node(idx);
  CHECK(x[0] == doctest::Approx(1.0 / 32).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(2.0 / 32).epsilon(1e-15));
  CHECK(d.flat_index(idx) == 1u * 33u + 2u);

  CHECK_THROWS(GridDomain(Box{{0.0}, {1.0}}, {2}));                    // too coarse
  CHECK_THROWS(GridDomain(Box{{0.0, 0.0}, {1.0, 1.0}}, {5}));         // shape mismatch
  CHECK_THROWS(GridDomain(Box{{0.0, 0.0, 0.0, 0.0}, {1, 1, 1, 1}}, {3, 3, 3, 3}));
}

TEST_CASE("sampling evaluates nodes and rejects non-finite values") {
  const GridDomain d = unit_square(33);
  const GridFunction plane = sample(d, [](std::span<const double> x) { return x[0]; });
  CHECK(plane.values[d.flat_index(std::vector<int>{16, 7})] ==
        doctest::Approx(0.5).epsilon(1e-15));

  const GridFunction ones = sample(d, [](std::span<const double>) { return 1.0; });
  for (double v : ones.values) CHECK(v == 1.0);

  CHECK_THROWS(sample(d, [](std::span<const double> x) { return 1.0 / x[0]; }));
}

TEST_CASE("gradient is exact on affine and constant data") {
  const GridDomain d = unit_square(17);
  const GridFunction plane =
      sample(d, [](std::span<const double> x) { return 2.0 * x[0] - 3.0 * x[1] + 1.0; });
  const GridVectorField g = gradient_fd(plane);
  REQUIRE(g.components == 2);
  for (size_t i = 0; i < d.node_count(); ++i) {
    CHECK(g.values[2 * i + 0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(g.values[2 * i + 1] == doctest::Approx(-3.0).epsilon(1e-13));
  }

  const GridFunction c = sample(d, [](std::span<const double>) { return 4.0; });
  for (double v : gradient_fd(c).values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("central difference is exact on quadratics at interior nodes") {
  const GridDomain line(Box{{0.0}, {1.0}}, {65});
  const GridFunction sq = sample(line, [](std::span<const double> x) { return x[0] * x[0]; });
  const GridVectorField g = gradient_fd(sq);
  const size_t mid = line.flat_index(std::vector<int>{32});
  CHECK(g.values[mid] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("x_gradient composes the field with the nodal gradient") {
  const auto dp = make_field("degenerate_pair");
  const GridDomain d = unit_square(17);
  const GridFunction u = sample(d, [](std::span<const double> x) { return x[0] + x[1]; });
  const GridVectorField xu = x_gradient(u, dp);
  REQUIRE(xu.components == 2);
  for (size_t i = 0; i < d.node_count(); ++i) {
    CHECK(xu.values[2 * i + 0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(xu.values[2 * i + 1] == doctest::Approx(1.0).epsilon(1e-13));
  }

  const auto cc = make_field("cc_example");
  const GridDomain dcc(Box{{-1.0, -1.0}, {1.0, 1.0}}, {17, 17});
  const GridFunction v = sample(dcc, [](std::span<const double> x) { return x[1]; });
  const GridVectorField xv = x_gradient(v, cc);
  const size_t left = dcc.flat_index(std::vector<int>{4, 8});    // x = (-0.5, 0)
  const size_t right = dcc.flat_index(std::vector<int>{12, 8});  // x = (0.5, 0)
  CHECK(std::abs(xv.values[2 * left + 0]) < 1e-13);
  CHECK(std::abs(xv.values[2 * left + 1]) < 1e-13);
  CHECK(xv.values[2 * right + 1] == doctest::Approx(0.5).epsilon(1e-13));

  const auto eucl = make_field("euclidean:2");
  const GridFunction w = sample(d, [](std::span<const double> x) { return x[0]; });
  const GridVectorField xw = x_gradient(w, eucl);
  for (size_t i = 0; i < d.node_count(); ++i) {
    CHECK(xw.values[2 * i + 0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(xw.values[2 * i + 1]) < 1e-13);
  }
}

TEST_CASE("x_gradient is linear") {
  const auto gr = make_field("grushin");
  const GridDomain d(Box{{-1.0, -1.0}, {1.0, 1.0}}, {17, 17});
  const GridFunction u = sample(d, [](std::span<const double> x) { return std::sin(x[0] + x[1]); });
  const GridFunction v = sample(d, [](std::span<const double> x) { return x[0] * x[1] * x[1]; });
  GridFunction combo = u;
  for (size_t i = 0; i < combo.values.size(); ++i) {
    combo.values[i] = 2.0 * u.values[i] - 0.5 * v.values[i];
  }
  const GridVectorField xu = x_gradient(u, gr);
  const GridVectorField xv = x_gradient(v, gr);
  const GridVectorField xc = x_gradient(combo, gr);
  for (size_t i = 0; i < xc.values.size(); ++i) {
    CHECK(xc.values[i] ==
          doctest::Approx(2.0 * xu.values[i] - 0.5 * xv.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("trapezoid integration: exact multilinear cases and sub-boxes") {
  const GridDomain d = unit_square(33);
  CHECK(integrate(sample(d, [](std::span<const double>) { return 1.0; })) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(sample(d, [](std::span<const double> x) { return x[0]; })) ==
        doctest::Approx(0.5).epsilon(1e-14));

  const GridFunction g = sample(d, [](std::span<const double> x) { return x[0] * x[1]; });
  const Box left{{0.0, 0.0}, {0.5, 1.0}};
  CHECK(integrate(g, left) == doctest::Approx(0.0625).epsilon(1e-13));

  CHECK_THROWS(integrate(g, Box{{0.0, 0.0}, {0.51, 1.0}}));  // corner off the nodes
}

TEST_CASE("trapezoid integral of the bump converges to 4/pi^2 at order 2") {
  auto bump = [](std::span<const double> x) {
    return std::sin(pi * x[0]) * std::sin(pi * x[1]);
  };
  const double exact = 4.0 / (pi * pi);
  std::vector<double> errs;
  for (int res : {17, 33, 65}) {
    errs.push_back(std::abs(integrate(sample(unit_square(res), bump)) - exact));
  }
  for (size_t i = 0; i + 1 < errs.size(); ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
}

TEST_CASE("gradient convergence order on C^3 probes") {
  auto probe = [](std::span<const double> x) {
    return std::sin(pi * x[0]) * std::exp(x[1]);
  };
  std::vector<double> errs;
  for (int res : {17, 33, 65}) {
    const GridDomain d = unit_square(res);
    const GridFunction u = sample(d, probe);
    GridVectorField exact;
    exact.domain = d;
    exact.components = 2;
    exact.values.resize(2 * d.node_count());
    for_each_node(d, [&](std::span<const int> idx, size_t flat) {
      const Vec x = d.node(idx);
      exact.values[2 * flat + 0] = pi * std::cos(pi * x[0]) * std::exp(x[1]);
      exact.values[2 * flat + 1] = std::sin(pi * x[0]) * std::exp(x[1]);
    });
    errs.push_back(sup_gradient_error(u, exact));
  }
  for (size_t i = 0; i + 1 < errs.size(); ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    CHECK(order > 1.7);
    CHECK(order < 2.2);
  }
}

TEST_CASE("X-gradient norm is controlled by the operator norm of C") {
  // ||Xu||_p <= sup ||C||_op * ||Du||_p, nodewise and in quadrature
  const auto gr = make_field("grushin");
  const GridDomain d(Box{{-1.0, -1.0}, {1.0, 1.0}}, {33, 33});
  const GridFunction u =
      sample(d, [](std::span<const double> x) { return std::sin(2.0 * x[0]) + x[1] * x[1]; });
  const GridVectorField du = gradient_fd(u);
  const GridVectorField xu = x_gradient(u, gr);
  // sup ||C(x)||_op = max(1, |x1|) = 1 on the closed box
  GridFunction xnorm{d, Vec(d.node_count())};
  GridFunction dnorm{d, Vec(d.node_count())};
  for (size_t i = 0; i < d.node_count(); ++i) {
    xnorm.values[i] = xu.values[2 * i] * xu.values[2 * i] + xu.values[2 * i + 1] * xu.values[2 * i + 1];
    dnorm.values[i] = du.values[2 * i] * du.values[2 * i] + du.values[2 * i + 1] * du.values[2 * i + 1];
  }
  CHECK(integrate(xnorm) <= integrate(dnorm) + 1e-12);
}

TEST_CASE("serialization shapes") {
  const GridDomain d = unit_square(5);
  const GridFunction g = sample(d, [](std::span<const double> x) { return x[0] + 2.0 * x[1]; });
  const std::string csv = grid_function_csv(g);
  CHECK(csv.find("x1") != std::string::npos);
  size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == d.node_count() + 1);
}
