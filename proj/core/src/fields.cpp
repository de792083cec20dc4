#include "xlag/fields.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "xlag/expr.hpp"

namespace xlag {

bool Box::contains(std::span<const double> x, double slack) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
  return v;
}

void to_json(nlohmann::json& j, const Box& b) {
  j = nlohmann::json{{"lo", b.lo}, {"hi", b.hi}};
}

void from_json(const nlohmann::json& j, Box& b) {
  b.lo = j.at("lo").get<Vec>();
  b.hi = j.at("hi").get<Vec>();
  if (b.lo.size() != b.hi.size() || b.lo.empty()) {
    throw std::invalid_argument("Box: lo/hi length mismatch");
  }
  for (size_t i = 0; i < b.lo.size(); ++i) {
    if (!(b.lo[i] < b.hi[i])) throw std::invalid_argument("Box: lo must be below hi");
  }
}

CoefficientField::CoefficientField(std::string name, int n, int m, Box domain,
                                   Evaluator evaluator, std::optional<double> lipschitz_hint)
    : name_(std::move(name)), n_(n), m_(m), domain_(std::move(domain)),
      evaluator_(std::move(evaluator)), lipschitz_hint_(lipschitz_hint) {
  if (n_ < 1 || m_ < 1) throw std::invalid_argument("CoefficientField: n, m must be positive");
  if (domain_.dim() != n_) throw std::invalid_argument("CoefficientField: domain dimension != n");
}

Mat CoefficientField::eval(std::span<const double> x) const {
  if (!domain_.contains(x)) {
    throw std::domain_error("CoefficientField '" + name_ + "': point outside domain");
  }
  Mat c = evaluator_(x);
  if (c.rows() != m_ || c.cols() != n_) {
    throw std::logic_error("CoefficientField '" + name_ + "': evaluator returned wrong shape");
  }
  return c;
}

namespace {

Box unit_box(int n) {
  return Box{Vec(n, 0.0), Vec(n, 1.0)};
}

Box symmetric_box(int n) {
  return Box{Vec(n, -1.0), Vec(n, 1.0)};
}

CoefficientField euclidean_field(int n) {
  return CoefficientField("euclidean:" + std::to_string(n), n, n, unit_box(n),
                          [n](std::span<const double>) { return Mat::identity(n); }, 0.0);
}

CoefficientField grushin_field() {
  return CoefficientField(
      "grushin", 2, 2, symmetric_box(2),
      [](std::span<const double> x) {
        return Mat{{1.0, 0.0}, {0.0, x[0]}};
      },
      1.0);
}

CoefficientField heisenberg_field() {
  return CoefficientField(
      "heisenberg", 3, 2, symmetric_box(3),
      [](std::span<const double> x) {
        return Mat{{1.0, 0.0, -x[1] / 2.0}, {0.0, 1.0, x[0] / 2.0}};
      },
      0.5);
}

CoefficientField cc_example_field() {
  // X1 = d/dx1, X2 = x1+ * d/dx2; nodes with x1 = 0 take the right limit.
  return CoefficientField(
      "cc_example", 2, 2, symmetric_box(2),
      [](std::span<const double> x) {
        const double x1p = x[0] >= 0.0 ? x[0] : 0.0;
        return Mat{{1.0, 0.0}, {0.0, x1p}};
      },
      1.0);
}

CoefficientField degenerate_pair_field() {
  return CoefficientField(
      "degenerate_pair", 2, 2, unit_box(2),
      [](std::span<const double>) {
        return Mat{{1.0, 0.0}, {1.0, 0.0}};
      },
      0.0);
}

CoefficientField seq_example_field(int h) {
  if (h < 1) throw std::invalid_argument("seq_example: index must be >= 1");
  const double inv = 1.0 / h;
  return CoefficientField(
      "seq_example:" + std::to_string(h), 2, 2, unit_box(2),
      [inv](std::span<const double>) {
        return Mat{{1.0, 0.0}, {0.0, inv}};
      },
      0.0);
}

CoefficientField seq_example_limit_field() {
  return CoefficientField(
      "seq_example:limit", 2, 2, unit_box(2),
      [](std::span<const double>) {
        return Mat{{1.0, 0.0}, {0.0, 0.0}};
      },
      0.0);
}

}  // namespace

CoefficientField make_field(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string base = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (base == "euclidean") {
    const int n = arg.empty() ? 2 : std::stoi(arg);
    if (n < 1 || n > 3) throw std::invalid_argument("euclidean: dimension must be 1..3");
    return euclidean_field(n);
  }
  if (base == "grushin") return grushin_field();
  if (base == "heisenberg") return heisenberg_field();
  if (base == "cc_example") return cc_example_field();
  if (base == "degenerate_pair") return degenerate_pair_field();
  if (base == "seq_example") {
    if (arg == "limit") return seq_example_limit_field();
    if (arg.empty()) throw std::invalid_argument("seq_example: index required, e.g. seq_example:5");
    return seq_example_field(std::stoi(arg));
  }
  throw std::invalid_argument("unknown field '" + spec + "'");
}

std::vector<std::string> catalog_names() {
  return {"euclidean:N", "grushin", "heisenberg", "cc_example", "seq_example:H",
          "degenerate_pair"};
}

FieldSequence seq_example_sequence() {
  return FieldSequence{[](int h) { return seq_example_field(h); }, seq_example_limit_field()};
}

CoefficientField field_from_json(const nlohmann::json& j) {
  if (j.is_string()) return make_field(j.get<std::string>());
  if (j.contains("name")) return make_field(j.at("name").get<std::string>());
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  Box domain = j.at("domain").get<Box>();
  const auto& rows = j.at("entries");
  if (static_cast<int>(rows.size()) != m) {
    throw std::invalid_argument("custom field: expected m entry rows");
  }
  std::vector<std::vector<Expr>> entries;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("custom field: expected n entries per row");
    }
    std::vector<Expr> r;
    for (const auto& cell : row) {
      Expr e = Expr::parse(cell.get<std::string>());
      if (e.uses_u() || e.max_z_index() > 0) {
        throw std::invalid_argument("custom field entries may only reference x coordinates");
      }
      r.push_back(std::move(e));
    }
    entries.push_back(std::move(r));
  }
  auto eval = [n, m, entries = std::move(entries)](std::span<const double> x) {
    Mat c(m, n);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < n; ++k) c(i, k) = entries[i][k].eval(EvalContext{x, 0.0, {}});
    return c;
  };
  return CoefficientField(j.value("label", std::string("custom")), n, m, std::move(domain),
                          std::move(eval));
}

double estimate_lipschitz(const CoefficientField& field, int samples, uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("estimate_lipschitz: samples must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box& box = field.domain();
  auto draw_point = [&] {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]);
    return x;
  };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec x = draw_point();
    const Vec y = draw_point();
    const double dist = norm2(sub(x, y));
    if (dist < 1e-12) continue;
    const Mat cx = field.eval(x);
    const Mat cy = field.eval(y);
    for (int i = 0; i < field.m(); ++i)
      for (int k = 0; k < field.n(); ++k)
        worst = std::max(worst, std::abs(cx(i, k) - cy(i, k)) / dist);
  }
  return worst;
}

}  // namespace xlag
