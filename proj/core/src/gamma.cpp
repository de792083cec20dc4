#include "xlag/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace xlag {

namespace {

struct CellGeometry {
  const GridDomain& dom;
  int d;
  std::vector<int> cells_per_axis;

  explicit CellGeometry(const GridDomain& dom) : dom(dom), d(dom.dim()) {
    for (int a = 0; a < d; ++a) cells_per_axis.push_back(dom.resolution[a] - 1);
  }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < d; ++a) v *= dom.spacing(a);
    return v;
  }

  // Integrand contribution of one cell: f at the cell center with the
  // cell-averaged forward-difference gradient. Affine nodal data yields the
  // exact constant gradient, which keeps affine Dirichlet data a discrete
  // minimizer.
  double cell_value(const FunctionalSpec& spec, const Vec& values,
                    std::span<const int> cell) const {
    const int corners = 1 << d;
    std::vector<int> idx(d);
    double u_mean = 0.0;
    Vec grad(d, 0.0);
    for (int corner = 0; corner < corners; ++corner) {
      for (int a = 0; a < d; ++a) idx[a] = cell[a] + ((corner >> a) & 1);
      const double v = values[dom.flat_index(idx)];
      u_mean += v;
      for (int a = 0; a < d; ++a) {
        grad[a] += ((corner >> a) & 1) ? v : -v;
      }
    }
    u_mean /= corners;
    Vec center(d);
    for (int a = 0; a < d; ++a) {
      grad[a] /= (corners / 2) * dom.spacing(a);
      center[a] = dom.box.lo[a] + (cell[a] + 0.5) * dom.spacing(a);
    }
    const Mat c = spec.field.eval(center);
    const Vec z = c * grad;
    return spec.lagrangian.eval(center, u_mean, z);
  }

  template <typename Visit>
  void for_each_cell(Visit&& visit) const {
    std::vector<int> cell(d, 0);
    for (;;) {
      visit(std::span<const int>(cell));
      int a = d - 1;
      while (a >= 0) {
        if (++cell[a] < cells_per_axis[a]) break;
        cell[a] = 0;
        --a;
      }
      if (a < 0) return;
    }
  }

  // Sum of cell contributions over the cells touching one node.
  double local_energy(const FunctionalSpec& spec, const Vec& values,
                      std::span<const int> node) const {
    const double vol = cell_volume();
    std::vector<int> cell(d);
    double total = 0.0;
    const int count = 1 << d;
    for (int k = 0; k < count; ++k) {
      bool valid = true;
      for (int a = 0; a < d; ++a) {
        cell[a] = node[a] - ((k >> a) & 1);
        if (cell[a] < 0 || cell[a] >= cells_per_axis[a]) valid = false;
      }
      if (valid) total += vol * cell_value(spec, values, cell);
    }
    return total;
  }
};

}  // namespace

double cell_energy(const FunctionalSpec& spec, const GridFunction& u) {
  const CellGeometry geo(u.domain);
  const double vol = geo.cell_volume();
  double total = 0.0;
  geo.for_each_cell([&](std::span<const int> cell) {
    const double v = geo.cell_value(spec, u.values, cell);
    if (!std::isfinite(v)) throw std::runtime_error("cell_energy: non-finite integrand");
    total += vol * v;
  });
  return total;
}

MinimizeResult minimize_from(const FunctionalSpec& spec, GridFunction start,
                             const std::vector<bool>& free_mask, const MinimizeOptions& opts) {
  const GridDomain dom = start.domain;
  const CellGeometry geo(dom);
  if (free_mask.size() != start.values.size()) {
    throw std::invalid_argument("minimize: free mask size mismatch");
  }

  GridFunction u = std::move(start);
  double energy = cell_energy(spec, u);
  Vec grad(u.values.size(), 0.0);
  std::vector<std::vector<int>> node_index(u.values.size());
  for_each_node(dom, [&](std::span<const int> idx, size_t flat) {
    node_index[flat].assign(idx.begin(), idx.end());
  });

  double step = 1.0;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    // finite-difference energy gradient, recomputing only the touched cells
    double gnorm2 = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i) {
      if (!free_mask[i]) {
        grad[i] = 0.0;
        continue;
      }
      const double eps = 1e-6 * (1.0 + std::abs(u.values[i]));
      const double saved = u.values[i];
      u.values[i] = saved + eps;
      const double ep = geo.local_energy(spec, u.values, node_index[i]);
      u.values[i] = saved - eps;
      const double em = geo.local_energy(spec, u.values, node_index[i]);
      u.values[i] = saved;
      grad[i] = (ep - em) / (2.0 * eps);
      gnorm2 += grad[i] * grad[i];
    }
    if (gnorm2 < 1e-24) break;

    GridFunction trial = u;
    bool accepted = false;
    while (step > 1e-16) {
      for (size_t i = 0; i < u.values.size(); ++i) {
        if (free_mask[i]) trial.values[i] = u.values[i] - step * grad[i];
      }
      const double trial_energy = cell_energy(spec, trial);
      if (!std::isfinite(trial_energy)) {
        throw std::runtime_error("minimize: energy diverged during line search");
      }
      if (trial_energy <= energy - 1e-4 * step * gnorm2) {
        accepted = true;
        const double decrease = energy - trial_energy;
        u = trial;
        energy = trial_energy;
        step = std::min(step * 2.0, 1e3);
        if (decrease < opts.rel_tol * (1.0 + std::abs(energy))) {
          return MinimizeResult{std::move(u), energy, iter + 1};
        }
        break;
      }
      step /= 2.0;
    }
    if (!accepted) break;  // stationary within floating-point resolution
  }
  return MinimizeResult{std::move(u), energy, iter};
}

MinimizeResult minimize(const FunctionalSpec& spec, const GridDomain& grid, const Expr& boundary,
                        const MinimizeOptions& opts) {
  const CheckReport convexity =
      check_convexity(spec.lagrangian, grid.box, opts.convexity_samples, 1e-9, opts.seed);
  if (!convexity.pass) {
    throw std::invalid_argument("minimize: integrand failed the sampled convexity check");
  }
  GridFunction start = sample(grid, [&](std::span<const double> x) {
    return boundary.eval(EvalContext{x, 0.0, {}});
  });
  std::vector<bool> free_mask(start.values.size(), false);
  for_each_node(grid, [&](std::span<const int> idx, size_t flat) {
    bool interior = true;
    for (int a = 0; a < grid.dim(); ++a) {
      if (idx[a] == 0 || idx[a] == grid.resolution[a] - 1) interior = false;
    }
    free_mask[flat] = interior;
  });
  return minimize_from(spec, std::move(start), free_mask, opts);
}

GammaConfig GammaConfig::from_json(const nlohmann::json& j) {
  const std::vector<int> h_values = j.at("h_values").get<std::vector<int>>();
  if (h_values.empty()) throw std::invalid_argument("gamma config: h_values empty");
  for (size_t i = 0; i + 1 < h_values.size(); ++i) {
    if (h_values[i + 1] <= h_values[i]) {
      throw std::invalid_argument("gamma config: h_values must be increasing");
    }
  }

  std::vector<CoefficientField> fields;
  std::optional<CoefficientField> limit_field;
  if (j.contains("field_sequence") && j.at("field_sequence").is_string()) {
    const std::string name = j.at("field_sequence").get<std::string>();
    if (name != "seq_example") {
      throw std::invalid_argument("gamma config: unknown field sequence '" + name + "'");
    }
    const FieldSequence seq = seq_example_sequence();
    for (int h : h_values) fields.push_back(seq.generator(h));
    limit_field = seq.limit;
  } else {
    for (const auto& fj : j.at("fields")) fields.push_back(field_from_json(fj));
    if (fields.size() != h_values.size()) {
      throw std::invalid_argument("gamma config: fields count != h_values count");
    }
    limit_field = field_from_json(j.at("limit_field"));
  }

  Lagrangian lag = Lagrangian::from_json(j.at("lagrangian"), &fields.front());
  Lagrangian limit_lag = Lagrangian::from_json(j.at("limit_lagrangian"), &*limit_field);

  GridDomain grid = j.at("grid").get<GridDomain>();
  Expr boundary = Expr::parse(j.at("boundary").get<std::string>());

  auto parse_probes = [](const nlohmann::json& arr) {
    std::vector<GammaProbe> probes;
    for (const auto& pj : arr) {
      if (pj.is_string()) {
        const std::string src = pj.get<std::string>();
        probes.push_back(GammaProbe{src, Expr::parse(src)});
      } else {
        probes.push_back(GammaProbe{pj.at("name").get<std::string>(),
                                    Expr::parse(pj.at("expr").get<std::string>())});
      }
    }
    return probes;
  };

  GammaConfig cfg{h_values,
                  std::move(fields),
                  std::move(*limit_field),
                  std::move(lag),
                  std::move(limit_lag),
                  std::move(grid),
                  std::move(boundary),
                  parse_probes(j.at("probes")),
                  parse_probes(j.value("perturbations", nlohmann::json::array())),
                  j.value("p", 2.0),
                  j.value("tol", 1e-6),
                  j.value("seed", static_cast<uint64_t>(1))};
  return cfg;
}

namespace {

size_t tail_start(size_t n) { return n - (n + 1) / 2; }

}  // namespace

GammaReport run_gamma_experiment(const GammaConfig& config) {
  GammaReport rep;
  rep.h_values = config.h_values;
  rep.tol = config.tol;
  rep.seed = config.seed;

  const size_t nh = config.h_values.size();
  std::vector<FunctionalSpec> specs;
  for (size_t i = 0; i < nh; ++i) {
    specs.push_back(FunctionalSpec{config.lagrangian, config.fields[i], config.p});
  }
  const FunctionalSpec limit_spec{config.limit_lagrangian, config.limit_field, config.p};

  // (a) minimum energies
  MinimizeOptions mopts;
  mopts.seed = config.seed;
  for (size_t i = 0; i < nh; ++i) {
    try {
      rep.min_energies.push_back(minimize(specs[i], config.grid, config.boundary, mopts).energy);
    } catch (const std::exception& e) {
      throw std::runtime_error("gamma experiment: minimize failed at h=" +
                               std::to_string(config.h_values[i]) + ": " + e.what());
    }
  }
  rep.limit_min_energy = minimize(limit_spec, config.grid, config.boundary, mopts).energy;

  for (size_t i = 0; i + 1 < nh; ++i) {
    if (rep.min_energies[i + 1] > rep.min_energies[i] + 1e-8 * (1.0 + std::abs(rep.min_energies[i]))) {
      rep.energies_monotone = false;
    }
  }
  rep.energies_converge =
      std::abs(rep.min_energies.back() - rep.limit_min_energy) <= config.tol;

  const size_t tail = tail_start(nh);

  // (b)+(c) probe tables, recovery gaps, liminf margins
  for (const GammaProbe& probe : config.probes) {
    GridFunction u = sample(config.grid, [&](std::span<const double> x) {
      return probe.expression.eval(EvalContext{x, 0.0, {}});
    });
    GammaProbeResult pr;
    pr.name = probe.name;
    pr.f_limit = eval_functional(limit_spec, u);
    for (size_t i = 0; i < nh; ++i) {
      const double fh = eval_functional(specs[i], u);
      pr.f_h.push_back(fh);
      pr.gap.push_back(std::abs(fh - pr.f_limit));
    }
    // recovery along the constant sequence: the gap must vanish in the tail,
    // either below the resolution floor or by clear decay
    const double floor = 1e-9 * (1.0 + std::abs(pr.f_limit));
    bool decaying = true;
    for (size_t i = tail; i + 1 < nh; ++i) {
      if (pr.gap[i + 1] > pr.gap[i] + floor) decaying = false;
    }
    pr.recovery_pass = pr.gap.back() <= floor ||
                       (decaying && pr.gap.back() <= 0.5 * pr.gap[tail] + floor);
    rep.probe_results.push_back(std::move(pr));

    // liminf sampling: perturbed sequences u_h = u + alpha_h * w
    for (const GammaProbe& pert : config.perturbations) {
      const GridFunction w = sample(config.grid, [&](std::span<const double> x) {
        return pert.expression.eval(EvalContext{x, 0.0, {}});
      });
      for (int rule = 0; rule < 2; ++rule) {
        double margin = std::numeric_limits<double>::infinity();
        for (size_t i = tail; i < nh; ++i) {
          const double h = config.h_values[i];
          const double alpha = rule == 0 ? 1.0 / h : 1.0 / (h * h);
          GridFunction uh = u;
          for (size_t k = 0; k < uh.values.size(); ++k) uh.values[k] += alpha * w.values[k];
          margin = std::min(margin, eval_functional(specs[i], uh) - rep.probe_results.back().f_limit);
        }
        LiminfResult lr;
        lr.probe = probe.name;
        lr.perturbation = pert.name;
        lr.alpha_rule = rule == 0 ? "1/h" : "1/h^2";
        lr.margin = margin;
        lr.pass = margin >= -1e-8;
        rep.liminf_results.push_back(std::move(lr));
      }
    }
  }
  return rep;
}

bool GammaReport::all_pass() const {
  if (!energies_monotone || !energies_converge) return false;
  for (const auto& p : probe_results) {
    if (!p.recovery_pass) return false;
  }
  for (const auto& l : liminf_results) {
    if (!l.pass) return false;
  }
  return true;
}

nlohmann::json GammaReport::to_json() const {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : probe_results) {
    probes.push_back({{"name", p.name},
                      {"f_h", p.f_h},
                      {"f_limit", p.f_limit},
                      {"gap", p.gap},
                      {"recovery_pass", p.recovery_pass}});
  }
  nlohmann::json liminf = nlohmann::json::array();
  for (const auto& l : liminf_results) {
    liminf.push_back({{"probe", l.probe},
                      {"perturbation", l.perturbation},
                      {"alpha_rule", l.alpha_rule},
                      {"margin", l.margin},
                      {"pass", l.pass}});
  }
  return nlohmann::json{{"h_values", h_values},
                        {"min_energies", min_energies},
                        {"limit_min_energy", limit_min_energy},
                        {"energies_monotone", energies_monotone},
                        {"energies_converge", energies_converge},
                        {"probes", probes},
                        {"liminf", liminf},
                        {"tol", tol},
                        {"seed", seed},
                        {"all_pass", all_pass()}};
}

std::string GammaReport::csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "h,E_h";
  for (const auto& p : probe_results) out << ",F[" << p.name << "],gap[" << p.name << "]";
  out << "\n";
  for (size_t i = 0; i < h_values.size(); ++i) {
    out << h_values[i] << "," << min_energies[i];
    for (const auto& p : probe_results) out << "," << p.f_h[i] << "," << p.gap[i];
    out << "\n";
  }
  out << "limit," << limit_min_energy;
  for (const auto& p : probe_results) out << "," << p.f_limit << ",0";
  out << "\n";
  return out.str();
}

std::string pointwise_vs_gamma_table(const GammaReport& report) { return report.csv(); }

}  // namespace xlag
