// Command-line front end: pseudo-inverse verification, Lagrangian transforms,
// functional evaluation and comparison, and Gamma-convergence experiments.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 input error,
// 3 hypothesis failure (kernel invariance).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xlag/fields.hpp"
#include "xlag/functional.hpp"
#include "xlag/gamma.hpp"
#include "xlag/grid.hpp"
#include "xlag/lagrangian.hpp"
#include "xlag/linalg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xlag;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitHypothesisFailure = 3;

json make_manifest(const std::string& command, uint64_t seed, double tol, int samples) {
  return json{{"command", command},
              {"seed", seed},
              {"tol", tol},
              {"samples", samples},
              {"tool_version", kVersion}};
}

// temp-file + rename so partially written reports never appear under the
// final name
void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

void write_report(const fs::path& dir, const std::string& name, const json& report) {
  write_atomic(dir / name, report.dump(2) + "\n");
}

json load_json_arg(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open '" + arg + "'");
  json j;
  in >> j;
  return j;
}

Lagrangian load_lagrangian(const std::string& arg, LagKind default_kind,
                           const CoefficientField* field) {
  if (!arg.empty() && arg.front() == '{') return Lagrangian::from_json(json::parse(arg), field);
  if (fs::exists(arg)) return Lagrangian::from_json(load_json_arg(arg), field);
  // bare DSL source
  std::optional<int> zdim;
  if (field != nullptr) zdim = default_kind == LagKind::euclidean ? field->n() : field->m();
  return Lagrangian::parse(arg, default_kind, zdim);
}

int cmd_verify_pinv(const std::string& spec, int samples, uint64_t seed, double tol,
                    const fs::path& out_dir) {
  json report = {{"manifest", make_manifest("verify-pinv", seed, tol, samples)}, {"spec", spec}};
  bool pass = true;
  try {
    std::vector<Mat> matrices;
    std::vector<Vec> points;
    if (!spec.empty() && (spec.front() == '{' || fs::exists(spec))) {
      matrices.push_back(load_json_arg(spec).get<Mat>());
      points.emplace_back();
    } else {
      const CoefficientField field = make_field(spec);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int i = 0; i < samples; ++i) {
        Vec x(field.n());
        for (int a = 0; a < field.n(); ++a) {
          x[a] = field.domain().lo[a] + unit(rng) * (field.domain().hi[a] - field.domain().lo[a]);
        }
        matrices.push_back(field.eval(x));
        points.push_back(std::move(x));
      }
    }
    std::map<int, int> rank_profile;
    double worst_penrose = 0.0;
    double worst_agreement = 0.0;
    for (const Mat& c : matrices) {
      const Mat p = pinv_svd(c);
      const PenroseReport pr = verify_penrose(c, p, tol);
      worst_penrose = std::max(worst_penrose, pr.max_residual());
      if (!pr.all_pass()) pass = false;
      const Mat p2 = pinv_limit(c);
      worst_agreement = std::max(worst_agreement, (p - p2).frobenius_norm());
      const PointAlgebra pa = point_algebra(c);  // throws on internal inconsistency
      ++rank_profile[pa.rank];
    }
    json profile = json::object();
    for (const auto& [rank, count] : rank_profile) profile[std::to_string(rank)] = count;
    report["rank_profile"] = profile;
    report["worst_penrose_residual"] = worst_penrose;
    report["worst_route_disagreement"] = worst_agreement;
    if (worst_agreement > 1e-6) pass = false;
  } catch (const std::exception& e) {
    std::cerr << "verify-pinv: " << e.what() << "\n";
    return kExitInputError;
  }
  report["pass"] = pass;
  write_report(out_dir, "verify_pinv.json", report);
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitCheckFailure;
}

int cmd_transform(const std::string& lag_arg, const std::string& field_name, int samples,
                  uint64_t seed, double tol, const fs::path& out_dir) {
  try {
    const CoefficientField field = make_field(field_name);
    const Lagrangian f_e = load_lagrangian(lag_arg, LagKind::euclidean, &field);
    json report = {{"manifest", make_manifest("transform", seed, tol, samples)},
                   {"field", field_name},
                   {"input", f_e.to_json()}};

    const CheckReport invariance = check_kernel_invariance(f_e, field, samples, tol, seed);
    report["kernel_invariance"] = invariance.to_json();
    if (!invariance.pass) {
      write_report(out_dir, "transform.json", report);
      std::cerr << "transform: input violates kernel invariance; witness xi = "
                << json(invariance.witness.z).dump() << "\n";
      return kExitHypothesisFailure;
    }

    const Lagrangian f = transform(f_e, field);
    json out_spec = {{"kind", "anisotropic"},
                     {"arity", f.with_u() ? "with-u" : "without-u"},
                     {"zdim", f.zdim()},
                     {"transform_of", f_e.to_json()},
                     {"field", field_name}};
    report["output"] = out_spec;
    report["kernel_constancy"] = check_costonker(f, field, samples, tol, seed).to_json();
    report["representation"] = check_representation(f_e, f, field, samples, tol, seed).to_json();
    report["convexity"] =
        check_convexity(f, field.domain(), samples, 1e-9, seed).to_json();

    bool pass = true;
    for (const char* key : {"kernel_constancy", "representation"}) {
      if (!report[key]["pass"].get<bool>()) pass = false;
    }
    report["pass"] = pass;
    write_report(out_dir, "transform.json", report);
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitPass : kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "transform: " << e.what() << "\n";
    return kExitInputError;
  }
}

GridDomain make_grid(const Box& box, int nodes_per_axis) {
  return GridDomain(box, std::vector<int>(box.dim(), nodes_per_axis));
}

int cmd_eval(const std::string& lag_arg, const std::string& field_name, const std::string& u_expr,
             const std::string& box_arg, int grid_nodes, uint64_t seed, double tol,
             const fs::path& out_dir) {
  try {
    const CoefficientField field = make_field(field_name);
    const Lagrangian f = load_lagrangian(lag_arg, LagKind::anisotropic, &field);
    const FunctionalSpec spec{f, field, 2.0};
    const Box a = box_arg.empty() ? field.domain() : json::parse(box_arg).get<Box>();
    const GridDomain grid = make_grid(field.domain(), grid_nodes);
    const Expr u_parsed = Expr::parse(u_expr);
    const GridFunction u = sample(grid, [&](std::span<const double> x) {
      return u_parsed.eval(EvalContext{x, 0.0, {}});
    });
    const FunctionalReport fr = eval_functional_detailed(spec, u, a);

    json report = {{"manifest", make_manifest("eval", seed, tol, grid_nodes)},
                   {"field", field_name},
                   {"lagrangian", f.to_json()},
                   {"u", u_expr},
                   {"box", a},
                   {"value", fr.value}};
    write_report(out_dir, "eval.json", report);
    // per-node contribution table for plotting
    GridFunction contrib{u.domain, fr.contributions};
    write_atomic(out_dir / "eval_contributions.csv", grid_function_csv(contrib));
    std::cout.precision(17);
    std::cout << fr.value << "\n";
    return kExitPass;
  } catch (const std::exception& e) {
    std::cerr << "eval: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_compare(const std::string& lag1_arg, const std::string& lag2_arg,
                const std::string& field_name, int corpus_size, int grid_nodes, uint64_t seed,
                double tol, const fs::path& out_dir) {
  try {
    const CoefficientField field = make_field(field_name);
    const Lagrangian f1 = load_lagrangian(lag1_arg, LagKind::anisotropic, &field);
    const Lagrangian f2 = load_lagrangian(lag2_arg, LagKind::anisotropic, &field);
    const GridDomain grid = make_grid(field.domain(), grid_nodes);
    const Corpus corpus = default_corpus(grid, corpus_size, seed);
    const CompareReport cr = compare_functionals(FunctionalSpec{f1, field, 2.0},
                                                 FunctionalSpec{f2, field, 2.0}, corpus, tol);
    json report = {{"manifest", make_manifest("compare", seed, tol, corpus_size)},
                   {"field", field_name},
                   {"result", cr.to_json()}};
    write_report(out_dir, "compare.json", report);
    std::ostringstream csv;
    csv.precision(17);
    csv << "index,F1,F2\n";
    for (size_t i = 0; i < cr.values1.size(); ++i) {
      csv << i << "," << cr.values1[i] << "," << cr.values2[i] << "\n";
    }
    write_atomic(out_dir / "compare.csv", csv.str());
    std::cout << (cr.pass ? "PASS" : "FAIL") << " max_rel_diff=" << cr.max_rel_diff << "\n";
    return cr.pass ? kExitPass : kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_gamma(const std::string& config_arg, const fs::path& out_dir) {
  GammaConfig config = [&] {
    try {
      return GammaConfig::from_json(load_json_arg(config_arg));
    } catch (const std::exception& e) {
      std::cerr << "gamma: bad config: " << e.what() << "\n";
      std::exit(kExitInputError);
    }
  }();
  try {
    const GammaReport report = run_gamma_experiment(config);
    json out = {{"manifest",
                 make_manifest("gamma", config.seed, config.tol,
                               static_cast<int>(config.h_values.size()))},
                {"report", report.to_json()}};
    write_report(out_dir, "gamma.json", out);
    write_atomic(out_dir / "gamma.csv", report.csv());
    const bool pass = report.all_pass();
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitPass : kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "gamma: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

int cmd_catalog() {
  std::cout << "fields:\n";
  for (const std::string& name : catalog_names()) std::cout << "  " << name << "\n";
  std::cout << "lagrangians:\n  p_dirichlet (params: p)\n  p_dirichlet_u (params: p, b)\n  zero\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic Lagrangian toolkit"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  int samples = 200;
  double tol = 1e-10;
  int grid_nodes = 33;
  std::string out_dir = "xlag-out";
  app.add_option("--seed", seed, "RNG seed recorded in every report");
  app.add_option("--samples", samples, "sample count for randomized checks");
  app.add_option("--tol", tol, "tolerance for identity checks");
  app.add_option("--grid", grid_nodes, "nodes per grid axis");
  app.add_option("--out", out_dir, "output directory for reports");

  std::string spec, field_name, lag_arg, lag2_arg, u_expr, box_arg, config_arg;

  auto* verify = app.add_subcommand("verify-pinv", "pseudo-inverse and subspace checks");
  verify->add_option("spec", spec, "field name or matrix JSON/path")->required();

  auto* tr = app.add_subcommand("transform", "euclidean -> anisotropic Lagrangian transform");
  tr->add_option("lagrangian", lag_arg, "euclidean Lagrangian (JSON, path, or DSL)")->required();
  tr->add_option("--field", field_name, "coefficient field name")->required();

  auto* ev = app.add_subcommand("eval", "evaluate an integral functional");
  ev->add_option("lagrangian", lag_arg, "anisotropic Lagrangian (JSON, path, or DSL)")->required();
  ev->add_option("--field", field_name, "coefficient field name")->required();
  ev->add_option("-u,--function", u_expr, "grid function expression")->required();
  ev->add_option("--box", box_arg, "sub-box JSON {\"lo\":[..],\"hi\":[..]}");

  int corpus_size = 50;
  auto* cmp = app.add_subcommand("compare", "compare two functionals over a corpus");
  cmp->add_option("lagrangian1", lag_arg, "first anisotropic Lagrangian")->required();
  cmp->add_option("lagrangian2", lag2_arg, "second anisotropic Lagrangian")->required();
  cmp->add_option("--field", field_name, "coefficient field name")->required();
  cmp->add_option("--corpus", corpus_size, "corpus size");

  auto* gm = app.add_subcommand("gamma", "run a Gamma-convergence experiment");
  gm->add_option("config", config_arg, "experiment config (JSON or path)")->required();

  app.add_subcommand("catalog", "list built-in fields and Lagrangians");

  CLI11_PARSE(app, argc, argv);

  const fs::path out(out_dir);
  if (verify->parsed()) return cmd_verify_pinv(spec, samples, seed, tol, out);
  if (tr->parsed()) {
    const double check_tol = tol < 1e-12 ? 1e-12 : tol;
    return cmd_transform(lag_arg, field_name, samples, seed, check_tol, out);
  }
  if (ev->parsed()) return cmd_eval(lag_arg, field_name, u_expr, box_arg, grid_nodes, seed, tol, out);
  if (cmp->parsed()) {
    const double cmp_tol = tol < 1e-9 ? 1e-9 : tol;
    return cmd_compare(lag_arg, lag2_arg, field_name, corpus_size, grid_nodes, seed, cmp_tol, out);
  }
  if (app.get_subcommand("gamma")->parsed()) return cmd_gamma(config_arg, out);
  return cmd_catalog();
}
