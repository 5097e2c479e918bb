// Command-line front end for the experiments.

#include "mpdwr/assembly.hpp"
#include "mpdwr/experiments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mpdwr;

namespace {

struct Globals {
  std::string out = "out";
  std::string pair = "single:double";
  double tol = 0.0;
  long maxit = 0;
  std::string dump_mesh, dump_indicators, dump_matrix;
};

std::ofstream open_out(const Globals& g, const std::string& name) {
  std::ofstream os(fs::path(g.out) / name);
  if (!os) throw std::runtime_error("cannot write " + (fs::path(g.out) / name).string());
  return os;
}

void write_table(const Globals& g, const std::string& name, CsvTable t,
                 const std::map<std::string, std::string>& meta) {
  for (const auto& [k, v] : meta) t.meta.emplace(k, v);
  auto os = open_out(g, name);
  t.write(os);
  std::cout << "wrote " << (fs::path(g.out) / name).string() << '\n';
}

AdaptConfig base_config(const Globals& g) {
  AdaptConfig cfg;
  std::tie(cfg.primal_precision, cfg.dual_precision) = parse_precision_pair(g.pair);
  cfg.primal_solver.tol = cfg.dual_solver.tol = g.tol;
  cfg.primal_solver.maxit = cfg.dual_solver.maxit = g.maxit;
  return cfg;
}

// Optional dumps of the final state of a run.
void dump(const Globals& g, const Problem& problem, const Functional& J, const AdaptConfig& cfg,
          const AdaptResult& r) {
  if (!g.dump_mesh.empty()) {
    std::ofstream os(g.dump_mesh);
    write_mesh(os, *r.mesh);
  }
  const Precision pp = r.history.records.back().primal_precision;
  const Precision pd = r.history.records.back().dual_precision;
  const FESpace space = build_space(r.mesh, cfg.degree, pp);
  if (!g.dump_indicators.empty()) {
    const Solution<double> u = promote(r.primal);
    const IndicatorField res = residual_indicator(u, problem.f);
    const Solution<double> w = dispatch(pd, [&](auto tag) {
      using T = typename decltype(tag)::type;
      return promote(Solution<T>{space.with_precision(pd), dual_solve_mpdwr<T>(space, J, cfg.dual_solver).x});
    });
    std::ofstream os(g.dump_indicators);
    CsvTable t = indicator_table(*r.mesh, res, dwr_indicator(res, w));
    t.meta = run_metadata(cfg);
    t.write(os);
  }
  if (!g.dump_matrix.empty()) {
    std::ofstream os(g.dump_matrix);
    dispatch(pp, [&](auto tag) {
      using T = typename decltype(tag)::type;
      auto A = assemble_stiffness<T>(space);
      std::vector<T> rhs(space.n_dofs(), T(0));
      apply_dirichlet<T>(A, rhs, space.dofs().boundary_dofs);
      write_matrix_market(os, A);
    });
  }
}

std::vector<Series> je_series(const std::vector<std::pair<std::string, const AdaptHistory*>>& runs, bool l2) {
  std::vector<Series> out;
  for (const auto& [label, h] : runs) {
    Series s{label, {}, {}};
    for (const auto& rec : h->records) {
      s.x.push_back(rec.n_dofs);
      s.y.push_back(l2 ? rec.l2_error : rec.je);
    }
    out.push_back(std::move(s));
  }
  return out;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-precision dual weighted residual experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--precision-pair", g.pair, "primal:dual, e.g. single:double, double:single, half:single")
      ->capture_default_str();
  app.add_option("--tol", g.tol, "Linear solver relative tolerance (default 100 eps of the solve precision)");
  app.add_option("--maxit", g.maxit, "Linear solver iteration cap (default 10 n)");
  app.add_option("--dump-mesh", g.dump_mesh, "Write the final mesh of adapt/limit");
  app.add_option("--dump-indicators", g.dump_indicators, "Write final residual and DWR indicators");
  app.add_option("--dump-matrix", g.dump_matrix, "Write the final primal matrix (Matrix Market)");

  std::string problem = "e1", functional = "j1";
  int levels = 4;
  auto* ortho = app.add_subcommand("ortho", "Galerkin orthogonality of same- and mixed-precision solutions");
  ortho->add_option("--problem", problem)->capture_default_str();
  ortho->add_option("--levels", levels)->capture_default_str();

  double theta = 0.5;
  std::vector<double> ladder{1e-2, 1e-3, 1e-4};
  int max_iter = 40, generations = 1, init = 2;
  std::string je_mode = "exact";
  bool no_guard = false;
  auto* adapt = app.add_subcommand("adapt", "DWR-driven adaptation against a residual-driven twin");
  adapt->add_option("--problem", problem)->capture_default_str();
  adapt->add_option("--functional", functional)->capture_default_str();
  adapt->add_option("--theta", theta)->capture_default_str();
  adapt->add_option("--tol-ladder", ladder)->delimiter(',')->capture_default_str();
  adapt->add_option("--max-iter", max_iter)->capture_default_str();
  adapt->add_option("--generations", generations)->capture_default_str();
  adapt->add_option("--initial-refinements", init)->capture_default_str();
  adapt->add_option("--je-mode", je_mode)->check(CLI::IsMember({"exact", "estimated"}))->capture_default_str();
  adapt->add_flag("--no-guard", no_guard, "Keep refining below the minimum volume guard");

  std::vector<int> depths{2, 3, 4, 5};
  int reps = 5;
  auto* compare = app.add_subcommand("compare-dual", "Dual solve plus indicator time: Approach 1, Approach 2, MP-DWR");
  compare->add_option("--problem", problem)->capture_default_str();
  compare->add_option("--functional", functional)->capture_default_str();
  compare->add_option("--depths", depths)->delimiter(',')->capture_default_str();
  compare->add_option("--reps", reps)->capture_default_str();

  double bench_tol = 1e-4;
  auto* bench = app.add_subcommand("bench", "Whole-run timing of MP-DWR against Approach 1");
  bench->add_option("--problem", problem)->capture_default_str();
  bench->add_option("--functional", functional)->capture_default_str();
  bench->add_option("--target", bench_tol, "Target |J(e)|")->capture_default_str();
  bench->add_option("--theta", theta)->capture_default_str();
  bench->add_option("--max-iter", max_iter)->capture_default_str();
  bench->add_flag("--no-guard", no_guard);

  long n_acc = 10'000'000;
  auto* micro = app.add_subcommand("microbench", "Accumulation loop at single and double precision");
  micro->add_option("-n", n_acc)->capture_default_str();
  micro->add_option("--reps", reps)->capture_default_str();

  double limit_target = 1e-12;
  auto* limit = app.add_subcommand("limit", "Deep refinement with a single and a double primal");
  limit->add_option("--problem", problem, "Default e2");
  limit->add_option("--functional", functional)->capture_default_str();
  limit->add_option("--max-iter", max_iter)->capture_default_str();
  limit->add_option("--generations", generations)->capture_default_str();
  limit->add_option("--initial-refinements", init)->capture_default_str();
  limit->add_option("--theta", theta)->capture_default_str();
  limit->add_option("--target", limit_target)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(g.out);
    AdaptConfig cfg = base_config(g);
    const auto meta = run_metadata(cfg);

    if (*ortho) {
      const Problem p = problem_by_name(problem);
      const OrthoResult r = run_ortho(p, levels, cfg.primal_precision == Precision::Double ? cfg.dual_precision
                                                                                         : cfg.primal_precision);
      write_table(g, "ortho_" + p.name + ".csv", ortho_table(r), meta);
      std::printf("%s ortho %s: same-precision decay %s, mixed stall %s, L2 rate %.3f %s\n", verdict(r.pass()),
                  p.name.c_str(), verdict(r.same_decays), verdict(r.mixed_stalls), r.l2_rate, verdict(r.rate_ok));
    } else if (*adapt) {
      const Problem p = problem_by_name(problem);
      const Functional J = functional_by_name(functional);
      cfg.marking_theta = theta;
      cfg.tol = ladder.empty() ? 1e-4 : *std::min_element(ladder.begin(), ladder.end());
      cfg.max_iter = max_iter;
      cfg.generations = generations;
      cfg.initial_refinements = init;
      cfg.je_mode = je_mode == "exact" ? JeMode::Exact : JeMode::Estimated;
      cfg.stop_at_volume_guard = !no_guard;
      const AdaptPair r = run_adapt_pair(p, J, cfg);
      const std::string stem = "adapt_" + p.name + "_" + J.name;
      write_table(g, stem + "_dwr.csv", history_table(r.dwr.history), meta);
      write_table(g, stem + "_residual.csv", history_table(r.residual.history), meta);
      write_table(g, stem + "_ladder.csv", ladder_table(r, ladder), meta);
      auto svg = open_out(g, stem + ".svg");
      write_loglog_svg(svg, p.name + " / " + J.name, "DoFs", "|J(e)|",
                       je_series({{"MP-DWR", &r.dwr.history}, {"residual", &r.residual.history}}, false));
      std::cout << "dwr: " << r.dwr.history.stop_reason << "; residual: " << r.residual.history.stop_reason << '\n';
      dump(g, p, J, cfg, r.dwr);
    } else if (*compare) {
      const auto rows = run_compare_dual(problem_by_name(problem), functional_by_name(functional), depths, reps,
                                         cfg.dual_solver);
      write_table(g, "compare_dual.csv", compare_dual_table(rows), meta);
    } else if (*bench) {
      cfg.tol = bench_tol;
      cfg.marking_theta = theta;
      cfg.max_iter = max_iter;
      cfg.stop_at_volume_guard = !no_guard;
      const auto rows = run_bench(problem_by_name(problem), functional_by_name(functional), cfg);
      write_table(g, "bench.csv", bench_table(rows), meta);
    } else if (*micro) {
      const MicrobenchResult r = run_microbench(n_acc, reps);
      write_table(g, "microbench.csv", microbench_table(r), {});
      std::printf("single/double time ratio %.3f\n", r.ratio());
    } else if (*limit) {
      const Problem p = problem_by_name(limit->count("--problem") ? problem : "e2");
      const Functional J = functional_by_name(functional);
      cfg.tol = limit_target;
      cfg.max_iter = max_iter;
      cfg.generations = generations;
      cfg.initial_refinements = init;
      cfg.marking_theta = theta;
      const LimitResult r = run_limit(p, J, cfg);
      CsvTable t = limit_table(r);
      for (const auto& [k, v] : meta) t.meta.emplace(k, v);
      t.meta["precision_pair"] = "single:double,double:single";
      {
        auto os = open_out(g, "limit.csv");
        t.write(os);
        os << "# diagnosis single: volume_flag=" << r.single_diag.volume_flag
           << " stagnation_flag=" << r.single_diag.stagnation_flag << " min_volume=" << format_number(r.single_diag.min_volume)
           << '\n';
        os << "# diagnosis double: volume_flag=" << r.double_diag.volume_flag
           << " stagnation_flag=" << r.double_diag.stagnation_flag << " min_volume=" << format_number(r.double_diag.min_volume)
           << '\n';
      }
      auto svg = open_out(g, "limit.svg");
      write_loglog_svg(svg, p.name + " / " + J.name + " precision limit", "DoFs", "L2 error",
                       je_series({{"single primal", &r.single_run.history}, {"double primal", &r.double_run.history}},
                                 true));
      std::printf("single: volume_flag %d stagnation_flag %d; double: volume_flag %d\n", r.single_diag.volume_flag,
                  r.single_diag.stagnation_flag, r.double_diag.volume_flag);
      dump(g, p, J, cfg, r.single_run);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
