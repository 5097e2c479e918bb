#include "mpdwr/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mpdwr {

std::string_view to_string(DualMethod m) {
  switch (m) {
    case DualMethod::MpDwr: return "mp-dwr";
    case DualMethod::Approach1: return "approach1";
    case DualMethod::Approach2: return "approach2";
  }
  return "?";
}

std::string_view to_string(IndicatorKind k) { return k == IndicatorKind::Dwr ? "dwr" : "residual"; }

void AdaptConfig::validate() const {
  if (degree != 1) throw std::invalid_argument("AdaptConfig: only degree 1 primal spaces are supported");
  if (!(marking_theta > 0.0 && marking_theta < 1.0)) {
    throw std::invalid_argument("AdaptConfig: marking_theta must lie in (0,1)");
  }
  if (max_iter < 0) throw std::invalid_argument("AdaptConfig: max_iter must be >= 0");
  if (generations < 1) throw std::invalid_argument("AdaptConfig: generations must be >= 1");
  if (initial_refinements < 0) throw std::invalid_argument("AdaptConfig: initial_refinements must be >= 0");
  if (indicator == IndicatorKind::Dwr && dual_method == DualMethod::MpDwr &&
      primal_precision == dual_precision && !same_precision_ok) {
    throw std::invalid_argument("AdaptConfig: primal and dual precision must differ");
  }
}

double AdaptHistory::total_time() const {
  double t = t_post;
  for (const auto& r : records) t += r.t_primal + r.t_dual + r.t_indicator + r.t_refine;
  return t;
}

namespace {

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point t0) {
  return std::chrono::duration<double>(clock::now() - t0).count();
}

template <Real T>
SolveResult<T> solve_system(CsrMatrix<T> A, std::vector<T> rhs, const FESpace& space,
                            const SolverOptions& opts, std::span<const T> x0) {
  apply_dirichlet<T>(A, rhs, space.dofs().boundary_dofs);
  return pcg<T>(A, rhs, opts, x0);
}

std::shared_ptr<const SparsityPattern> pattern_for(const FESpace& space,
                                                   std::shared_ptr<const SparsityPattern> pattern) {
  if (pattern) return pattern;
  return std::make_shared<const SparsityPattern>(build_pattern(space.dofs()));
}

}  // namespace

Mesh initial_mesh(int initial_refinements) {
  Mesh m = unit_square_template();
  for (int i = 0; i < initial_refinements; ++i) m = global_refine(m);
  return m;
}

template <Real T>
SolveResult<T> solve_primal(const FESpace& space, const Problem& problem, const SolverOptions& opts,
                            std::shared_ptr<const SparsityPattern> pattern, std::span<const T> x0) {
  const FESpace s = space.with_precision(precision_of<T>);
  auto A = assemble_stiffness<T>(s, pattern_for(s, std::move(pattern)));
  auto F = assemble_load<T>(s, problem.f);
  return solve_system<T>(std::move(A), std::move(F), s, opts, x0);
}

template <Real T>
SolveResult<T> dual_solve_mpdwr(const FESpace& space, const Functional& J, const SolverOptions& opts,
                                std::shared_ptr<const SparsityPattern> pattern) {
  const FESpace s = space.with_precision(precision_of<T>);
  auto A = assemble_stiffness<T>(s, pattern_for(s, std::move(pattern)));
  auto G = assemble_functional<T>(s, J);
  return solve_system<T>(std::move(A), std::move(G), s, opts, {});
}

RefinedDual dual_solve_approach1(std::shared_ptr<const Mesh> mesh, const Functional& J,
                                 const SolverOptions& opts) {
  auto fine_mesh = std::make_shared<const Mesh>(global_refine(*mesh));
  const FESpace fine = build_space(fine_mesh, 1, Precision::Double);
  auto res = dual_solve_mpdwr<double>(fine, J, opts);
  // Regular refinement keeps the coarse vertices at their indices.
  const FESpace coarse = build_space(mesh, 1, Precision::Double);
  std::vector<double> r(res.x.begin(), res.x.begin() + mesh->n_vertices());
  return {Solution<double>{fine, std::move(res.x)}, Solution<double>{coarse, std::move(r)}, res.report};
}

RefinedDual dual_solve_approach2(std::shared_ptr<const Mesh> mesh, const Functional& J,
                                 const SolverOptions& opts) {
  const FESpace p2 = build_space(mesh, 2, Precision::Double);
  auto res = dual_solve_mpdwr<double>(p2, J, opts);
  // Vertex DoFs come first and are nodal values at the vertices.
  const FESpace p1 = build_space(mesh, 1, Precision::Double);
  std::vector<double> r(res.x.begin(), res.x.begin() + mesh->n_vertices());
  return {Solution<double>{p2, std::move(res.x)}, Solution<double>{p1, std::move(r)}, res.report};
}

SolveResult<double> post_process(const FESpace& space, const Problem& problem,
                                 const Solution<double>* start, const SolverOptions& opts,
                                 std::shared_ptr<const SparsityPattern> pattern) {
  std::span<const double> x0;
  if (start) x0 = start->coefficients;
  return solve_primal<double>(space, problem, opts, std::move(pattern), x0);
}

std::vector<int> marking(const IndicatorField& ind, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("marking: theta must lie in (0,1)");
  const int n = ind.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ind.eta[a] > ind.eta[b]; });
  double total = 0.0;
  for (double v : ind.eta) total += v * v;
  std::vector<int> marked;
  if (!(total > 0.0)) return marked;
  double acc = 0.0;
  for (int k : order) {
    if (acc >= theta * total) break;
    marked.push_back(k);
    acc += ind.eta[k] * ind.eta[k];
  }
  return marked;
}

LimitDiagnosis limit_monitor(const AdaptHistory& h, double guard) {
  LimitDiagnosis d;
  if (h.records.empty()) return d;
  d.min_volume = h.records.back().min_volume;
  for (const auto& r : h.records) d.min_volume = std::min(d.min_volume, r.min_volume);
  d.volume_flag = d.min_volume < guard;
  const std::size_t n = h.records.size();
  if (n >= 3 && h.records.back().primal_precision != Precision::Double) {
    const double a = h.records[n - 3].l2_error, b = h.records[n - 2].l2_error,
                 c = h.records[n - 1].l2_error;
    d.stagnation_flag = !(a > b && b > c);
  }
  return d;
}

namespace {

struct PrimalStep {
  AnySolution solution;
  Solution<double> promoted;
  SolveReport report;
};

PrimalStep run_primal(Precision p, const FESpace& space, const Problem& problem, const SolverOptions& opts,
                      std::shared_ptr<const SparsityPattern> pattern) {
  return dispatch(p, [&](auto tag) -> PrimalStep {
    using T = typename decltype(tag)::type;
    auto res = solve_primal<T>(space, problem, opts, pattern);
    Solution<T> u{space.with_precision(p), std::move(res.x)};
    Solution<double> wide = promote(u);
    return {AnySolution(std::move(u)), std::move(wide), res.report};
  });
}

struct DualStep {
  Solution<double> weight;  // P1 on the primal mesh
  std::optional<Solution<double>> enriched;
  SolveReport report;
};

DualStep run_dual(const AdaptConfig& cfg, Precision p, const FESpace& space, const Functional& J,
                  std::shared_ptr<const SparsityPattern> pattern) {
  switch (cfg.dual_method) {
    case DualMethod::MpDwr:
      return dispatch(p, [&](auto tag) -> DualStep {
        using T = typename decltype(tag)::type;
        auto res = dual_solve_mpdwr<T>(space, J, cfg.dual_solver, pattern);
        return {promote(Solution<T>{space.with_precision(p), std::move(res.x)}), std::nullopt, res.report};
      });
    case DualMethod::Approach1: {
      auto r = dual_solve_approach1(space.mesh_ptr(), J, cfg.dual_solver);
      return {std::move(r.restricted), std::move(r.fine), r.report};
    }
    case DualMethod::Approach2: {
      auto r = dual_solve_approach2(space.mesh_ptr(), J, cfg.dual_solver);
      return {std::move(r.restricted), std::move(r.fine), r.report};
    }
  }
  throw std::logic_error("run_dual: unknown method");
}

bool is_precision_failure(const std::exception& e) {
  return dynamic_cast<const SolveError*>(&e) != nullptr || dynamic_cast<const std::domain_error*>(&e) != nullptr;
}

AdaptResult run(const Problem& problem, const Functional& J, const AdaptConfig& cfg) {
  cfg.validate();
  AdaptResult out;
  AdaptHistory& hist = out.history;
  auto mesh = std::make_shared<const Mesh>(initial_mesh(cfg.initial_refinements));
  Precision pp = cfg.primal_precision, pd = cfg.dual_precision;
  bool switched = false;
  std::shared_ptr<const DofMap> last_dofs;
  std::shared_ptr<const SparsityPattern> last_pattern;

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iter = k;
    rec.n_elements = mesh->n_elements();
    rec.min_volume = min_element_volume(*mesh);

    // Primal.
    auto t0 = clock::now();
    const FESpace space = build_space(mesh, cfg.degree, pp);
    auto pattern = std::make_shared<const SparsityPattern>(build_pattern(space.dofs()));
    std::optional<PrimalStep> primal;
    try {
      primal = run_primal(pp, space, problem, cfg.primal_solver, pattern);
    } catch (const std::exception& e) {
      if (!(cfg.cascade && !switched && is_precision_failure(e))) throw;
      // The lower precision broke down on this mesh: move up and redo.
      switched = true;
      hist.switched_after = k - 1;
      pp = Precision::Single;
      pd = Precision::Double;
      primal = run_primal(pp, space, problem, cfg.primal_solver, pattern);
    }
    rec.t_primal = seconds_since(t0);
    rec.n_dofs = space.n_dofs();
    rec.primal_precision = pp;
    rec.dual_precision = pd;
    rec.primal_iterations = primal->report.iterations;

    // Goal error.
    std::optional<DualStep> dual;
    auto solve_dual = [&] {
      auto t1 = clock::now();
      dual = run_dual(cfg, pd, space, J, pattern);
      rec.t_dual = seconds_since(t1);
      rec.dual_solved = true;
      rec.dual_iterations = dual->report.iterations;
    };
    if (cfg.je_mode == JeMode::Exact) {
      rec.je = functional_error(J, problem.u, primal->promoted);
    } else {
      solve_dual();
      const Solution<double>& w = dual->enriched && dual->enriched->space.mesh_ptr() == mesh
                                      ? *dual->enriched
                                      : dual->weight;
      rec.je = estimate_je(primal->promoted, w, problem.f);
    }
    rec.l2_error = l2_error(primal->promoted, problem.u);

    out.mesh = mesh;
    out.primal = primal->solution;
    last_dofs = space.dofs_ptr();
    last_pattern = pattern;

    // Stop test.
    const bool guard_tripped = rec.min_volume < cfg.min_volume_guard;
    std::string stop;
    if (std::abs(rec.je) <= cfg.tol) {
      stop = "tolerance reached";
    } else if (k >= cfg.max_iter) {
      stop = "iteration limit reached";
    } else if (guard_tripped && cfg.stop_at_volume_guard) {
      stop = "minimum element volume below guard";
    }
    if (!stop.empty()) {
      hist.records.push_back(rec);
      hist.stop_reason = stop;
      break;
    }

    // Indicator and marking.
    if (cfg.indicator == IndicatorKind::Dwr && !dual) solve_dual();
    auto t2 = clock::now();
    IndicatorField ind = residual_indicator(primal->promoted, problem.f);
    if (cfg.indicator == IndicatorKind::Dwr) ind = dwr_indicator(ind, dual->weight);
    const std::vector<int> marked = marking(ind, cfg.marking_theta);
    rec.t_indicator = seconds_since(t2);
    rec.eta_total = ind.total();

    // Refinement.
    auto t3 = clock::now();
    auto next = std::make_shared<const Mesh>(bisect_marked(*mesh, marked, cfg.generations));
    rec.t_refine = seconds_since(t3);
    hist.records.push_back(rec);
    if (marked.empty()) {
      hist.stop_reason = "no elements marked";
      break;
    }
    mesh = std::move(next);

    if (cfg.cascade && !switched) {
      const bool forced = cfg.cascade_force_at >= 0 && k >= cfg.cascade_force_at;
      if (forced || limit_monitor(hist, cfg.min_volume_guard).stagnation_flag) {
        switched = true;
        hist.switched_after = k;
        pp = Precision::Single;
        pd = Precision::Double;
      }
    }
  }

  const LimitDiagnosis diag = limit_monitor(hist, cfg.min_volume_guard);
  hist.volume_flag = diag.volume_flag;
  hist.stagnation_flag = diag.stagnation_flag;
  hist.l2_primal_final = hist.records.back().l2_error;

  if (cfg.post_process && pp != Precision::Double) {
    // Same mesh, DoF map and pattern as the last primal solve. Starting from
    // the low-precision iterate saved ~25% of the PCG steps on adapted meshes
    // (it costs steps on uniform ones).
    const Solution<double> start = promote(out.primal);
    auto t4 = clock::now();
    const FESpace space(out.mesh, last_dofs, Precision::Double);
    SolverOptions post_opts;
    post_opts.maxit = cfg.primal_solver.maxit;
    auto res = post_process(space, problem, &start, post_opts, last_pattern);
    hist.t_post = seconds_since(t4);
    hist.post_processed = true;
    hist.post_iterations = res.report.iterations;
    out.post = Solution<double>{space, std::move(res.x)};
    hist.l2_post = l2_error(*out.post, problem.u);
  }
  return out;
}

}  // namespace

AdaptResult mpdwr_adapt(const Problem& problem, const Functional& J, const AdaptConfig& cfg) {
  return run(problem, J, cfg);
}

AdaptResult revised_mpdwr(const Problem& problem, const Functional& J, AdaptConfig cfg) {
  cfg.primal_precision = Precision::Double;
  cfg.dual_precision = Precision::Single;
  cfg.post_process = false;
  return run(problem, J, cfg);
}

AdaptResult precision_cascade(const Problem& problem, const Functional& J, AdaptConfig cfg) {
  cfg.primal_precision = Precision::Half;
  cfg.dual_precision = Precision::Single;
  cfg.cascade = true;
  return run(problem, J, cfg);
}

#define MPDWR_INSTANTIATE(T)                                                                        \
  template SolveResult<T> solve_primal<T>(const FESpace&, const Problem&, const SolverOptions&,     \
                                          std::shared_ptr<const SparsityPattern>, std::span<const T>); \
  template SolveResult<T> dual_solve_mpdwr<T>(const FESpace&, const Functional&, const SolverOptions&, \
                                              std::shared_ptr<const SparsityPattern>);

MPDWR_INSTANTIATE(half)
MPDWR_INSTANTIATE(float)
MPDWR_INSTANTIATE(double)
#undef MPDWR_INSTANTIATE

}  // namespace mpdwr
