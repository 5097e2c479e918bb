#include "mpdwr/experiments.hpp"

#include "mpdwr/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mpdwr {

namespace {

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string tol_string(const SolverOptions& o, Precision p) {
  return format_number(o.tol > 0.0 ? o.tol : default_tolerance(p));
}

std::string cell(std::optional<int> v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

std::map<std::string, std::string> run_metadata(const AdaptConfig& cfg) {
  return {
      {"precision_pair", std::string(to_string(cfg.primal_precision)) + ":" + std::string(to_string(cfg.dual_precision))},
      {"quad_stiffness", std::to_string(kStiffnessQuadrature)},
      {"quad_load", std::to_string(kLoadQuadrature)},
      {"quad_functional", std::to_string(kFunctionalQuadrature)},
      {"tol_primal", tol_string(cfg.primal_solver, cfg.primal_precision)},
      {"tol_dual", tol_string(cfg.dual_solver, cfg.dual_precision)},
  };
}

std::pair<Precision, Precision> parse_precision_pair(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("precision pair must look like primal:dual");
  return {parse_precision(s.substr(0, colon)), parse_precision(s.substr(colon + 1))};
}

// ---------------------------------------------------------------- ortho

OrthoResult run_ortho(const Problem& problem, int levels, Precision low) {
  if (levels < 3) throw std::invalid_argument("run_ortho: need at least 3 levels");
  if (low == Precision::Double) throw std::invalid_argument("run_ortho: the low precision must be below binary64");
  OrthoResult out;
  Mesh m = unit_square_template();
  for (int level = 1; level <= levels; ++level) {
    m = global_refine(m);
    const auto mesh = std::make_shared<const Mesh>(m);
    const FESpace s = build_space(mesh, 1, Precision::Double);
    const auto pattern = std::make_shared<const SparsityPattern>(build_pattern(s.dofs()));
    const Solution<double> ud{s, solve_primal<double>(s, problem, {}, pattern).x};
    OrthoRow row;
    row.level = level;
    row.dofs = s.n_dofs();
    row.l2_error = l2_error(ud, problem.u);
    row.probe_same = galerkin_probe<double, double>(problem.grad_u, ud, ud);
    row.probe_mixed = dispatch(low, [&](auto tag) -> double {
      using T = typename decltype(tag)::type;
      if constexpr (std::same_as<T, double>) {
        return 0.0;
      } else {
        const Solution<T> ul{s.with_precision(low), solve_primal<T>(s, problem, {}, pattern).x};
        return galerkin_probe<double, T>(problem.grad_u, ud, ul);
      }
    });
    out.rows.push_back(row);
  }

  // Slope of -log2(error) against the level, i.e. against log2(1/h).
  const int n = static_cast<int>(out.rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : out.rows) {
    const double x = r.level, y = -std::log2(r.l2_error);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  out.l2_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.rate_ok = out.l2_rate >= 1.8 && out.l2_rate <= 2.2;

  out.same_decays = true;
  for (int i = 2; i < n; ++i) {
    if (!(std::fabs(out.rows[i].probe_same) * 10.0 <= std::fabs(out.rows[i - 2].probe_same))) out.same_decays = false;
  }
  out.mixed_stalls = std::fabs(out.rows.back().probe_mixed) >= 1e3 * std::fabs(out.rows.back().probe_same);
  return out;
}

CsvTable ortho_table(const OrthoResult& r) {
  CsvTable t;
  t.header = {"level", "dofs", "l2_error", "probe_same_precision", "probe_mixed"};
  for (const auto& row : r.rows) {
    t.add({std::to_string(row.level), std::to_string(row.dofs), format_number(row.l2_error),
           format_number(row.probe_same), format_number(row.probe_mixed)});
  }
  return t;
}

// ---------------------------------------------------------------- adapt

AdaptPair run_adapt_pair(const Problem& problem, const Functional& J, const AdaptConfig& cfg) {
  AdaptConfig twin = cfg;
  twin.indicator = IndicatorKind::Residual;
  AdaptConfig main = cfg;
  main.indicator = IndicatorKind::Dwr;
  AdaptPair p{mpdwr_adapt(problem, J, main), {}};
  p.residual = mpdwr_adapt(problem, J, twin);
  return p;
}

std::optional<int> dofs_to_reach(const AdaptHistory& h, double tol) {
  for (const auto& r : h.records) {
    if (std::fabs(r.je) <= tol) return r.n_dofs;
  }
  return std::nullopt;
}

CsvTable ladder_table(const AdaptPair& p, const std::vector<double>& ladder) {
  CsvTable t;
  t.header = {"tol", "dofs_dwr", "dofs_residual"};
  for (double tol : ladder) {
    t.add({format_number(tol), cell(dofs_to_reach(p.dwr.history, tol)), cell(dofs_to_reach(p.residual.history, tol))});
  }
  return t;
}

// ---------------------------------------------------------------- compare-dual

std::vector<DualTiming> run_compare_dual(const Problem& problem, const Functional& J, const std::vector<int>& depths,
                                         int reps, const SolverOptions& dual_opts) {
  if (reps < 1) throw std::invalid_argument("run_compare_dual: reps must be >= 1");
  std::vector<DualTiming> out;
  for (int depth : depths) {
    if (depth < 0) throw std::invalid_argument("run_compare_dual: negative depth");
    Mesh m = unit_square_template();
    for (int i = 0; i < depth; ++i) m = global_refine(m);
    const auto mesh = std::make_shared<const Mesh>(std::move(m));
    const FESpace s = build_space(mesh, 1, Precision::Double);
    const Solution<double> uh = promote(
        Solution<float>{s.with_precision(Precision::Single), solve_primal<float>(s, problem, {}).x});
    const IndicatorField res = residual_indicator(uh, problem.f);

    for (DualMethod method : {DualMethod::Approach1, DualMethod::Approach2, DualMethod::MpDwr}) {
      DualTiming row;
      row.depth = depth;
      row.method = method;
      row.dofs = s.n_dofs();
      row.elements = mesh->n_elements();
      std::vector<double> times;
      double sink = 0.0;
      for (int k = 0; k < reps; ++k) {
        const auto t0 = clock::now();
        IndicatorField eta;
        if (method == DualMethod::MpDwr) {
          auto w = dual_solve_mpdwr<double>(s, J, dual_opts);
          row.dual_dofs = static_cast<int>(w.x.size());
          eta = dwr_indicator(res, Solution<double>{s, std::move(w.x)});
        } else {
          auto d = method == DualMethod::Approach1 ? dual_solve_approach1(mesh, J, dual_opts)
                                                   : dual_solve_approach2(mesh, J, dual_opts);
          row.dual_dofs = d.fine.space.n_dofs();
          eta = dwr_indicator(res, d.restricted);
        }
        times.push_back(seconds_since(t0));
        sink += eta.total();
      }
      if (!std::isfinite(sink)) throw std::runtime_error("run_compare_dual: non-finite indicator");
      row.seconds = median(times);
      out.push_back(row);
    }
  }
  return out;
}

CsvTable compare_dual_table(const std::vector<DualTiming>& rows) {
  CsvTable t;
  t.header = {"depth", "method", "dofs", "elements", "dual_dofs", "seconds"};
  for (const auto& r : rows) {
    t.add({std::to_string(r.depth), std::string(to_string(r.method)), std::to_string(r.dofs),
           std::to_string(r.elements), std::to_string(r.dual_dofs), format_number(r.seconds)});
  }
  return t;
}

// ---------------------------------------------------------------- bench

BenchRow bench_row(const std::string& method, const AdaptHistory& h) {
  BenchRow b;
  b.method = method;
  b.final_dofs = h.records.back().n_dofs;
  b.iterations = static_cast<int>(h.records.size());
  b.je = h.records.back().je;
  for (const auto& r : h.records) {
    b.t_primal += r.t_primal;
    b.t_dual += r.t_dual;
    b.t_indicator += r.t_indicator;
    b.t_refine += r.t_refine;
  }
  b.t_post = h.t_post;
  b.total = h.total_time();
  b.post_share = b.total > 0.0 ? b.t_post / b.total : 0.0;
  b.l2_primal = h.l2_primal_final;
  b.l2_post = h.post_processed ? h.l2_post : h.l2_primal_final;
  return b;
}

std::vector<BenchRow> run_bench(const Problem& problem, const Functional& J, const AdaptConfig& cfg) {
  AdaptConfig mp = cfg;
  mp.dual_method = DualMethod::MpDwr;
  mp.indicator = IndicatorKind::Dwr;
  AdaptConfig classic = cfg;
  classic.dual_method = DualMethod::Approach1;
  classic.indicator = IndicatorKind::Dwr;
  classic.primal_precision = Precision::Double;
  classic.dual_precision = Precision::Double;
  classic.post_process = false;
  return {bench_row("mpdwr", mpdwr_adapt(problem, J, mp).history),
          bench_row("approach1", mpdwr_adapt(problem, J, classic).history)};
}

CsvTable bench_table(const std::vector<BenchRow>& rows) {
  CsvTable t;
  t.header = {"method", "final_dofs", "iterations", "je", "t_primal", "t_dual", "t_indicator",
              "t_refine", "t_post", "total", "post_share", "l2_primal", "l2_post"};
  for (const auto& r : rows) {
    t.add({r.method, std::to_string(r.final_dofs), std::to_string(r.iterations), format_number(r.je),
           format_number(r.t_primal), format_number(r.t_dual), format_number(r.t_indicator),
           format_number(r.t_refine), format_number(r.t_post), format_number(r.total),
           format_number(r.post_share), format_number(r.l2_primal), format_number(r.l2_post)});
  }
  return t;
}

// ---------------------------------------------------------------- microbench

namespace {

volatile double g_one = 1.0;

template <class T>
T accumulate_pi(long n) {
  T acc = 0;
  for (long i = 0; i < n; ++i) {
    const T x = static_cast<T>(g_one);
    acc += T(4) * std::atan(x);
  }
  return acc;
}

}  // namespace

MicrobenchResult run_microbench(long n, int reps) {
  if (n < 1 || reps < 1) throw std::invalid_argument("run_microbench: n and reps must be positive");
  MicrobenchResult r;
  r.n = n;
  std::vector<double> td, ts;
  for (int k = 0; k < reps; ++k) {
    auto t0 = clock::now();
    r.acc_double = accumulate_pi<double>(n);
    td.push_back(seconds_since(t0));
    t0 = clock::now();
    r.acc_single = accumulate_pi<float>(n);
    ts.push_back(seconds_since(t0));
  }
  // Scheduling noise only ever adds time, so the fastest run is the estimate.
  r.t_double = *std::min_element(td.begin(), td.end());
  r.t_single = *std::min_element(ts.begin(), ts.end());
  return r;
}

CsvTable microbench_table(const MicrobenchResult& r) {
  CsvTable t;
  t.meta = {{"n", std::to_string(r.n)}};
  t.header = {"precision", "seconds", "accumulator", "relative_error"};
  const double exact = static_cast<double>(r.n) * 3.14159265358979323846;
  t.add({"double", format_number(r.t_double), format_number(r.acc_double),
         format_number(std::fabs(r.acc_double - exact) / exact)});
  t.add({"single", format_number(r.t_single), format_number(r.acc_single),
         format_number(std::fabs(r.acc_single - exact) / exact)});
  t.add({"ratio", format_number(r.ratio()), "", ""});
  return t;
}

// ---------------------------------------------------------------- limit

LimitResult run_limit(const Problem& problem, const Functional& J, AdaptConfig cfg) {
  cfg.stop_at_volume_guard = false;
  cfg.post_process = false;
  cfg.indicator = IndicatorKind::Dwr;
  cfg.dual_method = DualMethod::MpDwr;
  LimitResult out;
  cfg.primal_precision = Precision::Single;
  cfg.dual_precision = Precision::Double;
  out.single_run = mpdwr_adapt(problem, J, cfg);
  cfg.primal_precision = Precision::Double;
  cfg.dual_precision = Precision::Single;
  out.double_run = mpdwr_adapt(problem, J, cfg);
  out.single_diag = limit_monitor(out.single_run.history, cfg.min_volume_guard);
  out.double_diag = limit_monitor(out.double_run.history, cfg.min_volume_guard);
  return out;
}

CsvTable limit_table(const LimitResult& r) {
  CsvTable t;
  t.header = {"iter", "dofs_single", "l2_single", "je_single", "min_vol_single",
              "dofs_double", "l2_double", "je_double", "min_vol_double"};
  const auto& a = r.single_run.history.records;
  const auto& b = r.double_run.history.records;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (const auto* h : {&a, &b}) {
      if (i < h->size()) {
        const auto& x = (*h)[i];
        row.insert(row.end(), {std::to_string(x.n_dofs), format_number(x.l2_error), format_number(x.je),
                               format_number(x.min_volume)});
      } else {
        row.insert(row.end(), 4, std::string());
      }
    }
    t.add(std::move(row));
  }
  return t;
}

bool stagnates(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  return !(v[n - 3] > v[n - 2] && v[n - 2] > v[n - 1]);
}

}  // namespace mpdwr
