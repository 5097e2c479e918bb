#pragma once

// Adaptive loop with primal and dual solved at two precisions on one mesh,
// the classical dual-solve baselines, post-processing and the precision-limit
// diagnostics.

#include "mpdwr/assembly.hpp"
#include "mpdwr/estimator.hpp"
#include "mpdwr/fespace.hpp"
#include "mpdwr/linsolve.hpp"
#include "mpdwr/problems.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mpdwr {

enum class JeMode { Exact, Estimated };
enum class DualMethod { MpDwr, Approach1, Approach2 };
enum class IndicatorKind { Dwr, Residual };

std::string_view to_string(DualMethod m);
std::string_view to_string(IndicatorKind k);

struct AdaptConfig {
  Precision primal_precision = Precision::Single;
  Precision dual_precision = Precision::Double;
  int degree = 1;
  double tol = 1e-4;  // target |J(e)|
  int max_iter = 30;
  double marking_theta = 0.5;
  JeMode je_mode = JeMode::Exact;
  double min_volume_guard = 1e-6;
  bool stop_at_volume_guard = true;
  IndicatorKind indicator = IndicatorKind::Dwr;
  DualMethod dual_method = DualMethod::MpDwr;
  int generations = 1;           // bisections per marked element per iteration
  int initial_refinements = 2;   // global refinements of the template
  bool post_process = true;      // only when the primal is not binary64
  bool same_precision_ok = false;
  SolverOptions primal_solver;
  SolverOptions dual_solver;
  bool cascade = false;
  int cascade_force_at = -1;     // switch after this iteration, -1: never forced

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  int n_dofs = 0;
  int n_elements = 0;
  double je = 0.0;           // J(e) used by the stop test
  double eta_total = 0.0;    // total of the steering indicator
  double min_volume = 0.0;
  double t_primal = 0.0;
  double t_dual = 0.0;
  double t_indicator = 0.0;
  double t_refine = 0.0;
  Precision primal_precision = Precision::Single;
  Precision dual_precision = Precision::Double;
  int primal_iterations = 0;
  int dual_iterations = 0;
  bool dual_solved = false;
  double l2_error = 0.0;     // diagnostic, ||u - u_h||
};

struct AdaptHistory {
  std::vector<IterationRecord> records;
  std::string stop_reason;
  bool post_processed = false;
  double t_post = 0.0;
  int post_iterations = 0;
  double l2_primal_final = 0.0;
  double l2_post = 0.0;
  bool volume_flag = false;
  bool stagnation_flag = false;
  int switched_after = -1;   // cascade: last iteration run at the lower pair

  /// Sum of all timed phases, including post-processing.
  double total_time() const;
};

struct AdaptResult {
  std::shared_ptr<const Mesh> mesh;
  AnySolution primal;
  std::optional<Solution<double>> post;
  AdaptHistory history;
};

/// Initial mesh: template refined `initial_refinements` times.
Mesh initial_mesh(int initial_refinements);

template <Real T>
SolveResult<T> solve_primal(const FESpace& space, const Problem& problem, const SolverOptions& opts,
                            std::shared_ptr<const SparsityPattern> pattern = nullptr,
                            std::span<const T> x0 = {});

template <Real T>
SolveResult<T> dual_solve_mpdwr(const FESpace& space, const Functional& J, const SolverOptions& opts,
                                std::shared_ptr<const SparsityPattern> pattern = nullptr);

struct RefinedDual {
  Solution<double> fine;        // dual in the enlarged space
  Solution<double> restricted;  // nodal values at the original vertices, P1
  SolveReport report;
};

/// Dual on the globally refined mesh.
RefinedDual dual_solve_approach1(std::shared_ptr<const Mesh> mesh, const Functional& J,
                                 const SolverOptions& opts = {});

/// Dual in the degree-2 space on the same mesh.
RefinedDual dual_solve_approach2(std::shared_ptr<const Mesh> mesh, const Functional& J,
                                 const SolverOptions& opts = {});

/// Binary64 primal re-solve on the final mesh, started from `start` if given.
SolveResult<double> post_process(const FESpace& space, const Problem& problem,
                                 const Solution<double>* start = nullptr,
                                 const SolverOptions& opts = {},
                                 std::shared_ptr<const SparsityPattern> pattern = nullptr);

/// Doerfler marking: smallest set, by descending indicator with ties to the
/// lower index, whose squared sum reaches theta of the total.
std::vector<int> marking(const IndicatorField& ind, double theta);

struct LimitDiagnosis {
  bool volume_flag = false;
  bool stagnation_flag = false;
  double min_volume = 0.0;
};

/// (a) minimum element volume below `guard`; (b) for a primal below binary64,
/// the last three recorded L2 errors are not strictly decreasing.
LimitDiagnosis limit_monitor(const AdaptHistory& h, double guard = 1e-6);

AdaptResult mpdwr_adapt(const Problem& problem, const Functional& J, const AdaptConfig& cfg);

/// Primal in binary64, dual in binary32, no post-processing.
AdaptResult revised_mpdwr(const Problem& problem, const Functional& J, AdaptConfig cfg);

/// Starts at (half, single) and moves to (single, double) when the limit
/// monitor reports stagnation, a half-precision solve or assembly fails, or
/// at the forced iteration.
AdaptResult precision_cascade(const Problem& problem, const Functional& J, AdaptConfig cfg);

}  // namespace mpdwr
