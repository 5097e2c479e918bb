#pragma once

// The experiments behind the command-line tool. Each returns plain data; the
// tool and the acceptance suite decide what to print.

#include "mpdwr/driver.hpp"
#include "mpdwr/report.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mpdwr {

/// Precision pair, quadrature degrees and solver tolerances of a run.
std::map<std::string, std::string> run_metadata(const AdaptConfig& cfg);

/// "single:double" and friends. Throws std::invalid_argument.
std::pair<Precision, Precision> parse_precision_pair(std::string_view s);

// Galerkin orthogonality under global refinement.

struct OrthoRow {
  int level = 0;
  int dofs = 0;
  double l2_error = 0.0;
  double probe_same = 0.0;   // a(u - u_dd, u_dd), binary64 throughout
  double probe_mixed = 0.0;  // a(u - u_dd, u_low), accumulated at the low precision
};

struct OrthoResult {
  std::vector<OrthoRow> rows;
  double l2_rate = 0.0;        // least-squares slope of log error against log(1/h)
  bool same_decays = false;    // |probe_same| drops 10x every two levels
  bool mixed_stalls = false;   // finest |probe_mixed| >= 1e3 finest |probe_same|
  bool rate_ok = false;        // l2_rate in [1.8, 2.2]

  bool pass() const { return same_decays && mixed_stalls && rate_ok; }
};

/// Levels 1..levels of global refinement of the template, P1.
OrthoResult run_ortho(const Problem& problem, int levels, Precision low = Precision::Single);

CsvTable ortho_table(const OrthoResult& r);

// Goal-oriented adaptation against a residual-driven twin.

struct AdaptPair {
  AdaptResult dwr;
  AdaptResult residual;
};

/// Same configuration twice, the second steered by the residual indicator.
AdaptPair run_adapt_pair(const Problem& problem, const Functional& J, const AdaptConfig& cfg);

/// DoFs of the first record with |J(e)| <= tol.
std::optional<int> dofs_to_reach(const AdaptHistory& h, double tol);

/// rung, dofs_dwr, dofs_residual; empty cells for rungs not reached.
CsvTable ladder_table(const AdaptPair& p, const std::vector<double>& ladder);

// Dual solve plus weighting, three ways, on globally refined meshes.

struct DualTiming {
  int depth = 0;
  DualMethod method = DualMethod::MpDwr;
  int dofs = 0;       // primal P1 DoFs
  int elements = 0;
  int dual_dofs = 0;  // size of the dual system
  double seconds = 0.0;  // median over the repetitions
};

/// The primal is solved once per depth (untimed); the timed section is the
/// dual solve and the DWR indicator built from it.
std::vector<DualTiming> run_compare_dual(const Problem& problem, const Functional& J,
                                         const std::vector<int>& depths, int reps,
                                         const SolverOptions& dual_opts = {});

CsvTable compare_dual_table(const std::vector<DualTiming>& rows);

// Whole-run timing.

struct BenchRow {
  std::string method;
  int final_dofs = 0;
  int iterations = 0;
  double je = 0.0;
  double t_primal = 0.0, t_dual = 0.0, t_indicator = 0.0, t_refine = 0.0, t_post = 0.0;
  double total = 0.0;
  double post_share = 0.0;
  double l2_primal = 0.0;
  double l2_post = 0.0;
};

BenchRow bench_row(const std::string& method, const AdaptHistory& h);

/// MP-DWR with post-processing, then the binary64 Approach 1 loop on the same
/// problem and tolerance.
std::vector<BenchRow> run_bench(const Problem& problem, const Functional& J, const AdaptConfig& cfg);

CsvTable bench_table(const std::vector<BenchRow>& rows);

// Arithmetic speed of the two formats.

struct MicrobenchResult {
  long n = 0;
  double t_double = 0.0, t_single = 0.0;
  double acc_double = 0.0, acc_single = 0.0;

  double ratio() const { return t_single / t_double; }
};

/// n accumulations of 4 atan(1), recomputed every time from a volatile input.
/// Times are the fastest of `reps` runs.
MicrobenchResult run_microbench(long n = 10'000'000, int reps = 5);

CsvTable microbench_table(const MicrobenchResult& r);

// Deep refinement with a single and a double primal.

struct LimitResult {
  AdaptResult single_run;
  AdaptResult double_run;
  LimitDiagnosis single_diag;
  LimitDiagnosis double_diag;
};

/// cfg.primal_precision is replaced by binary32 and binary64 in turn; the dual
/// takes the other of the two. The volume guard never stops these runs.
LimitResult run_limit(const Problem& problem, const Functional& J, AdaptConfig cfg);

/// Per iteration: dofs, l2, je and min_vol of the single run, then of the double run.
CsvTable limit_table(const LimitResult& r);

/// True if the last three values are not strictly decreasing.
bool stagnates(const std::vector<double>& v);

}  // namespace mpdwr
