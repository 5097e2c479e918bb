#pragma once

// Jacobi-preconditioned conjugate gradients at the precision of the matrix.

#include "mpdwr/assembly.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpdwr {

struct SolverOptions {
  double tol = 0.0;  // <= 0: 100 * eps of the solve precision
  long maxit = 0;    // <= 0: 10 * n
};

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;  // recursive residual at exit
  double true_relative_residual = 0.0;   // ||b - A x|| / ||b|| recomputed at T
  double wall_time = 0.0;                // seconds
  double tol = 0.0;
  long maxit = 0;
  Precision precision = Precision::Double;
};

double default_tolerance(Precision p);

/// Thrown when the iteration limit is hit or a non-finite value appears.
/// Carries the best checkpointed iterate (promoted to binary64) and the
/// report.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolveReport report, std::vector<double> best)
      : std::runtime_error(what), report_(report), best_(std::move(best)) {}

  const SolveReport& report() const { return report_; }
  const std::vector<double>& best_iterate() const { return best_; }

 private:
  SolveReport report_;
  std::vector<double> best_;
};

template <Real T>
struct SolveResult {
  std::vector<T> x;
  SolveReport report;
};

/// Solves A x = b. `x0`, if non-empty, is the starting iterate.
template <Real T>
SolveResult<T> pcg(const CsrMatrix<T>& A, std::span<const T> b, const SolverOptions& opts = {},
                   std::span<const T> x0 = {});

}  // namespace mpdwr
