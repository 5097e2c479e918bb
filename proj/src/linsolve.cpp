#include "mpdwr/linsolve.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace mpdwr {

double default_tolerance(Precision p) { return 100.0 * epsilon(p); }

namespace {

template <Real T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s = T(0);
  for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

template <Real T>
std::vector<double> widen(const std::vector<T>& x) {
  return {x.begin(), x.end()};
}

constexpr int kCheckpointEvery = 16;

}  // namespace

template <Real T>
SolveResult<T> pcg(const CsrMatrix<T>& A, std::span<const T> b, const SolverOptions& opts,
                   std::span<const T> x0) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const int n = A.n();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("pcg: size mismatch");

  SolveResult<T> out;
  SolveReport& rep = out.report;
  rep.precision = precision_of<T>;
  rep.tol = opts.tol > 0.0 ? opts.tol : default_tolerance(precision_of<T>);
  rep.maxit = opts.maxit > 0 ? opts.maxit : 10L * std::max(n, 1);
  auto finish = [&] {
    rep.wall_time = std::chrono::duration<double>(clock::now() - start).count();
  };

  std::vector<T>& x = out.x;
  if (!x0.empty()) {
    x.assign(x0.begin(), x0.end());
  } else {
    x.assign(n, T(0));
  }

  const double bnorm = promote(sqrt_of(dot<T>(b, b)));
  if (bnorm == 0.0) {
    x.assign(n, T(0));
    finish();
    return out;
  }

  std::vector<T> inv_diag(n);
  for (int i = 0; i < n; ++i) {
    const T d = A.at(i, i);
    inv_diag[i] = d != T(0) ? T(1) / d : T(1);
  }

  std::vector<T> r(n), z(n), p(n), Ap(n);
  A.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double rel = promote(sqrt_of(dot<T>(r, r))) / bnorm;

  std::vector<T> best = x;
  double best_rel = rel;

  auto fail = [&](const std::string& why) {
    rep.final_relative_residual = best_rel;
    finish();
    throw SolveError("pcg (" + std::string(to_string(precision_of<T>)) + "): " + why + " after " +
                         std::to_string(rep.iterations) + " iterations",
                     rep, widen(best));
  };

  if (!std::isfinite(rel)) fail("non-finite initial residual");

  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  T rz = dot<T>(r, z);

  while (rel > rep.tol) {
    if (rep.iterations >= rep.maxit) fail("iteration limit reached");
    ++rep.iterations;
    A.multiply(p, Ap);
    const T pAp = dot<T>(p, Ap);
    if (!is_finite(pAp) || !(pAp > T(0))) fail("breakdown (p'Ap not positive and finite)");
    const T alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] = x[i] + alpha * p[i];
      r[i] = r[i] - alpha * Ap[i];
    }
    rel = promote(sqrt_of(dot<T>(r, r))) / bnorm;
    if (!std::isfinite(rel)) fail("non-finite residual");
    if (rep.iterations % kCheckpointEvery == 0 && rel < best_rel) {
      best = x;
      best_rel = rel;
    }
    if (rel <= rep.tol) break;
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const T rz_new = dot<T>(r, z);
    const T beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.final_relative_residual = rel;

  A.multiply(x, Ap);
  for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  rep.true_relative_residual = promote(sqrt_of(dot<T>(r, r))) / bnorm;
  finish();
  return out;
}

template SolveResult<half> pcg<half>(const CsrMatrix<half>&, std::span<const half>, const SolverOptions&,
                                     std::span<const half>);
template SolveResult<float> pcg<float>(const CsrMatrix<float>&, std::span<const float>,
                                       const SolverOptions&, std::span<const float>);
template SolveResult<double> pcg<double>(const CsrMatrix<double>&, std::span<const double>,
                                         const SolverOptions&, std::span<const double>);

}  // namespace mpdwr
