#include "doctest.h"

#include "mpdwr/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace mpdwr;

namespace {

AdaptConfig small_config() {
  AdaptConfig c;
  c.initial_refinements = 1;
  c.max_iter = 4;
  c.tol = 1e-12;
  return c;
}

IterationRecord rec(double l2, double vol, Precision p = Precision::Single) {
  IterationRecord r;
  r.l2_error = l2;
  r.min_volume = vol;
  r.primal_precision = p;
  return r;
}

}  // namespace

TEST_CASE("marking basics") {
  IndicatorField one{{0.0, 0.0, 3.0, 0.0}};
  CHECK(marking(one, 0.5) == std::vector<int>{2});
  IndicatorField uniform{std::vector<double>(7, 1.0)};
  CHECK(marking(uniform, 0.5).size() == 4);
  // Ties go to the lower index.
  CHECK(marking(uniform, 0.5) == std::vector<int>{0, 1, 2, 3});
  IndicatorField zero{std::vector<double>(5, 0.0)};
  CHECK(marking(zero, 0.5).empty());
  CHECK_THROWS_AS(marking(one, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(marking(one, 1.0), std::invalid_argument);
}

TEST_CASE("marking is the smallest bulk set, checked by enumeration") {
  std::mt19937 gen(77);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    IndicatorField ind;
    for (int i = 0; i < 10; ++i) ind.eta.push_back(d(gen));
    const double theta = 0.1 + 0.8 * d(gen);
    double total = 0.0;
    for (double v : ind.eta) total += v * v;
    std::size_t best = 11;
    double best_mass = 0.0;
    for (int mask = 0; mask < (1 << 10); ++mask) {
      double s = 0.0;
      std::size_t c = 0;
      for (int i = 0; i < 10; ++i) {
        if (mask & (1 << i)) {
          s += ind.eta[i] * ind.eta[i];
          ++c;
        }
      }
      if (s >= theta * total && (c < best || (c == best && s > best_mass))) {
        best = c;
        best_mass = s;
      }
    }
    const auto m = marking(ind, theta);
    CHECK(m.size() == best);
    double s = 0.0;
    for (int i : m) s += ind.eta[i] * ind.eta[i];
    CHECK(s == doctest::Approx(best_mass));
  }
}

TEST_CASE("configuration validation") {
  AdaptConfig c;
  CHECK_NOTHROW(c.validate());
  c.dual_precision = Precision::Single;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.same_precision_ok = true;
  CHECK_NOTHROW(c.validate());
  c = AdaptConfig{};
  c.marking_theta = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = AdaptConfig{};
  c.degree = 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = AdaptConfig{};
  c.indicator = IndicatorKind::Residual;
  c.dual_precision = Precision::Single;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("infinite tolerance stops after the first solve") {
  AdaptConfig c = small_config();
  c.tol = std::numeric_limits<double>::infinity();
  const auto r = mpdwr_adapt(problem_by_name("e1"), functional_by_name("j1"), c);
  REQUIRE(r.history.records.size() == 1);
  CHECK(r.history.stop_reason == "tolerance reached");
  CHECK_FALSE(r.history.records[0].dual_solved);
  CHECK(r.history.post_processed);
  CHECK(std::holds_alternative<Solution<float>>(r.primal));
}

TEST_CASE("goal error decreases on E4 with J3") {
  AdaptConfig c = small_config();
  c.initial_refinements = 2;
  c.max_iter = 6;
  const auto r = mpdwr_adapt(problem_by_name("e4"), functional_by_name("j3"), c);
  const auto& h = r.history.records;
  REQUIRE(h.size() == 7);
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k].n_dofs > h[k - 1].n_dofs);
  CHECK(std::fabs(h.back().je) < 0.25 * std::fabs(h.front().je));
  for (const auto& rr : h) {
    CHECK(rr.primal_precision == Precision::Single);
    CHECK(rr.dual_precision == Precision::Double);
  }
  CHECK(r.history.stop_reason == "iteration limit reached");
  CHECK(r.mesh->n_vertices() == h.back().n_dofs);
  CHECK(is_conforming(*r.mesh));
}

TEST_CASE("DWR indicator concentrates around the region of interest") {
  const auto mesh = std::make_shared<const Mesh>(initial_mesh(3));
  const FESpace s = build_space(mesh, 1, Precision::Single);
  const Problem p = problem_by_name("e4");
  const Functional J = functional_by_name("j3");
  auto u = solve_primal<float>(s, p, {});
  auto w = dual_solve_mpdwr<double>(s, J, {});
  const auto uh = promote(Solution<float>{s, u.x});
  const auto eta = dwr_indicator(residual_indicator(uh, p.f), Solution<double>{s.with_precision(Precision::Double), w.x});
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return eta.eta[a] > eta.eta[b]; });
  const int decile = eta.size() / 10;
  int near = 0;
  for (int k = 0; k < decile; ++k) {
    const auto c = mesh->corners(order[k]);
    const Point g{(c[0].x + c[1].x + c[2].x) / 3, (c[0].y + c[1].y + c[2].y) / 3};
    const double dx = std::max({J.region.x0 - g.x, 0.0, g.x - J.region.x1});
    const double dy = std::max({J.region.y0 - g.y, 0.0, g.y - J.region.y1});
    if (std::hypot(dx, dy) <= 0.3) ++near;
  }
  CHECK(2 * near >= decile);
}

TEST_CASE("primal and dual share one layout") {
  const auto mesh = std::make_shared<const Mesh>(initial_mesh(1));
  const FESpace s = build_space(mesh, 1, Precision::Single);
  const FESpace d = s.with_precision(Precision::Double);
  CHECK(s.dofs_ptr() == d.dofs_ptr());
  CHECK(s.dofs() == build_space(std::make_shared<const Mesh>(*mesh), 1, Precision::Double).dofs());
  auto pattern = std::make_shared<const SparsityPattern>(build_pattern(s.dofs()));
  const auto u = solve_primal<float>(s, problem_by_name("e1"), {}, pattern);
  const auto w = dual_solve_mpdwr<double>(d, functional_by_name("j2"), {}, pattern);
  CHECK(u.x.size() == w.x.size());
  CHECK(u.report.precision == Precision::Single);
  CHECK(w.report.precision == Precision::Double);
}

TEST_CASE("baseline duals") {
  const auto mesh = std::make_shared<const Mesh>(initial_mesh(1));
  const Functional J = functional_by_name("j3");
  const auto a1 = dual_solve_approach1(mesh, J);
  const auto a2 = dual_solve_approach2(mesh, J);
  const int nv = mesh->n_vertices();
  CHECK(a1.restricted.coefficients.size() == static_cast<std::size_t>(nv));
  CHECK(a2.restricted.coefficients.size() == static_cast<std::size_t>(nv));
  const double ratio = static_cast<double>(a1.fine.space.n_dofs()) / nv;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.2);
  CHECK(a2.fine.space.degree() == 2);
  // Both enriched duals agree with each other at the vertices.
  const FESpace s = build_space(mesh, 1, Precision::Double);
  const auto w = dual_solve_mpdwr<double>(s, J, {});
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < nv; ++i) {
    diff = std::max(diff, std::fabs(a1.restricted.coefficients[i] - a2.restricted.coefficients[i]));
    scale = std::max(scale, std::fabs(w.x[i]));
  }
  CHECK(diff < 0.1 * scale);
}

TEST_CASE("other dual methods drive the loop") {
  for (DualMethod m : {DualMethod::Approach1, DualMethod::Approach2}) {
    AdaptConfig c = small_config();
    c.max_iter = 2;
    c.dual_method = m;
    const auto r = mpdwr_adapt(problem_by_name("e3"), functional_by_name("j2"), c);
    CHECK(r.history.records.size() == 3);
    CHECK(r.history.records[0].dual_solved);
  }
}

TEST_CASE("estimated goal error tracks the exact one") {
  AdaptConfig c = small_config();
  c.je_mode = JeMode::Estimated;
  c.dual_method = DualMethod::Approach2;
  c.max_iter = 3;
  const Problem p = problem_by_name("e3");
  const Functional J = functional_by_name("j2");
  const auto r = mpdwr_adapt(p, J, c);
  const auto& last = r.history.records.back();
  const double exact = functional_error(J, p.u, promote(r.primal));
  CHECK(last.je == doctest::Approx(exact).epsilon(0.5));
}

TEST_CASE("post-processing improves on the single-precision primal") {
  AdaptConfig c = small_config();
  c.initial_refinements = 3;
  c.max_iter = 0;
  const auto r = mpdwr_adapt(problem_by_name("e1"), functional_by_name("j1"), c);
  REQUIRE(r.post.has_value());
  CHECK(r.history.post_processed);
  CHECK(r.history.l2_post <= r.history.l2_primal_final);
  CHECK(r.post->space.precision() == Precision::Double);
  CHECK(same_mesh(r.post->space, promote(r.primal).space));
}

TEST_CASE("revised pairing keeps the binary64 primal") {
  AdaptConfig c = small_config();
  c.max_iter = 2;
  const auto r = revised_mpdwr(problem_by_name("e4"), functional_by_name("j3"), c);
  CHECK(std::holds_alternative<Solution<double>>(r.primal));
  CHECK_FALSE(r.history.post_processed);
  for (const auto& rr : r.history.records) CHECK(rr.dual_precision == Precision::Single);
}

TEST_CASE("limit monitor") {
  AdaptHistory h;
  CHECK_FALSE(limit_monitor(h).volume_flag);
  h.records = {rec(1e-2, 1e-4), rec(5e-3, 1e-5), rec(2e-3, 1e-6)};
  auto d = limit_monitor(h);
  CHECK_FALSE(d.volume_flag);
  CHECK_FALSE(d.stagnation_flag);
  h.records.push_back(rec(2.5e-3, 5e-7));
  d = limit_monitor(h);
  CHECK(d.volume_flag);
  CHECK(d.stagnation_flag);
  CHECK(d.min_volume == 5e-7);
  for (auto& r : h.records) r.primal_precision = Precision::Double;
  CHECK_FALSE(limit_monitor(h).stagnation_flag);
  CHECK(limit_monitor(h, 1e-8).volume_flag == false);
}

TEST_CASE("cascade switches when forced") {
  AdaptConfig c = small_config();
  c.max_iter = 3;
  c.cascade_force_at = 1;
  c.post_process = false;
  const auto r = precision_cascade(problem_by_name("e1"), functional_by_name("j1"), c);
  CHECK(r.history.switched_after == 1);
  const auto& h = r.history.records;
  REQUIRE(h.size() == 4);
  CHECK(h[0].primal_precision == Precision::Half);
  CHECK(h[1].primal_precision == Precision::Half);
  CHECK(h[1].dual_precision == Precision::Single);
  CHECK(h[2].primal_precision == Precision::Single);
  CHECK(h[2].dual_precision == Precision::Double);
}

TEST_CASE("cascade that never switches matches the plain lower pair") {
  AdaptConfig c = small_config();
  c.max_iter = 1;
  c.post_process = false;
  const auto r = precision_cascade(problem_by_name("e1"), functional_by_name("j1"), c);
  AdaptConfig plain = c;
  plain.primal_precision = Precision::Half;
  plain.dual_precision = Precision::Single;
  const auto q = mpdwr_adapt(problem_by_name("e1"), functional_by_name("j1"), plain);
  REQUIRE(r.history.switched_after == -1);
  REQUIRE(r.history.records.size() == q.history.records.size());
  for (std::size_t k = 0; k < q.history.records.size(); ++k) {
    CHECK(r.history.records[k].n_dofs == q.history.records[k].n_dofs);
    CHECK(r.history.records[k].je == q.history.records[k].je);
  }
}
