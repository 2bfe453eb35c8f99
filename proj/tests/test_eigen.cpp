#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "plgraph/calculus.hpp"
#include "plgraph/graph.hpp"
#include "plgraph/rng.hpp"
#include "plgraph/spectral.hpp"

using namespace plgraph;

namespace {

EigenProblem path3_problem(double p, double k = 1.0) {
  auto [g, dom] = th::path3();
  OperatorContext ctx = make_context(std::move(g), dom, p);
  return make_eigen_problem(ctx, WeightField::from_interior_values(dom, {k}));
}

EigenProblem path4_problem(double p, double kb, double kc) {
  auto [g, dom] = th::path4();
  OperatorContext ctx = make_context(std::move(g), dom, p);
  return make_eigen_problem(ctx, WeightField::from_interior_values(dom, {kb, kc}));
}

}  // namespace

TEST_CASE("problem assembly validates the weight size") {
  auto [g3, dom3] = th::path3();
  auto [g4, dom4] = th::path4();
  OperatorContext ctx = make_context(g3, dom3, 2.0);
  WeightField k4 = WeightField::from_interior_values(dom4, {1.0, 1.0});
  CHECK_THROWS_WITH_AS(make_eigen_problem(ctx, k4),
                       "weight does not cover the interior of the domain",
                       std::invalid_argument);
}

TEST_CASE("rayleigh quotient closed forms and infeasibility") {
  for (const double p : {2.0, 3.0, 4.0}) {
    EigenProblem prob = path3_problem(p);
    const double t = 0.8;
    const VertexFunction u = VertexFunction::from_interior_values(*prob.ctx.domain, {t});
    CHECK(phi(prob, u) ==
          doctest::Approx(std::pow(2.0, 2.0 - p / 2.0) * std::pow(t, p)).epsilon(1e-14));
    CHECK(psi(prob, u) == doctest::Approx(2.0 * std::pow(t, p)).epsilon(1e-14));
    CHECK(rayleigh(prob, u) ==
          doctest::Approx(std::pow(2.0, 1.0 - p / 2.0)).epsilon(1e-14));
  }

  EigenProblem mixed = path4_problem(2.0, 1.0, -1.0);
  const VertexFunction on_neg =
      VertexFunction::from_interior_values(*mixed.ctx.domain, {0.0, 1.0});
  CHECK_THROWS_WITH_AS(rayleigh(mixed, on_neg),
                       "infeasible test function: weighted p-mass is not positive",
                       std::invalid_argument);
  CHECK_THROWS_AS(rayleigh(mixed, VertexFunction::zeros(*mixed.ctx.domain)),
                  std::invalid_argument);
}

TEST_CASE("solver configuration is validated") {
  EigenProblem prob = path3_problem(2.0);
  EigenConfig bad;
  bad.tol = 0.0;
  CHECK_THROWS_WITH_AS(solve_principal(prob, bad), "tolerance must be positive",
                       std::invalid_argument);
  bad = EigenConfig{};
  bad.max_iter = 0;
  CHECK_THROWS_WITH_AS(solve_principal(prob, bad), "iteration budget must be positive",
                       std::invalid_argument);
  bad = EigenConfig{};
  bad.restarts = 0;
  CHECK_THROWS_WITH_AS(solve_principal(prob, bad), "restart count must be positive",
                       std::invalid_argument);
}

TEST_CASE("principal pair closed forms on the 3-path") {
  for (const double p : {2.0, 3.0, 4.0}) {
    EigenProblem prob = path3_problem(p);
    const EigenResult res = solve_principal(prob);
    CHECK(res.converged);
    CHECK(res.lambda1 == doctest::Approx(std::pow(2.0, 1.0 - p / 2.0)).epsilon(1e-10));
    CHECK(res.eigenfunction.at(*prob.ctx.graph, *prob.ctx.domain, "b") ==
          doctest::Approx(std::pow(0.5, 1.0 / p)).epsilon(1e-10));
    CHECK(res.eigenfunction.dirichlet());
    CHECK(res.psi_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.min_before_clamp >= -1e-10);
    CHECK(res.residual <= 1e-10);
    CHECK(res.restarts_used >= 1);
    // The residual reported is the scaled defect of the eigen equation.
    CHECK(res.residual ==
          doctest::Approx(euler_lagrange_residual_norm(prob, res.lambda1, res.eigenfunction))
              .epsilon(1e-12));
  }
}

TEST_CASE("principal pair on the 4-path, definite and indefinite weights") {
  {
    EigenProblem prob = path4_problem(2.0, 1.0, 1.0);
    const EigenResult res = solve_principal(prob);
    CHECK(res.converged);
    CHECK(res.lambda1 == doctest::Approx(0.5).epsilon(1e-9));
    const double b = res.eigenfunction.at(*prob.ctx.graph, *prob.ctx.domain, "b");
    const double c = res.eigenfunction.at(*prob.ctx.graph, *prob.ctx.domain, "c");
    CHECK(b == doctest::Approx(c).epsilon(1e-7));  // symmetric ground state
    CHECK(b > 0.0);
    CHECK(brute_force_oracle(prob, 2000) == doctest::Approx(0.5).epsilon(1e-9));
  }
  {
    EigenProblem prob = path4_problem(2.0, 1.0, -1.0);
    const EigenResult res = solve_principal(prob);
    CHECK(res.converged);
    CHECK(res.lambda1 == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
    CHECK(res.eigenfunction.at(*prob.ctx.graph, *prob.ctx.domain, "b") ==
          doctest::Approx(0.7339449125096938).epsilon(1e-6));
    CHECK(res.eigenfunction.at(*prob.ctx.graph, *prob.ctx.domain, "c") ==
          doctest::Approx(0.19665994660545943).epsilon(1e-6));
    CHECK(brute_force_oracle(prob, 2000) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-8));
  }
}

TEST_CASE("hub-and-spokes closed form") {
  auto [g, dom] = th::star(4);
  OperatorContext ctx = make_context(std::move(g), dom, 3.0);
  EigenProblem prob = make_eigen_problem(ctx, WeightField::from_interior_values(dom, {2.0}));
  const EigenResult res = solve_principal(prob);
  // phi(t) = 8 (t/sqrt 2)^3, psi(t) = 8 t^3, so lambda1 = 2^{-3/2} = sqrt(2)/4.
  const double expect = std::sqrt(2.0) / 4.0;
  CHECK(res.converged);
  CHECK(res.lambda1 == doctest::Approx(expect).epsilon(1e-12));
  CHECK(brute_force_oracle(prob, 150) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("eigenvalue scales inversely with the weight") {
  Rng rng(61);
  WeightedGraph g = th::random_connected(rng, 9);
  DirichletDomain dom = th::random_interior(rng, g, 3);
  WeightField k = th::random_indefinite(rng, dom);
  OperatorContext ctx = make_context(std::move(g), dom, 3.0);
  const double base = solve_principal(make_eigen_problem(ctx, k)).lambda1;
  for (const double c : {0.5, 2.0, 10.0}) {
    std::vector<double> scaled = k.values();
    for (double& x : scaled) x *= c;
    const double lam =
        solve_principal(make_eigen_problem(ctx, WeightField::from_interior_values(dom, scaled)))
            .lambda1;
    CHECK(lam == doctest::Approx(base / c).epsilon(1e-8));
  }
}

TEST_CASE("rayleigh quotient is scale invariant and bounded below by lambda1") {
  Rng rng(67);
  WeightedGraph g = th::random_connected(rng, 8);
  DirichletDomain dom = th::random_interior(rng, g, 3);
  WeightField k = th::random_indefinite(rng, dom);
  OperatorContext ctx = make_context(g, dom, 2.5);
  EigenProblem prob = make_eigen_problem(ctx, k);
  const double lam = solve_principal(prob).lambda1;

  int feasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const VertexFunction u = th::random_dirichlet(rng, dom);
    double ps = 0.0;
    for (int i = 0; i < dom.interior_size(); ++i) {
      const int ci = dom.closure_index(dom.interior()[i]);
      ps += g.measure(dom.interior()[i]) * k[i] * std::pow(std::abs(u[ci]), ctx.p);
    }
    if (!(ps > 1e-12)) continue;
    ++feasible;
    const double r = rayleigh(prob, u);
    CHECK(lam <= r + 1e-9 * std::max(1.0, std::abs(r)));
    std::vector<double> scaled = u.values();
    for (double& x : scaled) x *= 7.25;
    const double r2 =
        rayleigh(prob, VertexFunction::from_closure_values(dom, std::move(scaled), true));
    CHECK(r2 == doctest::Approx(r).epsilon(1e-11));
  }
  CHECK(feasible > 100);  // the sweep actually exercised the bound
}

TEST_CASE("objective derivatives match finite differences") {
  Rng rng(71);
  for (const double p : {2.0, 3.0, 4.0}) {
    WeightedGraph g = th::random_connected(rng, 10);
    DirichletDomain dom = th::random_interior(rng, g, 4);
    OperatorContext ctx = make_context(g, dom, p);
    EigenProblem prob = make_eigen_problem(ctx, th::random_indefinite(rng, dom));
    for (int trial = 0; trial < 10; ++trial) {
      const VertexFunction u = th::random_dirichlet(rng, dom);
      const VertexFunction v = th::random_dirichlet(rng, dom);
      const double h = 1e-6;
      std::vector<double> up = u.values(), um = u.values();
      for (int ci = 0; ci < u.size(); ++ci) {
        up[ci] += h * v[ci];
        um[ci] -= h * v[ci];
      }
      const VertexFunction upf = VertexFunction::from_closure_values(dom, std::move(up), true);
      const VertexFunction umf = VertexFunction::from_closure_values(dom, std::move(um), true);

      const double dphi_fd = (phi(prob, upf) - phi(prob, umf)) / (2.0 * h);
      const double dphi = p * weak_p_form(ctx, u, v);
      CHECK(std::abs(dphi_fd - dphi) <= 1e-5 * std::max(1.0, std::abs(dphi)));

      const double dpsi_fd = (psi(prob, upf) - psi(prob, umf)) / (2.0 * h);
      double dpsi = 0.0;
      for (int i = 0; i < dom.interior_size(); ++i) {
        const int ci = dom.closure_index(dom.interior()[i]);
        dpsi += p * g.measure(dom.interior()[i]) * prob.weight[i] *
                std::pow(std::abs(u[ci]), p - 2.0) * u[ci] * v[ci];
      }
      CHECK(std::abs(dpsi_fd - dpsi) <= 1e-5 * std::max(1.0, std::abs(dpsi)));
    }
  }
}

TEST_CASE("pointwise equation defect") {
  {
    // At p = 4 the 3-path eigen equation holds for every multiple of the
    // indicator, so the defect vanishes identically.
    EigenProblem prob = path3_problem(4.0);
    for (const double t : {0.3, 1.0, 2.7}) {
      const VertexFunction u = VertexFunction::from_interior_values(*prob.ctx.domain, {t});
      CHECK(euler_lagrange_residual_norm(prob, 0.5, u) <= 1e-14);
    }
  }
  {
    EigenProblem prob = path3_problem(2.0);
    const VertexFunction u = VertexFunction::from_interior_values(*prob.ctx.domain, {1.0});
    const VertexFunction r = euler_lagrange_residual(prob, 0.9, u);
    CHECK(r.at(*prob.ctx.graph, *prob.ctx.domain, "b") == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(euler_lagrange_residual_norm(prob, 0.9, u) == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(r.dirichlet());
  }
}

TEST_CASE("oracle guards") {
  EigenProblem prob = path3_problem(2.0);
  CHECK_THROWS_WITH_AS(brute_force_oracle(prob, 99), "oracle grid must be at least 100",
                       std::invalid_argument);
  Rng rng(73);
  WeightedGraph g = th::random_connected(rng, 8);
  DirichletDomain dom = th::random_interior(rng, g, 4);
  WeightField k = th::random_indefinite(rng, dom);
  OperatorContext ctx = make_context(std::move(g), dom, 2.0);
  CHECK_THROWS_WITH_AS(brute_force_oracle(make_eigen_problem(ctx, k), 200),
                       "brute force oracle supports at most 3 interior vertices",
                       std::invalid_argument);
}

TEST_CASE("solver agrees with the exhaustive oracle on small random problems") {
  Rng rng(79);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 5 + rng.uniform_int(0, 4);
    WeightedGraph g = th::random_connected(rng, n);
    DirichletDomain dom = th::random_interior(rng, g, 2 + (trial % 2));
    WeightField k = th::random_indefinite(rng, dom);
    const double p = trial % 2 == 0 ? 2.0 : 3.0;
    OperatorContext ctx = make_context(std::move(g), dom, p);
    EigenProblem prob = make_eigen_problem(ctx, k);
    const EigenResult res = solve_principal(prob);
    const double oracle = brute_force_oracle(prob, 2000);
    CHECK(res.converged);
    CHECK(std::abs(res.lambda1 - oracle) <= 1e-5 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("weight monotonicity harness") {
  auto [g, dom] = th::path3();
  OperatorContext ctx = make_context(g, dom, 2.0);
  WeightField k1 = WeightField::from_interior_values(dom, {1.0});
  WeightField k2 = WeightField::from_interior_values(dom, {2.0});
  const WeightMonotonicityReport rep = verify_weight_monotonicity(ctx, k1, k2, {});
  CHECK(rep.pass);
  CHECK(rep.lambda1_first == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.lambda1_second == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.test_function_bound == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.lambda1_second <= rep.test_function_bound + 1e-12);
  CHECK(rep.first.converged);
  CHECK(rep.second.converged);
  CHECK(rep.margin == 10.0 * EigenConfig{}.tol);

  CHECK_THROWS_WITH_AS(
      verify_weight_monotonicity(ctx, k1, k1, {}),
      "hypothesis violation: the second weight must exceed the first at every interior vertex",
      std::invalid_argument);

  auto [g4, dom4] = th::path4();
  OperatorContext ctx4 = make_context(g4, dom4, 2.0);
  WeightField k41 = WeightField::from_interior_values(dom4, {1.0, -1.0});
  WeightField k42 = WeightField::from_interior_values(dom4, {2.0, -1.0});
  CHECK_THROWS_AS(verify_weight_monotonicity(ctx4, k41, k42, {}), std::invalid_argument);
  WeightField k43 = WeightField::from_interior_values(dom4, {2.0, -0.5});
  CHECK(verify_weight_monotonicity(ctx4, k41, k43, {}).pass);
}

TEST_CASE("domain monotonicity harness") {
  auto [g, outer] = th::path4();
  DirichletDomain inner(g, {"b"});
  OperatorContext ctx = make_context(g, outer, 2.0);
  WeightField k = WeightField::from_interior_values(outer, {1.0, 1.0});
  const DomainMonotonicityReport rep = verify_domain_monotonicity(ctx, inner, outer, k, {});
  CHECK(rep.pass);
  CHECK(rep.lambda1_inner == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.lambda1_outer == doctest::Approx(0.5).epsilon(1e-10));
  // The inner eigenfunction extended by zero is feasible on the larger
  // domain and reproduces its energy there exactly.
  CHECK(rep.zero_extension_bound == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.lambda1_outer <= rep.zero_extension_bound + 1e-12);
  CHECK(rep.inner.converged);
  CHECK(rep.outer.converged);

  DirichletDomain off(g, {"a"});
  CHECK_THROWS_WITH_AS(verify_domain_monotonicity(ctx, off, outer, k, {}),
                       "inner interior is not contained in the outer interior",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(verify_domain_monotonicity(ctx, outer, outer, k, {}),
                       "inner interior must be a proper subset of the outer interior",
                       std::invalid_argument);
  auto [g3, dom3] = th::path3();
  WeightField small = WeightField::from_interior_values(dom3, {1.0});
  CHECK_THROWS_WITH_AS(verify_domain_monotonicity(ctx, inner, outer, small, {}),
                       "weight does not cover the outer interior", std::invalid_argument);

  auto [sg, souter] = th::star(5);
  (void)souter;
  DirichletDomain wide(sg, {"hub", "leaf0"});
  DirichletDomain narrow(sg, {"hub"});
  OperatorContext sctx = make_context(sg, wide, 3.0);
  WeightField sk = WeightField::from_interior_values(wide, {1.0, 0.5});
  const DomainMonotonicityReport srep = verify_domain_monotonicity(sctx, narrow, wide, sk, {});
  CHECK(srep.pass);
  CHECK(srep.lambda1_outer <= srep.lambda1_inner + 1e-9);
}

TEST_CASE("repeated solves are bitwise identical") {
  EigenProblem prob = path4_problem(3.0, 1.0, -0.7);
  EigenConfig cfg;
  cfg.seed = 42;
  const EigenResult a = solve_principal(prob, cfg);
  const EigenResult b = solve_principal(prob, cfg);
  CHECK(a.lambda1 == b.lambda1);
  CHECK(a.iterations == b.iterations);
  CHECK(a.restarts_used == b.restarts_used);
  CHECK(a.residual == b.residual);
  REQUIRE(a.eigenfunction.size() == b.eigenfunction.size());
  for (int ci = 0; ci < a.eigenfunction.size(); ++ci) {
    CHECK(a.eigenfunction[ci] == b.eigenfunction[ci]);
  }
  REQUIRE(a.restart_values.size() == b.restart_values.size());
  for (std::size_t i = 0; i < a.restart_values.size(); ++i) {
    CHECK(a.restart_values[i] == b.restart_values[i]);
  }
}
