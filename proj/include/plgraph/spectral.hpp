#pragma once

#include <cstdint>
#include <vector>

#include "plgraph/calculus.hpp"

namespace plgraph {

/// Indefinite-weight principal eigenvalue problem for the p-Laplacian with
/// zero boundary values: minimize the p-Dirichlet energy over the weighted
/// unit sphere psi = 1.
struct EigenProblem {
  OperatorContext ctx;
  WeightField weight;
};

/// Validates that the weight covers the interior of the context's domain.
EigenProblem make_eigen_problem(OperatorContext ctx, WeightField weight);

/// p-Dirichlet energy of u.
double phi(const EigenProblem& prob, const VertexFunction& u);

/// Weighted p-mass of u: integral of K |u|^p over the interior.
double psi(const EigenProblem& prob, const VertexFunction& u);

/// phi/psi; requires psi(u) > 0.
double rayleigh(const EigenProblem& prob, const VertexFunction& u);

struct EigenConfig {
  double tol = 1e-10;     // projected-gradient max-norm target, relative to phi
  int max_iter = 100000;  // iteration budget per restart
  int restarts = 16;      // random restarts on top of deterministic starts
  std::uint64_t seed = 0;
};

struct EigenResult {
  double lambda1 = 0.0;
  VertexFunction eigenfunction;  // nonnegative, psi-normalized
  double residual = 0.0;         // scaled pointwise defect of the eigen equation
  int iterations = 0;            // descent iterations summed over restarts
  int restarts_used = 0;
  bool converged = false;
  double psi_value = 0.0;
  double min_before_clamp = 0.0;
  std::vector<double> restart_values;  // final Rayleigh value of each restart
};

/// Projected-gradient minimization of the Rayleigh quotient over the
/// constraint manifold, multi-start. The eigenfunction is returned
/// nonnegative (the minimizer can be flipped componentwise without raising
/// the energy) and the smallest value over restarts wins; near-ties are
/// broken toward the lexicographically largest value vector.
EigenResult solve_principal(const EigenProblem& prob, const EigenConfig& cfg = {});

/// Exhaustive reference for domains with at most 3 interior vertices: sweeps
/// directions on the unit sphere with `grid` points per angle (grid >= 100)
/// and refines the best cell by golden section. Error is O(grid^-2).
double brute_force_oracle(const EigenProblem& prob, int grid);

/// Pointwise defect of the eigen equation -Lap_p u = lambda K |u|^{p-2} u at
/// interior vertices, zero on the boundary.
VertexFunction euler_lagrange_residual(const EigenProblem& prob, double lambda,
                                       const VertexFunction& u);

/// Max-norm of the defect scaled by max(1, ||u||_inf^{p-1}).
double euler_lagrange_residual_norm(const EigenProblem& prob, double lambda,
                                    const VertexFunction& u);

struct WeightMonotonicityReport {
  double lambda1_first = 0.0;   // eigenvalue for the smaller weight
  double lambda1_second = 0.0;  // eigenvalue for the larger weight
  double margin = 0.0;
  double test_function_bound = 0.0;  // Rayleigh value of the first
                                     // eigenfunction under the second weight
  bool pass = false;
  EigenResult first;
  EigenResult second;
};

/// Strict decrease of the principal eigenvalue under a pointwise increase of
/// the weight. Requires k1 < k2 at every interior vertex.
WeightMonotonicityReport verify_weight_monotonicity(const OperatorContext& ctx,
                                                    const WeightField& k1, const WeightField& k2,
                                                    const EigenConfig& cfg = {});

struct DomainMonotonicityReport {
  double lambda1_inner = 0.0;
  double lambda1_outer = 0.0;
  double zero_extension_bound = 0.0;  // Rayleigh value on the outer domain of
                                      // the inner eigenfunction extended by 0
  double tol = 0.0;
  bool pass = false;
  EigenResult inner;
  EigenResult outer;
};

/// Monotonicity of the principal eigenvalue under domain inclusion: the
/// inner interior must be a proper subset of the outer interior, and the
/// weight is given on the outer interior. Zero-extension of the inner
/// eigenfunction certifies the comparison.
DomainMonotonicityReport verify_domain_monotonicity(const OperatorContext& ctx,
                                                    const DirichletDomain& inner,
                                                    const DirichletDomain& outer,
                                                    const WeightField& weight_on_outer,
                                                    const EigenConfig& cfg = {});

}  // namespace plgraph
