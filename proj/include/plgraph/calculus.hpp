#pragma once

#include <cstdint>
#include <memory>

#include "plgraph/graph.hpp"

namespace plgraph {

/// Exponent regularization used for p < 2: |grad u|^{p-2} is evaluated as
/// (Gamma(u,u) + eps^2)^{(p-2)/2} to keep the negative power finite at flat
/// spots. Reports must quote this value whenever p < 2.
inline constexpr double kGradRegularizationEpsilon = 1e-12;

/// Graph, domain and exponent shared by every differential operator.
struct OperatorContext {
  std::shared_ptr<const WeightedGraph> graph;
  std::shared_ptr<const DirichletDomain> domain;
  double p = 2.0;
};

/// Validates p > 1 and takes ownership of the graph/domain pair.
OperatorContext make_context(WeightedGraph graph, DirichletDomain domain, double p);

/// Normalized divergence-form Laplacian: at each interior vertex the weighted
/// sum of differences to the neighbors divided by the vertex measure. The
/// result carries zeros on the boundary.
VertexFunction mu_laplacian(const OperatorContext& ctx, const VertexFunction& u);

/// Gradient form Gamma(u,v): half the measure-normalized weighted sum of
/// difference products, at every closure vertex. Boundary vertices sum only
/// over neighbors inside the closure.
VertexFunction gamma(const OperatorContext& ctx, const VertexFunction& u, const VertexFunction& v);

/// Pointwise gradient length sqrt(Gamma(u,u)).
VertexFunction grad_length(const OperatorContext& ctx, const VertexFunction& u);

/// The p-Laplacian at interior vertices. For p == 2 the gradient
/// factor is the literal constant 1 and the result matches mu_laplacian
/// bit for bit.
VertexFunction p_laplacian(const OperatorContext& ctx, const VertexFunction& u);

/// Weighted form integral |grad u|^{p-2} Gamma(u, phi) over the closure.
/// phi must vanish on the boundary; by summation by parts this equals
/// -integral of (p_laplacian u) phi.
double weak_p_form(const OperatorContext& ctx, const VertexFunction& u, const VertexFunction& phi);

/// Integral of |grad u|^p over the closure (the p-Dirichlet energy).
double grad_p_integral(const OperatorContext& ctx, const VertexFunction& u);

/// Integral of |u|^p over the closure.
double lp_integral(const OperatorContext& ctx, const VertexFunction& u);

/// Lq norm over the closure; q may be infinity.
double lq_norm(const WeightedGraph& graph, const DirichletDomain& dom, const VertexFunction& u,
               double q);

/// Full Sobolev norm: (grad_p_integral + lp_integral)^{1/p}.
double w1p_norm(const OperatorContext& ctx, const VertexFunction& u);

/// Zero-boundary seminorm: grad_p_integral^{1/p}. Vanishes only on the zero
/// function within the Dirichlet class of a connected graph.
double w01p_seminorm(const OperatorContext& ctx, const VertexFunction& u);

/// Empirical constant for the embedding of the zero-boundary class into Lq:
/// the max of ||u||_Lq / seminorm over every interior indicator and `trials`
/// random Dirichlet samples. Deterministic for a fixed seed. Underestimates
/// the true constant.
double sobolev_constant_estimate(const OperatorContext& ctx, double q, int trials,
                                 std::uint64_t seed);

/// Exponential-integrability bound for unit-seminorm Dirichlet functions:
/// volume times exp(alpha c0 / mu_min)^{p/(p-1)} where mu_min is the smallest
/// vertex measure over the closure. Requires p > 2, alpha > 1, c0 > 0. The
/// bound is heuristic when c0 is an empirical estimate rather than a
/// certified embedding constant.
double trudinger_moser_bound(const OperatorContext& ctx, double alpha, double c0);

struct TmCheckReport {
  double c0 = 0.0;
  double bound = 0.0;
  double max_integral = 0.0;
  int samples = 0;
  int violations = 0;
};

/// Samples unit-seminorm Dirichlet functions and counts how many break the
/// exponential-integrability bound.
TmCheckReport trudinger_moser_check(const OperatorContext& ctx, double alpha, double c0,
                                    int samples, std::uint64_t seed);

struct LinfEmbeddingReport {
  double c_hat = 0.0;          // empirical embedding constant, q = p/(p-1)
  double c_hat_refined = 0.0;  // raised so the max-norm bound holds on all samples
  double max_sup_norm = 0.0;
  int samples = 0;
  int refinements = 0;  // samples that required raising c_hat
};

/// Checks the max-norm bound ||u||_inf <= c_hat / mu_min on sampled
/// unit-seminorm functions. The empirical c_hat can undershoot the true
/// embedding constant, so an exceeding sample refines c_hat instead of
/// counting as a failure.
LinfEmbeddingReport linf_embedding_check(const OperatorContext& ctx, int samples,
                                         std::uint64_t seed);

}  // namespace plgraph
