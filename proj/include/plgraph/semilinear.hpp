#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "plgraph/spectral.hpp"

namespace plgraph {

/// Vertexwise source term f(x,t) with its primitive F(x,t). Only the
/// positive part of t feeds the source, so descent is pushed toward the
/// nonnegative cone. Construction validates the structural hypotheses
/// numerically: vanishing of f(x,t)/t^{p-1} at 0, the superlinearity
/// inequality 0 < theta F <= t f on a log grid [s0, 1e6], and subcritical
/// exponential growth at t = 1e3.
class Nonlinearity {
 public:
  /// f(x,t) = a(x) (t+)^{q-1}. An empty amplitude means a == 1. theta <= 0
  /// selects the default (p+q)/2.
  static Nonlinearity power(const DirichletDomain& dom, double p, double q,
                            std::vector<double> amplitude = {}, double theta = 0.0,
                            double s0 = 1.0);

  /// f(x,t) = a(x) (t+)^{q-1} exp(min(t,cap)^beta) with beta < p/(p-1); the
  /// cap keeps the exponent bounded. The primitive has no closed form and is
  /// integrated by composite Simpson up to the cap, exactly beyond it.
  static Nonlinearity exponential(const DirichletDomain& dom, double p, double q, double beta,
                                  double cap = 50.0, std::vector<double> amplitude = {},
                                  double theta = 0.0, double s0 = 1.0);

  double f(int interior_idx, double t) const;
  /// F(x,t) = integral of f(x,s) ds from 0 to t; zero for t <= 0.
  double primitive(int interior_idx, double t) const;

  double p() const { return p_; }
  double growth_q() const { return q_; }
  double theta() const { return theta_; }
  double s0() const { return s0_; }
  double beta() const { return beta_; }
  double cap() const { return cap_; }
  const std::vector<double>& amplitude() const { return a_; }
  const std::string& family() const { return family_; }

  /// Additive constant absorbing [0, s0] in the superlinearity bound:
  /// sum over the interior of mu(x) max_{s in [0,s0]} (F - f s / theta)+.
  /// Zero for the power family.
  double superlinearity_offset(const WeightedGraph& graph, const DirichletDomain& dom) const;

 private:
  Nonlinearity() = default;
  void validate_hypotheses() const;

  std::string family_;
  double p_ = 0.0;
  double q_ = 0.0;
  double theta_ = 0.0;
  double s0_ = 1.0;
  double beta_ = 0.0;  // exponential family only
  double cap_ = 0.0;   // exponential family only
  std::vector<double> a_;
};

struct MountainPassConfig {
  double lambda = 0.0;   // spectral parameter, must sit strictly inside (0, lambda1)
  int path_points = 33;  // >= 16
  double tol = 1e-8;     // gradient max-norm target, scaled by max(1, ||u||_inf^{p-1})
  int max_outer = 2000;
  int ring_samples = 64;  // sphere samples when certifying the geometry
  std::uint64_t seed = 0;
  EigenConfig eigen;  // settings for the embedded principal eigenvalue solve
};

/// Witness that the energy landscape has the two-sided shape the min-max
/// argument needs: a sphere of radius r (seminorm) on which the sampled
/// infimum of the energy is positive, and a far endpoint with negative
/// energy beyond it.
struct GeometryCertificate {
  double r = 0.0;
  double inf_ring = 0.0;
  VertexFunction u1;
  double j_u1 = 0.0;
  double lambda1 = 0.0;
  EigenResult eigen;  // principal pair generating the ray
};

/// Geometry certification ran out of budget; carries the best findings.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(const std::string& what, double best_r, double best_inf_ring)
      : std::runtime_error(what), best_r_(best_r), best_inf_ring_(best_inf_ring) {}
  double best_r() const { return best_r_; }
  double best_inf_ring() const { return best_inf_ring_; }

 private:
  double best_r_ = 0.0;
  double best_inf_ring_ = 0.0;
};

/// One outer iteration of the path deformation, recorded at the path
/// maximum before the descent step.
struct PathHistoryEntry {
  int outer = 0;
  double j_max = 0.0;
  double grad_norm = 0.0;     // max-norm of the energy gradient at the maximum
  double seminorm = 0.0;      // zero-boundary seminorm of the maximum point
  double grad_inner_u = 0.0;  // <grad, u> in the mu inner product
};

struct SolutionReport {
  VertexFunction solution;  // nonnegative after clamping
  double j_value = 0.0;     // energy of the returned solution
  double c = 0.0;           // min-max critical level reached by the path
  double residual = 0.0;    // scaled max-norm of the pointwise equation defect
  bool converged = false;
  int outer_iterations = 0;
  double lambda = 0.0;
  double lambda1 = 0.0;
  double negative_part_max = 0.0;  // ||u-||_inf before clamping
  GeometryCertificate geometry;
  std::vector<PathHistoryEntry> history;
};

/// Energy (1/p) phi - (lambda/p) psi - integral of F(x, u+).
double semilinear_energy(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                         const VertexFunction& u);

/// mu-metric gradient of the energy: the pointwise defect
/// -Lap_p u - lambda K |u|^{p-2} u - f(x, u+) at interior vertices. Its
/// max-norm doubles as the equation residual.
VertexFunction semilinear_gradient(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                                   const VertexFunction& u);

/// Certifies the two-sided landscape shape for cfg.lambda: solves the
/// principal eigenvalue problem (unless a precomputed result is supplied),
/// picks the ring radius from the energy maximum along the eigenfunction
/// ray, verifies a positive sampled infimum on the ring (shrinking the ring
/// if needed) and produces the negative-energy endpoint. Throws
/// GeometryError when no certificate is found within budget.
GeometryCertificate certify_geometry(const EigenProblem& prob, const Nonlinearity& nl,
                                     const MountainPassConfig& cfg,
                                     const EigenResult* precomputed = nullptr);

/// Min-max search for a critical point: deforms a discrete path from 0 to
/// the certificate endpoint by descending at the running maximum, smoothing
/// its neighbors, and reparameterizing by arc length, with a damped Newton
/// polish once the gradient is small. Non-convergence within max_outer
/// returns converged=false with diagnostics; it never throws for that.
SolutionReport mountain_pass_solve(const EigenProblem& prob, const Nonlinearity& nl,
                                   const MountainPassConfig& cfg,
                                   const EigenResult* precomputed = nullptr);

struct PositivityReport {
  double negative_sup = 0.0;     // ||u-||_inf
  double defect_pairing = 0.0;   // integral of u- times the equation defect
  double residual_after_clamp = 0.0;
  VertexFunction clamped;
};

/// Checks that a candidate solution is nonnegative up to roundoff:
/// ||u-||_inf <= 1e-8 max(1, ||u||_inf). Passing candidates are clamped to
/// the nonnegative cone and the equation residual is re-verified; a material
/// negative part throws ("solution not nonnegative").
PositivityReport positivity_check(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                                  const VertexFunction& u);

struct PsDiagnostics {
  double lhs_coefficient = 0.0;  // (1/p - 1/theta)(1 - lambda/lambda1)
  double c_empirical = 0.0;      // max over iterates of the compactness majorant
  double max_seminorm = 0.0;
  double final_seminorm = 0.0;
  bool bounded = true;            // every iterate obeys the majorant
  bool divergence_flag = false;   // iterates grew far beyond the final one
};

/// Post-hoc boundedness surrogate for the iterate sequence: checks
/// (1/p - 1/theta)(1 - lambda/lambda1) seminorm^p <= J + |<g,u>|/theta + c0
/// entry by entry, where c0 is the superlinearity offset of the source term.
PsDiagnostics ps_diagnostics(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                             double lambda1, const std::vector<PathHistoryEntry>& history);

}  // namespace plgraph
