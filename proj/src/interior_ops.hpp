#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plgraph/calculus.hpp"
#include "plgraph/summation.hpp"

namespace plgraph::detail {

/// g^{p/2} with fast paths for the exponents that dominate the workloads.
inline double pow_half(double g, double p) {
  if (p == 2.0) return g;
  if (p == 4.0) return g * g;
  if (p == 3.0) return g * std::sqrt(g);
  return std::pow(g, 0.5 * p);
}

/// |t|^{p-1} sign(t); continuous for p > 1.
inline double signed_power(double t, double p) {
  if (p == 2.0) return t;
  const double m = std::pow(std::abs(t), p - 1.0);
  return t < 0.0 ? -m : m;
}

/// Energy and gradient evaluations on interior coordinate vectors (the
/// boundary is implicitly zero). Gradients are taken in the mu-weighted
/// inner product on the interior, which turns pointwise defects and metric
/// gradients into the same object.
class InteriorOps {
 public:
  InteriorOps(const OperatorContext& ctx, const std::vector<double>* weight)
      : ctx_(ctx), k_(weight) {
    const WeightedGraph& g = *ctx.graph;
    const DirichletDomain& d = *ctx.domain;
    n_ = d.interior_size();
    nc_ = d.closure_size();
    mu_c_.resize(nc_);
    cadj_.resize(nc_);
    for (int ci = 0; ci < nc_; ++ci) {
      const int x = d.closure()[ci];
      mu_c_[ci] = g.measure(x);
      for (const Edge& e : g.neighbors(x)) {
        const int cj = d.closure_index(e.to);
        if (cj >= 0) cadj_[ci].push_back({cj, e.weight});
      }
    }
    int_ci_.resize(n_);
    mu_i_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      int_ci_[i] = d.closure_index(d.interior()[i]);
      mu_i_[i] = g.measure(d.interior()[i]);
    }
    uc_.assign(nc_, 0.0);
    gam_.assign(nc_, 0.0);
    w_.assign(nc_, 0.0);
  }

  int n() const { return n_; }
  double p() const { return ctx_.p; }
  double mu_interior(int i) const { return mu_i_[i]; }
  int closure_of_interior(int i) const { return int_ci_[i]; }
  const OperatorContext& ctx() const { return ctx_; }

  double mu_inner(const std::vector<double>& a, const std::vector<double>& b) const {
    CompensatedSum s;
    for (int i = 0; i < n_; ++i) s.add(mu_i_[i] * a[i] * b[i]);
    return s.value();
  }

  double max_abs(const std::vector<double>& a) const {
    double m = 0.0;
    for (const double x : a) m = std::max(m, std::abs(x));
    return m;
  }

  /// Dirichlet p-energy of the zero-extension of x.
  double phi(const std::vector<double>& x) const {
    fill_gamma(x);
    CompensatedSum s;
    for (int ci = 0; ci < nc_; ++ci) s.add(mu_c_[ci] * pow_half(gam_[ci], ctx_.p));
    return s.value();
  }

  double seminorm(const std::vector<double>& x) const {
    return std::pow(phi(x), 1.0 / ctx_.p);
  }

  /// Weighted p-mass; requires a weight.
  double psi(const std::vector<double>& x) const {
    const std::vector<double>& k = *k_;
    CompensatedSum s;
    for (int i = 0; i < n_; ++i) {
      const double a = std::abs(x[i]);
      s.add(mu_i_[i] * k[i] * pow_half(a * a, ctx_.p));
    }
    return s.value();
  }

  /// mu-metric gradient of phi: -p times the p-Laplacian at each interior
  /// vertex.
  void grad_phi(const std::vector<double>& x, std::vector<double>& out) const {
    p_laplacian(x, out);
    for (int i = 0; i < n_; ++i) out[i] *= -ctx_.p;
  }

  /// mu-metric gradient of psi: p K |x|^{p-2} x.
  void grad_psi(const std::vector<double>& x, std::vector<double>& out) const {
    const std::vector<double>& k = *k_;
    out.resize(n_);
    for (int i = 0; i < n_; ++i) out[i] = ctx_.p * k[i] * signed_power(x[i], ctx_.p);
  }

  /// p-Laplacian of the zero-extension of x, at interior vertices.
  void p_laplacian(const std::vector<double>& x, std::vector<double>& out) const {
    fill_gamma(x);
    fill_grad_power(ctx_.p);
    out.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const int ci = int_ci_[i];
      CompensatedSum s;
      for (const auto& [cj, wgt] : cadj_[ci]) {
        s.add(wgt * (w_[cj] + w_[ci]) * (uc_[cj] - uc_[ci]));
      }
      out[i] = s.value() / (2.0 * mu_c_[ci]);
    }
  }

  VertexFunction to_function(const std::vector<double>& x) const {
    return VertexFunction::from_interior_values(*ctx_.domain, x);
  }

 private:
  void fill_gamma(const std::vector<double>& x) const {
    for (int i = 0; i < n_; ++i) uc_[int_ci_[i]] = x[i];
    for (int ci = 0; ci < nc_; ++ci) {
      CompensatedSum s;
      for (const auto& [cj, wgt] : cadj_[ci]) {
        const double diff = uc_[cj] - uc_[ci];
        s.add(wgt * diff * diff);
      }
      gam_[ci] = s.value() / (2.0 * mu_c_[ci]);
    }
  }

  /// |grad|^{p-2} from the cached gamma values.
  void fill_grad_power(double p) const {
    if (p == 2.0) {
      for (int ci = 0; ci < nc_; ++ci) w_[ci] = 1.0;
      return;
    }
    if (p < 2.0) {
      const double eps2 = kGradRegularizationEpsilon * kGradRegularizationEpsilon;
      for (int ci = 0; ci < nc_; ++ci) w_[ci] = std::pow(gam_[ci] + eps2, 0.5 * (p - 2.0));
      return;
    }
    for (int ci = 0; ci < nc_; ++ci) w_[ci] = pow_half(gam_[ci], p - 2.0);
  }

  const OperatorContext& ctx_;
  const std::vector<double>* k_;
  int n_ = 0;
  int nc_ = 0;
  std::vector<double> mu_c_;
  std::vector<double> mu_i_;
  std::vector<int> int_ci_;
  std::vector<std::vector<std::pair<int, double>>> cadj_;
  mutable std::vector<double> uc_;
  mutable std::vector<double> gam_;
  mutable std::vector<double> w_;
};

}  // namespace plgraph::detail
