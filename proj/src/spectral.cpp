#include "plgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "interior_ops.hpp"
#include "plgraph/rng.hpp"

namespace plgraph {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const EigenConfig& cfg) {
  if (!(cfg.tol > 0.0)) fail("tolerance must be positive");
  if (cfg.max_iter < 1) fail("iteration budget must be positive");
  if (cfg.restarts < 1) fail("restart count must be positive");
}

struct DescentState {
  std::vector<double> x;  // feasible iterate, psi(x) = 1
  double phi_value = 0.0;
  double grad_norm = 0.0;  // projected-gradient max-norm
  int iterations = 0;
  bool converged = false;
};

/// Rescales x so that psi(x) = 1; requires psi(x) > 0.
void renormalize(const detail::InteriorOps& ops, std::vector<double>& x) {
  const double ps = ops.psi(x);
  if (!(ps > 0.0)) throw std::logic_error("renormalization of an infeasible iterate");
  const double scale = std::pow(ps, -1.0 / ops.p());
  for (double& v : x) v *= scale;
}

/// Makes an arbitrary vector feasible by mixing in the indicator of a
/// positive-weight vertex, then normalizes.
void make_feasible(const detail::InteriorOps& ops, const std::vector<double>& k,
                   std::vector<double>& x) {
  if (ops.psi(x) > 0.0) {
    renormalize(ops, x);
    return;
  }
  int jpos = -1;
  for (int i = 0; i < ops.n(); ++i) {
    if (k[i] > 0.0) {
      jpos = i;
      break;
    }
  }
  if (jpos < 0) throw std::logic_error("weight admits no feasible function");
  double bump = 1.0;
  for (int attempt = 0; attempt < 64; ++attempt, bump *= 4.0) {
    std::vector<double> y = x;
    y[jpos] += bump;
    if (ops.psi(y) > 0.0) {
      x = std::move(y);
      renormalize(ops, x);
      return;
    }
  }
  throw std::logic_error("failed to reach the feasible region");
}

/// Projected-gradient descent of the Rayleigh quotient on the manifold
/// psi = 1. The step is a Barzilai-Borwein guess safeguarded by Armijo
/// backtracking on the renormalized energy.
DescentState descend(const detail::InteriorOps& ops, std::vector<double> x0, double tol,
                     int max_iter) {
  const int n = ops.n();
  DescentState st;
  st.x = std::move(x0);
  st.phi_value = ops.phi(st.x);

  std::vector<double> gphi(n), gpsi(n), dir(n), x_prev, dir_prev, trial(n);
  double step = 1.0;
  bool have_prev = false;

  for (; st.iterations < max_iter; ++st.iterations) {
    ops.grad_phi(st.x, gphi);
    ops.grad_psi(st.x, gpsi);
    const double gg = ops.mu_inner(gpsi, gpsi);
    const double coef = gg > 0.0 ? ops.mu_inner(gphi, gpsi) / gg : 0.0;
    for (int i = 0; i < n; ++i) dir[i] = gphi[i] - coef * gpsi[i];
    st.grad_norm = ops.max_abs(dir);
    if (st.grad_norm <= tol * std::max(1.0, std::abs(st.phi_value))) {
      st.converged = true;
      return st;
    }

    if (have_prev) {
      // Barzilai-Borwein step from the last displacement and gradient change.
      double sy = 0.0, yy = 0.0;
      for (int i = 0; i < n; ++i) {
        const double sx = st.x[i] - x_prev[i];
        const double yd = dir[i] - dir_prev[i];
        const double mu = ops.mu_interior(i);
        sy += mu * sx * yd;
        yy += mu * yd * yd;
      }
      if (sy > 0.0 && yy > 0.0) step = sy / yy;
    }
    step = std::clamp(step, 1e-16, 1e10);

    const double dd = ops.mu_inner(dir, dir);
    bool accepted = false;
    double s = step;
    for (int h = 0; h < 64; ++h, s *= 0.5) {
      for (int i = 0; i < n; ++i) trial[i] = st.x[i] - s * dir[i];
      const double ps = ops.psi(trial);
      if (!(ps > 0.0)) continue;
      const double rq = ops.phi(trial) / ps;  // energy after renormalization
      if (rq <= st.phi_value - 1e-4 * s * dd) {
        x_prev = st.x;
        dir_prev = dir;
        const double scale = std::pow(ps, -1.0 / ops.p());
        for (int i = 0; i < n; ++i) trial[i] *= scale;
        st.x = trial;
        st.phi_value = ops.phi(st.x);
        step = s * 2.0;
        have_prev = true;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // line search exhausted; leave converged = false
  }
  return st;
}

bool lexicographically_larger(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double av = std::abs(a[i]);
    const double bv = std::abs(b[i]);
    if (av != bv) return av > bv;
  }
  return false;
}

}  // namespace

EigenProblem make_eigen_problem(OperatorContext ctx, WeightField weight) {
  if (weight.size() != ctx.domain->interior_size()) {
    fail("weight does not cover the interior of the domain");
  }
  return EigenProblem{std::move(ctx), std::move(weight)};
}

double phi(const EigenProblem& prob, const VertexFunction& u) {
  return grad_p_integral(prob.ctx, u);
}

double psi(const EigenProblem& prob, const VertexFunction& u) {
  const DirichletDomain& d = *prob.ctx.domain;
  if (u.size() != d.closure_size()) fail("function does not match the domain closure");
  CompensatedSum s;
  for (int i = 0; i < d.interior_size(); ++i) {
    const int v = d.interior()[i];
    const double a = std::abs(u[d.closure_index(v)]);
    s.add(prob.ctx.graph->measure(v) * prob.weight[i] * detail::pow_half(a * a, prob.ctx.p));
  }
  return s.value();
}

double rayleigh(const EigenProblem& prob, const VertexFunction& u) {
  const double ps = psi(prob, u);
  if (!(ps > 0.0)) fail("infeasible test function: weighted p-mass is not positive");
  return phi(prob, u) / ps;
}

EigenResult solve_principal(const EigenProblem& prob, const EigenConfig& cfg) {
  check_config(cfg);
  const detail::InteriorOps ops(prob.ctx, &prob.weight.values());
  const std::vector<double>& k = prob.weight.values();
  const int n = ops.n();

  // Deterministic starts: indicators of the first positive-weight vertices.
  std::vector<std::vector<double>> starts;
  for (int i = 0; i < n && static_cast<int>(starts.size()) < 4; ++i) {
    if (k[i] > 0.0) {
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      starts.push_back(std::move(e));
    }
  }
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    starts.push_back(std::move(x));
  }

  EigenResult result;
  result.restarts_used = static_cast<int>(starts.size());
  DescentState best;
  bool have_best = false;
  for (auto& start : starts) {
    make_feasible(ops, k, start);
    DescentState st = descend(ops, std::move(start), cfg.tol, cfg.max_iter);
    result.iterations += st.iterations;
    result.restart_values.push_back(st.phi_value);
    const auto better = [&]() {
      if (!have_best) return true;
      if (st.converged != best.converged) return st.converged;
      const double tie = 1e-12 * std::max(1.0, std::abs(best.phi_value));
      if (st.phi_value < best.phi_value - tie) return true;
      if (st.phi_value > best.phi_value + tie) return false;
      return lexicographically_larger(st.x, best.x);
    };
    if (better()) {
      best = std::move(st);
      have_best = true;
    }
  }

  // The minimizer can be replaced by its componentwise absolute value
  // without raising the energy, so steer the iterate into the nonnegative
  // cone and re-descend until that is stable.
  std::vector<double> x = best.x;
  bool converged = best.converged;
  for (int round = 0; round < 3; ++round) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::abs(x[i]);
    renormalize(ops, y);
    if (ops.phi(y) <= ops.phi(x) * (1.0 + 1e-12) + 1e-300) x = std::move(y);
    DescentState st = descend(ops, x, cfg.tol, cfg.max_iter);
    result.iterations += st.iterations;
    x = st.x;
    converged = st.converged;
    if (converged && *std::min_element(x.begin(), x.end()) >= 0.0) break;
  }

  double min_before = 0.0;  // boundary values are zero
  for (const double v : x) min_before = std::min(min_before, v);
  result.min_before_clamp = min_before;
  for (double& v : x) {
    if (v < 0.0 && v >= -1e-10) v = 0.0;
  }

  result.converged = converged;
  result.eigenfunction = ops.to_function(x);
  result.lambda1 = phi(prob, result.eigenfunction);
  result.psi_value = psi(prob, result.eigenfunction);
  result.residual = euler_lagrange_residual_norm(prob, result.lambda1, result.eigenfunction);
  return result;
}

namespace {

template <class F>
double golden_argmin(const F& f, double lo, double hi, int iters) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

double brute_force_oracle(const EigenProblem& prob, int grid) {
  if (grid < 100) fail("oracle grid must be at least 100");
  const detail::InteriorOps ops(prob.ctx, &prob.weight.values());
  const int n = ops.n();
  if (n > 3) fail("brute force oracle supports at most 3 interior vertices");

  std::vector<double> dir(n);
  const auto ratio = [&](const std::vector<double>& v) {
    const double ps = ops.psi(v);
    if (!(ps > 0.0)) return kInf;
    return ops.phi(v) / ps;
  };

  if (n == 1) {
    dir[0] = 1.0;
    return ratio(dir);
  }

  const double pi = 3.14159265358979323846;
  if (n == 2) {
    const auto at = [&](double theta) {
      dir[0] = std::cos(theta);
      dir[1] = std::sin(theta);
      return ratio(dir);
    };
    double best_theta = 0.0;
    double best = kInf;
    for (int j = 0; j < grid; ++j) {
      const double theta = pi * j / grid;
      const double val = at(theta);
      if (val < best) {
        best = val;
        best_theta = theta;
      }
    }
    const double w = pi / grid;
    const double refined = golden_argmin(at, best_theta - w, best_theta + w, 72);
    return std::min(best, at(refined));
  }

  // n == 3: sweep spherical angles, then alternate golden refinements.
  const int m_theta = grid;
  const int m_phi = grid / 2 + 1;
  const auto at = [&](double theta, double ang) {
    const double s = std::sin(ang);
    dir[0] = s * std::cos(theta);
    dir[1] = s * std::sin(theta);
    dir[2] = std::cos(ang);
    return ratio(dir);
  };
  double best = kInf, best_theta = 0.0, best_ang = pi / 2.0;
  const auto consider = [&](double theta, double ang) {
    const double val = at(theta, ang);
    if (val < best) {
      best = val;
      best_theta = theta;
      best_ang = ang;
    }
  };
  for (int j = 0; j < m_theta; ++j) {
    const double theta = 2.0 * pi * j / m_theta;
    for (int kk = 0; kk < m_phi; ++kk) {
      consider(theta, pi * kk / (m_phi - 1));
    }
  }
  // Coordinate axes, in case the feasible cone is narrower than a grid cell.
  consider(0.0, pi / 2.0);
  consider(pi / 2.0, pi / 2.0);
  consider(0.0, 0.0);

  double w_theta = 2.0 * pi / m_theta;
  double w_ang = pi / (m_phi - 1);
  for (int round = 0; round < 24; ++round) {
    best_theta = golden_argmin([&](double t) { return at(t, best_ang); }, best_theta - w_theta,
                               best_theta + w_theta, 72);
    best_ang = golden_argmin([&](double a) { return at(best_theta, a); }, best_ang - w_ang,
                             best_ang + w_ang, 72);
    w_theta *= 0.7;
    w_ang *= 0.7;
  }
  return std::min(best, at(best_theta, best_ang));
}

VertexFunction euler_lagrange_residual(const EigenProblem& prob, double lambda,
                                       const VertexFunction& u) {
  const DirichletDomain& d = *prob.ctx.domain;
  if (u.size() != d.closure_size()) fail("function does not match the domain closure");
  const VertexFunction lap = p_laplacian(prob.ctx, u);
  std::vector<double> r(d.closure_size(), 0.0);
  for (int i = 0; i < d.interior_size(); ++i) {
    const int ci = d.closure_index(d.interior()[i]);
    r[ci] = -lap[ci] - lambda * prob.weight[i] * detail::signed_power(u[ci], prob.ctx.p);
  }
  return VertexFunction::from_closure_values(d, std::move(r), true);
}

double euler_lagrange_residual_norm(const EigenProblem& prob, double lambda,
                                    const VertexFunction& u) {
  const VertexFunction r = euler_lagrange_residual(prob, lambda, u);
  double rmax = 0.0;
  for (const double v : r.values()) rmax = std::max(rmax, std::abs(v));
  double umax = 0.0;
  for (const double v : u.values()) umax = std::max(umax, std::abs(v));
  return rmax / std::max(1.0, std::pow(umax, prob.ctx.p - 1.0));
}

WeightMonotonicityReport verify_weight_monotonicity(const OperatorContext& ctx,
                                                    const WeightField& k1, const WeightField& k2,
                                                    const EigenConfig& cfg) {
  const int n = ctx.domain->interior_size();
  if (k1.size() != n || k2.size() != n) fail("weights do not cover the interior");
  for (int i = 0; i < n; ++i) {
    if (!(k1[i] < k2[i])) {
      fail("hypothesis violation: the second weight must exceed the first at every "
           "interior vertex");
    }
  }
  WeightMonotonicityReport rep;
  rep.first = solve_principal(make_eigen_problem(ctx, k1), cfg);
  rep.second = solve_principal(make_eigen_problem(ctx, k2), cfg);
  rep.lambda1_first = rep.first.lambda1;
  rep.lambda1_second = rep.second.lambda1;
  rep.margin = 10.0 * cfg.tol;
  const EigenProblem second = make_eigen_problem(ctx, k2);
  // The first eigenfunction is admissible for the larger weight and its
  // Rayleigh value there already sits strictly below lambda1 of the first.
  rep.test_function_bound = rayleigh(second, rep.first.eigenfunction);
  rep.pass = rep.lambda1_second < rep.lambda1_first - rep.margin;
  return rep;
}

DomainMonotonicityReport verify_domain_monotonicity(const OperatorContext& ctx,
                                                    const DirichletDomain& inner,
                                                    const DirichletDomain& outer,
                                                    const WeightField& weight_on_outer,
                                                    const EigenConfig& cfg) {
  if (weight_on_outer.size() != outer.interior_size()) {
    fail("weight does not cover the outer interior");
  }
  // The inner interior must be a proper subset of the outer interior.
  for (const int v : inner.interior()) {
    if (outer.interior_index(v) < 0) fail("inner interior is not contained in the outer interior");
  }
  if (inner.interior_size() >= outer.interior_size()) {
    fail("inner interior must be a proper subset of the outer interior");
  }

  std::vector<double> k_inner(inner.interior_size());
  for (int i = 0; i < inner.interior_size(); ++i) {
    k_inner[i] = weight_on_outer[outer.interior_index(inner.interior()[i])];
  }

  OperatorContext inner_ctx{ctx.graph, std::make_shared<const DirichletDomain>(inner), ctx.p};
  OperatorContext outer_ctx{ctx.graph, std::make_shared<const DirichletDomain>(outer), ctx.p};
  const EigenProblem inner_prob =
      make_eigen_problem(inner_ctx, WeightField::from_interior_values(inner, std::move(k_inner)));
  const EigenProblem outer_prob = make_eigen_problem(outer_ctx, weight_on_outer);

  const EigenResult inner_res = solve_principal(inner_prob, cfg);
  const EigenResult outer_res = solve_principal(outer_prob, cfg);

  // Zero-extension of the inner eigenfunction to the outer domain: values on
  // the inner interior, zero everywhere else.
  std::vector<double> ext(outer.interior_size(), 0.0);
  const std::vector<double> inner_vals = inner_res.eigenfunction.interior_values(inner);
  for (int i = 0; i < inner.interior_size(); ++i) {
    ext[outer.interior_index(inner.interior()[i])] = inner_vals[i];
  }
  const VertexFunction extended = VertexFunction::from_interior_values(outer, ext);

  DomainMonotonicityReport rep;
  rep.lambda1_inner = inner_res.lambda1;
  rep.lambda1_outer = outer_res.lambda1;
  rep.zero_extension_bound = rayleigh(outer_prob, extended);
  rep.tol = 100.0 * cfg.tol * std::max(1.0, inner_res.lambda1);
  rep.pass = rep.lambda1_outer <= rep.lambda1_inner + rep.tol;
  rep.inner = inner_res;
  rep.outer = outer_res;
  return rep;
}

}  // namespace plgraph
