#include "plgraph/semilinear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "interior_ops.hpp"
#include "plgraph/rng.hpp"
#include "plgraph/summation.hpp"

namespace plgraph {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Composite Simpson rule with a fixed even panel count; deterministic
/// left-to-right accumulation.
template <class F>
double simpson(const F& f, double a, double b, int panels) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / panels;
  CompensatedSum s;
  s.add(f(a));
  s.add(f(b));
  for (int i = 1; i < panels; ++i) s.add((i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h));
  return s.value() * h / 3.0;
}

}  // namespace

Nonlinearity Nonlinearity::power(const DirichletDomain& dom, double p, double q,
                                 std::vector<double> amplitude, double theta, double s0) {
  Nonlinearity nl;
  nl.family_ = "power";
  nl.p_ = p;
  nl.q_ = q;
  nl.theta_ = theta <= 0.0 ? 0.5 * (p + q) : theta;
  nl.s0_ = s0;
  nl.a_ = std::move(amplitude);
  if (nl.a_.empty()) nl.a_.assign(dom.interior_size(), 1.0);
  if (static_cast<int>(nl.a_.size()) != dom.interior_size()) {
    fail("amplitude does not cover the interior");
  }
  nl.validate_hypotheses();
  return nl;
}

Nonlinearity Nonlinearity::exponential(const DirichletDomain& dom, double p, double q, double beta,
                                       double cap, std::vector<double> amplitude, double theta,
                                       double s0) {
  Nonlinearity nl;
  nl.family_ = "exponential";
  nl.p_ = p;
  nl.q_ = q;
  nl.theta_ = theta <= 0.0 ? 0.5 * (p + q) : theta;
  nl.s0_ = s0;
  nl.beta_ = beta;
  nl.cap_ = cap;
  nl.a_ = std::move(amplitude);
  if (nl.a_.empty()) nl.a_.assign(dom.interior_size(), 1.0);
  if (static_cast<int>(nl.a_.size()) != dom.interior_size()) {
    fail("amplitude does not cover the interior");
  }
  if (p > 1.0 && !(beta > 0.0 && beta < p / (p - 1.0))) {
    fail("exponential rate must lie in (0, p/(p-1))");
  }
  if (!(cap > 0.0)) fail("exponent cap must be positive");
  if (!(std::pow(cap, beta) <= 690.0)) fail("exponent cap overflows double precision");
  nl.validate_hypotheses();
  return nl;
}

double Nonlinearity::f(int interior_idx, double t) const {
  if (t <= 0.0) return 0.0;
  const double base = a_[interior_idx] * std::pow(t, q_ - 1.0);
  if (beta_ == 0.0) return base;
  return base * std::exp(std::pow(std::min(t, cap_), beta_));
}

double Nonlinearity::primitive(int interior_idx, double t) const {
  if (t <= 0.0) return 0.0;
  const double a = a_[interior_idx];
  if (beta_ == 0.0) return a * std::pow(t, q_) / q_;
  const double head_end = std::min(t, cap_);
  const double head = simpson(
      [&](double s) {
        return s <= 0.0 ? 0.0 : std::pow(s, q_ - 1.0) * std::exp(std::pow(s, beta_));
      },
      0.0, head_end, 128);
  double tail = 0.0;
  if (t > cap_) {
    tail = std::exp(std::pow(cap_, beta_)) * (std::pow(t, q_) - std::pow(cap_, q_)) / q_;
  }
  return a * (head + tail);
}

void Nonlinearity::validate_hypotheses() const {
  if (!(p_ > 2.0)) fail("source term requires p > 2");
  if (!(q_ > p_)) fail("growth exponent must exceed p");
  if (!(theta_ > p_ && theta_ <= q_)) fail("superlinearity exponent must lie in (p, q]");
  if (!(s0_ > 0.0)) fail("superlinearity threshold must be positive");
  double amax = 0.0;
  for (const double a : a_) {
    if (!(a > 0.0)) fail("amplitude must be positive everywhere on the interior");
    amax = std::max(amax, a);
  }
  if (a_.empty()) return;  // no interior: nothing to sample

  // Vanishing to order p-1 at zero: f(t)/t^{p-1} small near t = 0.
  {
    const double t0 = 1e-6;
    const double ratio = amax * std::pow(t0, q_ - p_) *
                         (beta_ == 0.0 ? 1.0 : std::exp(std::pow(std::min(t0, cap_), beta_)));
    if (!(ratio <= 1e-3)) fail("source term does not vanish to order p-1 at zero");
  }

  // Superlinearity 0 < theta F(s) <= s f(s) on a log grid [s0, 1e6]; long
  // double keeps the largest grid points finite for steep growth.
  {
    const long double al = static_cast<long double>(amax);
    const auto f_ld = [&](long double s) -> long double {
      long double v = al * powl(s, static_cast<long double>(q_) - 1.0L);
      if (beta_ != 0.0) {
        v *= expl(powl(std::min(s, static_cast<long double>(cap_)),
                       static_cast<long double>(beta_)));
      }
      return v;
    };
    const auto primitive_ld = [&](long double s) -> long double {
      const long double ql = static_cast<long double>(q_);
      if (beta_ == 0.0) return al * powl(s, ql) / ql;
      const long double capl = static_cast<long double>(cap_);
      const long double head_end = std::min(s, capl);
      CompensatedSum acc;  // simpson in double is fine below the cap
      const int panels = 128;
      const double he = static_cast<double>(head_end);
      const double h = he / panels;
      acc.add(0.0);
      for (int i = 1; i <= panels; ++i) {
        const double x = i * h;
        const double w = i == panels ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc.add(w * std::pow(x, q_ - 1.0) * std::exp(std::pow(x, beta_)));
      }
      long double head = static_cast<long double>(acc.value() * h / 3.0) * al;
      if (s > capl) {
        head += al * expl(powl(capl, static_cast<long double>(beta_))) *
                (powl(s, ql) - powl(capl, ql)) / ql;
      }
      return head;
    };
    for (int j = 0; j <= 64; ++j) {
      const long double s =
          static_cast<long double>(s0_) *
          powl(static_cast<long double>(1e6 / s0_), static_cast<long double>(j) / 64.0L);
      const long double fv = f_ld(s);
      const long double big_f = primitive_ld(s);
      if (!std::isfinite(static_cast<double>(logl(fv + 1e-300L)))) {
        fail("source term overflows on the hypothesis grid");
      }
      if (!(static_cast<long double>(theta_) * big_f > 0.0L)) {
        fail("superlinearity fails: the primitive is not positive beyond the threshold");
      }
      if (!(static_cast<long double>(theta_) * big_f <= fv * s * (1.0L + 1e-12L))) {
        fail("superlinearity inequality fails on the sample grid");
      }
    }
  }

  // Subcritical exponential growth: log f(t) - 1.01 t^{p/(p-1)} very negative
  // at t = 1e3 (log space avoids overflow).
  {
    const double t = 1e3;
    double logf = std::log(amax) + (q_ - 1.0) * std::log(t);
    if (beta_ != 0.0) logf += std::pow(std::min(t, cap_), beta_);
    if (!(logf - 1.01 * std::pow(t, p_ / (p_ - 1.0)) <= std::log(1e-6))) {
      fail("exponential growth exceeds the subcritical rate");
    }
  }
}

double Nonlinearity::superlinearity_offset(const WeightedGraph& graph,
                                           const DirichletDomain& dom) const {
  if (static_cast<int>(a_.size()) != dom.interior_size()) {
    fail("source term does not match the domain");
  }
  CompensatedSum total;
  for (int i = 0; i < dom.interior_size(); ++i) {
    double worst = 0.0;
    for (int j = 0; j <= 64; ++j) {
      const double s = s0_ * j / 64.0;
      const double gap = primitive(i, s) - f(i, s) * s / theta_;
      worst = std::max(worst, gap);
    }
    total.add(graph.measure(dom.interior()[i]) * worst);
  }
  return total.value();
}

namespace {

/// Energy, gradient and geometry helpers on interior coordinate vectors.
class EnergyOps {
 public:
  EnergyOps(const EigenProblem& prob, const Nonlinearity& nl, double lambda)
      : ops_(prob.ctx, &prob.weight.values()), prob_(prob), nl_(nl), lambda_(lambda) {
    if (nl.p() != prob.ctx.p) fail("source term exponent does not match the operator context");
    if (static_cast<int>(nl.amplitude().size()) != ops_.n()) {
      fail("source term does not match the domain");
    }
  }

  const detail::InteriorOps& ops() const { return ops_; }
  int n() const { return ops_.n(); }
  double p() const { return ops_.p(); }

  double j(const std::vector<double>& x) const {
    CompensatedSum fsum;
    for (int i = 0; i < ops_.n(); ++i) fsum.add(ops_.mu_interior(i) * nl_.primitive(i, x[i]));
    const double p = ops_.p();
    return ops_.phi(x) / p - lambda_ * ops_.psi(x) / p - fsum.value();
  }

  void grad(const std::vector<double>& x, std::vector<double>& out) const {
    const std::vector<double>& k = prob_.weight.values();
    ops_.p_laplacian(x, out);
    for (int i = 0; i < ops_.n(); ++i) {
      out[i] = -out[i] - lambda_ * k[i] * detail::signed_power(x[i], ops_.p()) - nl_.f(i, x[i]);
    }
  }

  double grad_scale(const std::vector<double>& x) const {
    return std::max(1.0, std::pow(ops_.max_abs(x), ops_.p() - 1.0));
  }

  double seminorm(const std::vector<double>& x) const { return ops_.seminorm(x); }

 private:
  detail::InteriorOps ops_;
  const EigenProblem& prob_;
  const Nonlinearity& nl_;
  double lambda_;
};

/// One backtracking descent step along -g; returns whether a step was
/// accepted. step_mem carries the accepted step across calls. max_disp caps
/// the displacement in the mu metric: the energy is unbounded below, so the
/// decrease test alone would accept an arbitrarily long jump down the far
/// side, and a single such jump degenerates the whole path at the next
/// arc-length reparametrization.
bool armijo_step(const EnergyOps& E, std::vector<double>& x, const std::vector<double>& g,
                 double& step_mem, int budget, double max_disp) {
  const double gg = E.ops().mu_inner(g, g);
  if (!(gg > 0.0)) return false;
  const double j0 = E.j(x);
  std::vector<double> trial(x.size());
  double s = step_mem;
  const double gn = std::sqrt(gg);
  if (std::isfinite(max_disp) && s * gn > max_disp) s = max_disp / gn;
  for (int h = 0; h < budget; ++h, s *= 0.5) {
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - s * g[i];
    const double jt = E.j(trial);
    if (std::isfinite(jt) && jt <= j0 - 1e-4 * s * gg) {
      x = trial;
      step_mem = s * 2.0;
      return true;
    }
  }
  return false;
}

/// Damped Newton step on the stationarity system grad = 0, with a
/// finite-difference Jacobian. Accepts only a strict gradient-norm decrease
/// that stays on the mountain (positive energy, nonzero iterate).
bool newton_polish(const EnergyOps& E, std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> g(n), gp(n);
  E.grad(x, g);
  const double g0 = E.ops().max_abs(g);
  if (!(g0 > 0.0)) return false;

  Eigen::MatrixXd jac(n, n);
  std::vector<double> xh(n);
  for (int c = 0; c < n; ++c) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
    xh = x;
    xh[c] += h;
    E.grad(xh, gp);
    for (int r = 0; r < n; ++r) jac(r, c) = (gp[r] - g[r]) / h;
  }
  Eigen::VectorXd rhs(n);
  for (int r = 0; r < n; ++r) rhs(r) = -g[r];

  double nu = 1e-10 * std::max(1.0, jac.cwiseAbs().maxCoeff());
  std::vector<double> y(n);
  for (int attempt = 0; attempt < 10; ++attempt, nu *= 32.0) {
    Eigen::MatrixXd m = jac;
    for (int d = 0; d < n; ++d) m(d, d) += nu;
    const Eigen::VectorXd delta = m.partialPivLu().solve(rhs);
    if (!delta.allFinite()) continue;
    for (int i = 0; i < n; ++i) y[i] = x[i] + delta(i);
    E.grad(y, gp);
    const double g1 = E.ops().max_abs(gp);
    const double jy = E.j(y);
    if (g1 < 0.9 * g0 && std::isfinite(jy) && jy > 1e-12 && E.ops().max_abs(y) > 1e-10) {
      x = y;
      return true;
    }
  }
  return false;
}

/// Redistributes interior path nodes to uniform arc length in the mu metric,
/// keeping the endpoints fixed.
void reparametrize(const EnergyOps& E, std::vector<std::vector<double>>& pts) {
  const int count = static_cast<int>(pts.size());
  const int n = static_cast<int>(pts[0].size());
  std::vector<double> len(count, 0.0), diff(n);
  for (int j = 1; j < count; ++j) {
    for (int i = 0; i < n; ++i) diff[i] = pts[j][i] - pts[j - 1][i];
    len[j] = len[j - 1] + std::sqrt(E.ops().mu_inner(diff, diff));
  }
  const double total = len[count - 1];
  if (!(total > 0.0)) return;
  std::vector<std::vector<double>> fresh(count);
  fresh[0] = pts[0];
  fresh[count - 1] = pts[count - 1];
  int seg = 0;
  for (int j = 1; j < count - 1; ++j) {
    const double target = total * j / (count - 1);
    while (seg + 2 < count && len[seg + 1] < target) ++seg;
    const double span = len[seg + 1] - len[seg];
    const double t = span > 0.0 ? (target - len[seg]) / span : 0.0;
    std::vector<double> node(n);
    for (int i = 0; i < n; ++i) node[i] = (1.0 - t) * pts[seg][i] + t * pts[seg + 1][i];
    fresh[j] = std::move(node);
  }
  pts = std::move(fresh);
}

std::vector<double> interior_of(const VertexFunction& u, const DirichletDomain& dom) {
  return u.interior_values(dom);
}

}  // namespace

double semilinear_energy(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                         const VertexFunction& u) {
  if (u.size() != prob.ctx.domain->closure_size()) fail("function does not match the domain");
  if (!u.dirichlet()) fail("energy is defined on the zero-boundary class");
  const EnergyOps E(prob, nl, lambda);
  return E.j(interior_of(u, *prob.ctx.domain));
}

VertexFunction semilinear_gradient(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                                   const VertexFunction& u) {
  if (u.size() != prob.ctx.domain->closure_size()) fail("function does not match the domain");
  if (!u.dirichlet()) fail("energy is defined on the zero-boundary class");
  const EnergyOps E(prob, nl, lambda);
  std::vector<double> g;
  E.grad(interior_of(u, *prob.ctx.domain), g);
  return VertexFunction::from_interior_values(*prob.ctx.domain, g);
}

GeometryCertificate certify_geometry(const EigenProblem& prob, const Nonlinearity& nl,
                                     const MountainPassConfig& cfg,
                                     const EigenResult* precomputed) {
  GeometryCertificate cert;
  cert.eigen = precomputed ? *precomputed : solve_principal(prob, cfg.eigen);
  if (!cert.eigen.converged) {
    throw std::runtime_error("principal eigenvalue solve did not converge; cannot certify");
  }
  cert.lambda1 = cert.eigen.lambda1;
  if (!(cfg.lambda > 0.0 && cfg.lambda < cert.lambda1)) {
    fail("spectral parameter must lie strictly between 0 and lambda1");
  }
  const EnergyOps E(prob, nl, cfg.lambda);
  const int n = E.n();
  const double p = E.p();
  const std::vector<double> e1 = interior_of(cert.eigen.eigenfunction, *prob.ctx.domain);

  std::vector<double> scratch(n);
  const auto ray = [&](double t) {
    for (int i = 0; i < n; ++i) scratch[i] = t * e1[i];
    return E.j(scratch);
  };

  // Bracket the sign change of the ray energy, then take the ray maximum.
  double t_pos = 1.0;
  for (int i = 0; i < 200 && !(ray(t_pos) > 0.0); ++i) t_pos *= 0.5;
  if (!(ray(t_pos) > 0.0)) {
    throw GeometryError("ray energy is never positive near the origin", 0.0, 0.0);
  }
  double t_neg = t_pos;
  for (int i = 0; i < 200 && !(ray(t_neg) < 0.0); ++i) t_neg *= 2.0;
  if (!(ray(t_neg) < 0.0)) {
    throw GeometryError("ray energy never becomes negative", 0.0, 0.0);
  }
  const double gr = 0.6180339887498949;
  double a = 0.0, b = t_neg;
  double x1 = b - gr * b, x2 = gr * b;
  double f1 = -ray(x1), f2 = -ray(x2);
  for (int i = 0; i < 90; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = -ray(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = -ray(x2);
    }
  }
  const double t_hat = f1 <= f2 ? x1 : x2;
  if (!(ray(t_hat) > 0.0)) {
    throw GeometryError("ray energy has no positive maximum", 0.0, 0.0);
  }

  // Endpoint beyond the barrier: finite negative energy, well past the ring.
  double t1 = std::max(2.0 * t_hat, t_neg);
  {
    double lo = t_hat;
    for (int i = 0; i < 200 && !(ray(t1) < 0.0); ++i) {
      lo = t1;
      t1 *= 2.0;
    }
    for (int i = 0; i < 200 && !std::isfinite(ray(t1)); ++i) t1 = 0.5 * (lo + t1);
    if (!(ray(t1) < 0.0) || !std::isfinite(ray(t1))) {
      throw GeometryError("no finite negative-energy endpoint on the ray", 0.0, 0.0);
    }
  }
  std::vector<double> u1(n);
  for (int i = 0; i < n; ++i) u1[i] = t1 * e1[i];
  cert.u1 = E.ops().to_function(u1);
  cert.j_u1 = ray(t1);

  const double e1_seminorm = std::pow(cert.lambda1, 1.0 / p);
  double r = 0.5 * t_hat * e1_seminorm;

  std::vector<double> v(n), g(n), gphi(n), tangent(n);
  for (int shrink = 0; shrink < 48; ++shrink, r *= 0.5) {
    double inf_ring = kInf;
    std::vector<double> worst;
    const auto consider = [&](const std::vector<double>& cand) {
      const double val = E.j(cand);
      if (val < inf_ring) {
        inf_ring = val;
        worst = cand;
      }
    };
    // The ray direction itself, both signs.
    for (const double sign : {1.0, -1.0}) {
      for (int i = 0; i < n; ++i) v[i] = sign * (r / e1_seminorm) * e1[i];
      consider(v);
    }
    for (int s = 0; s < cfg.ring_samples; ++s) {
      Rng rng(Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(s)));
      double sn = 0.0;
      for (int attempt = 0; attempt < 16 && !(sn > 0.0); ++attempt) {
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        sn = E.seminorm(v);
      }
      if (!(sn > 0.0)) continue;
      for (int i = 0; i < n; ++i) v[i] *= r / sn;
      consider(v);
    }
    // Descend from the worst sample along the sphere to tighten the infimum.
    if (!worst.empty()) {
      std::vector<double> x = worst;
      double step = 1.0;
      for (int it = 0; it < 50; ++it) {
        E.grad(x, g);
        E.ops().grad_phi(x, gphi);  // normal direction of the seminorm sphere
        const double nn = E.ops().mu_inner(gphi, gphi);
        const double coef = nn > 0.0 ? E.ops().mu_inner(g, gphi) / nn : 0.0;
        for (int i = 0; i < n; ++i) tangent[i] = g[i] - coef * gphi[i];
        const double tt = E.ops().mu_inner(tangent, tangent);
        if (!(tt > 0.0)) break;
        const double j0 = E.j(x);
        bool accepted = false;
        double s = step;
        for (int h = 0; h < 40; ++h, s *= 0.5) {
          for (int i = 0; i < n; ++i) v[i] = x[i] - s * tangent[i];
          const double sn = E.seminorm(v);
          if (!(sn > 0.0)) continue;
          for (int i = 0; i < n; ++i) v[i] *= r / sn;
          if (E.j(v) <= j0 - 1e-4 * s * tt) {
            x = v;
            step = s * 2.0;
            accepted = true;
            break;
          }
        }
        if (!accepted) break;
      }
      inf_ring = std::min(inf_ring, E.j(x));
    }
    if (inf_ring > 0.0) {
      cert.r = r;
      cert.inf_ring = inf_ring;
      return cert;
    }
    if (shrink == 47) {
      throw GeometryError("mountain pass geometry not certified within budget", r, inf_ring);
    }
  }
  throw GeometryError("mountain pass geometry not certified within budget", r, 0.0);
}

SolutionReport mountain_pass_solve(const EigenProblem& prob, const Nonlinearity& nl,
                                   const MountainPassConfig& cfg, const EigenResult* precomputed) {
  if (cfg.path_points < 16) fail("path needs at least 16 points");
  if (!(cfg.tol > 0.0)) fail("tolerance must be positive");
  if (cfg.max_outer < 1) fail("outer iteration budget must be positive");

  SolutionReport rep;
  rep.geometry = certify_geometry(prob, nl, cfg, precomputed);
  rep.lambda = cfg.lambda;
  rep.lambda1 = rep.geometry.lambda1;

  const EnergyOps E(prob, nl, cfg.lambda);
  const int n = E.n();
  const int count = cfg.path_points;
  const std::vector<double> u1 = interior_of(rep.geometry.u1, *prob.ctx.domain);

  std::vector<std::vector<double>> pts(count, std::vector<double>(n, 0.0));
  for (int j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / (count - 1);
    for (int i = 0; i < n; ++i) pts[j][i] = t * u1[i];
  }

  std::vector<double> g(n);
  double step_mem = 1.0;
  double smooth_step = 1.0;
  int stall = 0;
  int final_idx = -1;
  bool converged = false;

  const auto argmax_j = [&]() {
    int m = 1;
    double best = -kInf;
    for (int j = 1; j < count - 1; ++j) {
      const double val = E.j(pts[j]);
      if (val > best) {
        best = val;
        m = j;
      }
    }
    return m;
  };

  const auto node_spacing = [&]() {
    std::vector<double> diff(n);
    double total = 0.0;
    for (int j = 1; j < count; ++j) {
      for (int i = 0; i < n; ++i) diff[i] = pts[j][i] - pts[j - 1][i];
      total += std::sqrt(E.ops().mu_inner(diff, diff));
    }
    return total / (count - 1);
  };

  int outer = 0;
  for (; outer < cfg.max_outer; ++outer) {
    const int m = argmax_j();
    const double spacing = node_spacing();
    const double max_disp = spacing > 0.0 ? 2.0 * spacing : kInf;
    const double jm = E.j(pts[m]);
    E.grad(pts[m], g);
    const double gnorm = E.ops().max_abs(g);
    const double scale = E.grad_scale(pts[m]);
    rep.history.push_back({outer, jm, gnorm, E.seminorm(pts[m]),
                           E.ops().mu_inner(g, pts[m])});
    if (gnorm <= cfg.tol * scale) {
      converged = true;
      final_idx = m;
      break;
    }

    bool moved = armijo_step(E, pts[m], g, step_mem, 60, max_disp);
    if (!moved || gnorm <= 1e-3 * scale || outer % 10 == 9) {
      moved = newton_polish(E, pts[m]) || moved;
    }
    if (moved) {
      stall = 0;
      // A polished point can already be critical; catch it before the
      // reparametrization smears it back into the polyline.
      E.grad(pts[m], g);
      const double g2 = E.ops().max_abs(g);
      const double s2 = E.grad_scale(pts[m]);
      if (g2 <= cfg.tol * s2) {
        converged = true;
        final_idx = m;
        break;
      }
    } else if (++stall >= 3) {
      final_idx = m;
      break;
    }

    for (const int nb : {m - 1, m + 1}) {
      if (nb < 1 || nb > count - 2) continue;
      E.grad(pts[nb], g);
      if (E.ops().max_abs(g) > 0.0) armijo_step(E, pts[nb], g, smooth_step, 20, max_disp);
    }
    reparametrize(E, pts);
  }
  rep.outer_iterations = std::min(outer + 1, cfg.max_outer);
  if (final_idx < 0) final_idx = argmax_j();

  const std::vector<double>& best = pts[final_idx];
  E.grad(best, g);
  const double gnorm = E.ops().max_abs(g);
  const double scale = E.grad_scale(best);
  rep.converged = converged && gnorm <= cfg.tol * scale;
  rep.c = E.j(best);

  double vmin = 0.0;
  for (const double val : best) vmin = std::min(vmin, val);
  rep.negative_part_max = -vmin;

  const VertexFunction raw = E.ops().to_function(best);
  if (rep.converged) {
    const PositivityReport pos = positivity_check(prob, nl, cfg.lambda, raw);
    rep.solution = pos.clamped;
    rep.residual = pos.residual_after_clamp;
    rep.j_value = semilinear_energy(prob, nl, cfg.lambda, rep.solution);
  } else {
    rep.solution = raw;
    rep.residual = gnorm / scale;
    rep.j_value = rep.c;
  }
  return rep;
}

PositivityReport positivity_check(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                                  const VertexFunction& u) {
  const DirichletDomain& dom = *prob.ctx.domain;
  if (u.size() != dom.closure_size()) fail("function does not match the domain");
  if (!u.dirichlet()) fail("candidate must vanish on the boundary");

  PositivityReport rep;
  double umax = 0.0;
  for (const double v : u.values()) umax = std::max(umax, std::abs(v));
  for (const double v : u.values()) rep.negative_sup = std::max(rep.negative_sup, -v);
  rep.negative_sup = std::max(rep.negative_sup, 0.0);

  const VertexFunction defect = semilinear_gradient(prob, nl, lambda, u);
  CompensatedSum pairing;
  const WeightedGraph& graph = *prob.ctx.graph;
  for (const int x : dom.interior()) {
    const int ci = dom.closure_index(x);
    const double uminus = std::min(u[ci], 0.0);
    pairing.add(graph.measure(x) * uminus * defect[ci]);
  }
  rep.defect_pairing = pairing.value();

  if (rep.negative_sup > 1e-8 * std::max(1.0, umax)) {
    throw std::runtime_error("solution not nonnegative: negative part " +
                             std::to_string(rep.negative_sup));
  }

  std::vector<double> clamped(u.values());
  for (double& v : clamped) v = std::max(v, 0.0);
  rep.clamped = VertexFunction::from_closure_values(dom, std::move(clamped), true);

  const VertexFunction after = semilinear_gradient(prob, nl, lambda, rep.clamped);
  double rmax = 0.0;
  for (const double v : after.values()) rmax = std::max(rmax, std::abs(v));
  double cmax = 0.0;
  for (const double v : rep.clamped.values()) cmax = std::max(cmax, std::abs(v));
  rep.residual_after_clamp = rmax / std::max(1.0, std::pow(cmax, prob.ctx.p - 1.0));
  return rep;
}

PsDiagnostics ps_diagnostics(const EigenProblem& prob, const Nonlinearity& nl, double lambda,
                             double lambda1, const std::vector<PathHistoryEntry>& history) {
  PsDiagnostics d;
  const double p = prob.ctx.p;
  const double theta = nl.theta();
  d.lhs_coefficient = (1.0 / p - 1.0 / theta) * (1.0 - lambda / lambda1);
  const double c0 = nl.superlinearity_offset(*prob.ctx.graph, *prob.ctx.domain);
  d.c_empirical = -kInf;
  for (const PathHistoryEntry& e : history) {
    const double lhs = d.lhs_coefficient * std::pow(e.seminorm, p);
    const double rhs = e.j_max + std::abs(e.grad_inner_u) / theta + c0;
    d.c_empirical = std::max(d.c_empirical, rhs);
    d.max_seminorm = std::max(d.max_seminorm, e.seminorm);
    if (!(lhs <= rhs * (1.0 + 1e-9) + 1e-12)) d.bounded = false;
  }
  if (history.empty()) {
    d.c_empirical = 0.0;
  } else {
    d.final_seminorm = history.back().seminorm;
    d.divergence_flag = d.max_seminorm > 5.0 * std::max(d.final_seminorm, 1e-300);
  }
  return d;
}

}  // namespace plgraph
