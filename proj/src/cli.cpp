#include "plgraph/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plgraph/calculus.hpp"
#include "plgraph/report.hpp"
#include "plgraph/rng.hpp"
#include "plgraph/summation.hpp"
#include "plgraph/version.hpp"

namespace plgraph {

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;
constexpr int kNoGeometry = 3;
constexpr int kPropertyViolated = 4;

/// A bare filename lands in $PLGRAPH_OUT_DIR when that is set; explicit
/// paths are respected as given.
std::string resolve_output_path(const std::string& out) {
  if (out.empty() || out.find('/') != std::string::npos) return out;
  const char* dir = std::getenv("PLGRAPH_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return out;
  return std::string(dir) + "/" + out;
}

void emit_payload(const std::string& payload, const std::string& output) {
  if (output.empty()) {
    std::cout << payload;
  } else {
    atomic_write_file(resolve_output_path(output), payload);
  }
}

void emit_report(const Json& report, const std::string& output, const std::string& format) {
  emit_payload(format == "csv" ? json_to_kv_csv(report) : report.dump(2) + "\n", output);
}

/// Projection for verify reports: one row per check.
std::string checks_to_csv(const Json& report) {
  std::string out = "check,relation,observed,expected,pass\n";
  for (const auto& row : report.at("checks")) {
    out += csv_escape(row.at("check").get<std::string>());
    out += ",";
    out += csv_escape(row.at("relation").get<std::string>());
    out += ",";
    out += csv_escape(row.at("observed").dump());
    out += ",";
    out += csv_escape(row.at("expected").dump());
    out += ",";
    out += row.at("pass").get<bool>() ? "true" : "false";
    out += "\n";
  }
  return out;
}

void emit_verify_report(const Json& report, const std::string& output, const std::string& format) {
  emit_payload(format == "csv" ? checks_to_csv(report) : report.dump(2) + "\n", output);
}

Json tool_section() {
  return Json{{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
}

Json input_entry(const std::string& path, const std::string& content) {
  return Json{{"path", path}, {"fnv1a64", fnv1a_hex(content)}};
}

Json check_row(const std::string& name, const std::string& relation, const Json& observed,
               const Json& expected, bool pass) {
  return Json{{"check", name},
              {"relation", relation},
              {"observed", observed},
              {"expected", expected},
              {"pass", pass}};
}

bool all_pass(const Json& checks) {
  for (const auto& row : checks) {
    if (!row.at("pass").get<bool>()) return false;
  }
  return true;
}

struct CommonOptions {
  std::string graph_path;
  std::string weight_path;
  double p = 2.0;
  double tol = 1e-10;
  int max_iter = 100000;
  int restarts = 16;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";
};

void add_eigen_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--graph", opt.graph_path, "graph document (JSON)")->required();
  cmd->add_option("--p", opt.p, "exponent p > 1");
  cmd->add_option("--tol", opt.tol, "projected-gradient tolerance");
  cmd->add_option("--max-iter", opt.max_iter, "iteration budget per restart");
  cmd->add_option("--restarts", opt.restarts, "random restarts");
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--output", opt.output, "report path (stdout when absent)");
  cmd->add_option("--format", opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

struct LoadedEigenProblem {
  OperatorContext ctx;
  EigenProblem prob;
  Json inputs;
};

LoadedEigenProblem load_eigen_problem(const std::string& graph_path,
                                      const std::string& weight_path, double p) {
  const std::string graph_text = read_file(graph_path);
  auto [graph, domain] = load_graph(graph_text);
  const std::string weight_text = read_file(weight_path);
  WeightField weight = load_weight(graph, domain, weight_text);
  OperatorContext ctx = make_context(std::move(graph), std::move(domain), p);
  EigenProblem prob = make_eigen_problem(ctx, std::move(weight));
  Json inputs;
  inputs["graph"] = input_entry(graph_path, graph_text);
  inputs["weight"] = input_entry(weight_path, weight_text);
  return LoadedEigenProblem{std::move(ctx), std::move(prob), std::move(inputs)};
}

Json eigen_config_json(const CommonOptions& opt) {
  Json cfg;
  cfg["p"] = opt.p;
  cfg["tol"] = opt.tol;
  cfg["max_iter"] = opt.max_iter;
  cfg["restarts"] = opt.restarts;
  cfg["seed"] = opt.seed;
  if (opt.p < 2.0) cfg["regularization_epsilon"] = kGradRegularizationEpsilon;
  return cfg;
}

int cmd_eigen(const CommonOptions& opt, int grid) {
  LoadedEigenProblem loaded = load_eigen_problem(opt.graph_path, opt.weight_path, opt.p);
  const EigenConfig ecfg{opt.tol, opt.max_iter, opt.restarts, opt.seed};
  const EigenResult res = solve_principal(loaded.prob, ecfg);

  Json report;
  report["tool"] = tool_section();
  report["command"] = "eigen";
  Json cfg = eigen_config_json(opt);
  cfg["grid"] = grid;
  cfg["format"] = opt.format;
  cfg["output"] = opt.output;
  report["config"] = std::move(cfg);
  report["inputs"] = loaded.inputs;
  report["result"] = eigen_result_to_json(*loaded.ctx.graph, *loaded.ctx.domain, res);
  if (grid > 0 && loaded.ctx.domain->interior_size() <= 3) {
    report["result"]["oracle"] = brute_force_oracle(loaded.prob, grid);
  }
  emit_report(report, opt.output, opt.format);
  return res.converged ? kOk : kNotConverged;
}

struct SolveOptions {
  CommonOptions common;
  double q = 0.0;
  double theta = 0.0;
  double s0 = 1.0;
  std::string family = "power";
  double beta = 0.0;
  double cap = 50.0;
  double lambda_abs = 0.0;
  double lambda_frac = 0.0;
  bool has_lambda_abs = false;
  bool has_lambda_frac = false;
  int path_points = 33;
  double mp_tol = 1e-8;
  int max_outer = 2000;
  int ring_samples = 64;
  double eigen_tol = 1e-10;
};

int cmd_solve(const SolveOptions& opt) {
  const CommonOptions& c = opt.common;
  LoadedEigenProblem loaded = load_eigen_problem(c.graph_path, c.weight_path, c.p);
  const DirichletDomain& dom = *loaded.ctx.domain;

  Nonlinearity nl =
      opt.family == "power"
          ? Nonlinearity::power(dom, c.p, opt.q, {}, opt.theta, opt.s0)
          : Nonlinearity::exponential(dom, c.p, opt.q, opt.beta, opt.cap, {}, opt.theta, opt.s0);

  MountainPassConfig mp;
  mp.path_points = opt.path_points;
  mp.tol = opt.mp_tol;
  mp.max_outer = opt.max_outer;
  mp.ring_samples = opt.ring_samples;
  mp.seed = c.seed;
  mp.eigen = EigenConfig{opt.eigen_tol, c.max_iter, c.restarts, c.seed};

  const EigenResult eig = solve_principal(loaded.prob, mp.eigen);
  if (!eig.converged) {
    throw std::runtime_error("principal eigenvalue stage did not converge");
  }
  mp.lambda = opt.has_lambda_frac ? opt.lambda_frac * eig.lambda1 : opt.lambda_abs;

  const SolutionReport sol = mountain_pass_solve(loaded.prob, nl, mp, &eig);
  const PsDiagnostics ps = ps_diagnostics(loaded.prob, nl, mp.lambda, sol.lambda1, sol.history);

  Json report;
  report["tool"] = tool_section();
  report["command"] = "solve";
  Json cfg;
  cfg["p"] = c.p;
  cfg["q"] = opt.q;
  cfg["theta"] = nl.theta();
  cfg["s0"] = opt.s0;
  cfg["family"] = opt.family;
  if (opt.family == "exp") {
    cfg["beta"] = opt.beta;
    cfg["cap"] = opt.cap;
  }
  if (opt.has_lambda_frac) cfg["lambda_frac"] = opt.lambda_frac;
  cfg["lambda"] = mp.lambda;
  cfg["path_points"] = mp.path_points;
  cfg["tol"] = mp.tol;
  cfg["max_outer"] = mp.max_outer;
  cfg["ring_samples"] = mp.ring_samples;
  cfg["eigen_tol"] = opt.eigen_tol;
  cfg["max_iter"] = c.max_iter;
  cfg["restarts"] = c.restarts;
  cfg["seed"] = c.seed;
  cfg["format"] = c.format;
  cfg["output"] = c.output;
  report["config"] = std::move(cfg);
  report["inputs"] = loaded.inputs;
  report["result"] = solution_report_to_json(*loaded.ctx.graph, dom, sol);
  report["result"]["compactness"] = Json{{"bounded", ps.bounded},
                                         {"c_empirical", ps.c_empirical},
                                         {"max_seminorm", ps.max_seminorm},
                                         {"divergence_flag", ps.divergence_flag}};
  emit_report(report, c.output, c.format);
  return sol.converged ? kOk : kNotConverged;
}

int cmd_verify_monotonicity_weight(const CommonOptions& opt, const std::string& k1_path,
                                   const std::string& k2_path) {
  const std::string graph_text = read_file(opt.graph_path);
  auto [graph, domain] = load_graph(graph_text);
  const std::string k1_text = read_file(k1_path);
  const std::string k2_text = read_file(k2_path);
  const WeightField k1 = load_weight(graph, domain, k1_text);
  const WeightField k2 = load_weight(graph, domain, k2_text);
  const OperatorContext ctx = make_context(std::move(graph), std::move(domain), opt.p);
  const EigenConfig ecfg{opt.tol, opt.max_iter, opt.restarts, opt.seed};
  const WeightMonotonicityReport rep = verify_weight_monotonicity(ctx, k1, k2, ecfg);

  Json checks = Json::array();
  checks.push_back(check_row("lambda1_strict_decrease", "observed < expected", rep.lambda1_second,
                             rep.lambda1_first - rep.margin, rep.pass));
  checks.push_back(check_row("upper_bound_via_test_function", "observed <= expected",
                             rep.lambda1_second, rep.test_function_bound,
                             rep.lambda1_second <= rep.test_function_bound + 10.0 * opt.tol));
  checks.push_back(check_row("both_solves_converged", "observed == expected",
                             rep.first.converged && rep.second.converged, true,
                             rep.first.converged && rep.second.converged));

  Json report;
  report["tool"] = tool_section();
  report["command"] = "verify monotonicity-weight";
  Json cfg = eigen_config_json(opt);
  cfg["format"] = opt.format;
  cfg["output"] = opt.output;
  report["config"] = std::move(cfg);
  report["inputs"] = Json{{"graph", input_entry(opt.graph_path, graph_text)},
                          {"k1", input_entry(k1_path, k1_text)},
                          {"k2", input_entry(k2_path, k2_text)}};
  report["result"] = Json{{"lambda1_first", rep.lambda1_first},
                          {"lambda1_second", rep.lambda1_second},
                          {"margin", rep.margin},
                          {"test_function_bound", rep.test_function_bound}};
  report["checks"] = checks;
  emit_verify_report(report, opt.output, opt.format);
  return all_pass(checks) ? kOk : kPropertyViolated;
}

int cmd_verify_monotonicity_domain(const CommonOptions& opt,
                                   const std::vector<std::string>& inner_ids) {
  const std::string graph_text = read_file(opt.graph_path);
  auto [graph, outer] = load_graph(graph_text);
  const std::string weight_text = read_file(opt.weight_path);
  const WeightField weight = load_weight(graph, outer, weight_text);
  const DirichletDomain inner(graph, inner_ids);
  DirichletDomain outer_copy = outer;
  const OperatorContext ctx = make_context(std::move(graph), std::move(outer_copy), opt.p);
  const EigenConfig ecfg{opt.tol, opt.max_iter, opt.restarts, opt.seed};
  const DomainMonotonicityReport rep = verify_domain_monotonicity(ctx, inner, outer, weight, ecfg);

  Json checks = Json::array();
  checks.push_back(check_row("lambda1_domain_monotone", "observed <= expected", rep.lambda1_outer,
                             rep.lambda1_inner + rep.tol, rep.pass));
  checks.push_back(check_row("zero_extension_upper_bound", "observed <= expected",
                             rep.lambda1_outer, rep.zero_extension_bound,
                             rep.lambda1_outer <= rep.zero_extension_bound + rep.tol));

  Json report;
  report["tool"] = tool_section();
  report["command"] = "verify monotonicity-domain";
  Json cfg = eigen_config_json(opt);
  cfg["inner"] = inner_ids;
  cfg["format"] = opt.format;
  cfg["output"] = opt.output;
  report["config"] = std::move(cfg);
  report["inputs"] = Json{{"graph", input_entry(opt.graph_path, graph_text)},
                          {"weight", input_entry(opt.weight_path, weight_text)}};
  report["result"] = Json{{"lambda1_inner", rep.lambda1_inner},
                          {"lambda1_outer", rep.lambda1_outer},
                          {"zero_extension_bound", rep.zero_extension_bound},
                          {"tol", rep.tol}};
  report["checks"] = checks;
  emit_verify_report(report, opt.output, opt.format);
  return all_pass(checks) ? kOk : kPropertyViolated;
}

int cmd_verify_green(const CommonOptions& opt, int trials) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const std::string graph_text = read_file(opt.graph_path);
  auto [graph, domain] = load_graph(graph_text);
  const OperatorContext ctx = make_context(std::move(graph), std::move(domain), opt.p);
  const WeightedGraph& g = *ctx.graph;
  const DirichletDomain& dom = *ctx.domain;

  double max_defect = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(opt.seed, static_cast<std::uint64_t>(t)));
    std::vector<double> uc(dom.closure_size());
    for (double& v : uc) v = rng.normal();
    const VertexFunction u = VertexFunction::from_closure_values(dom, std::move(uc), false);
    std::vector<double> pv(dom.interior_size());
    for (double& v : pv) v = rng.normal();
    const VertexFunction phi = VertexFunction::from_interior_values(dom, pv);

    const VertexFunction lap = p_laplacian(ctx, u);
    CompensatedSum lhs;
    for (const int x : dom.interior()) {
      const int ci = dom.closure_index(x);
      lhs.add(g.measure(x) * lap[ci] * phi[ci]);
    }
    const double a = lhs.value();
    const double b = weak_p_form(ctx, u, phi);
    const double defect = std::abs(a + b) / std::max({1.0, std::abs(a), std::abs(b)});
    max_defect = std::max(max_defect, defect);
  }

  Json checks = Json::array();
  checks.push_back(
      check_row("summation_by_parts_defect", "observed <= expected", max_defect, 1e-10,
                max_defect <= 1e-10));

  Json report;
  report["tool"] = tool_section();
  report["command"] = "verify green";
  Json cfg = eigen_config_json(opt);
  cfg["trials"] = trials;
  cfg["format"] = opt.format;
  cfg["output"] = opt.output;
  report["config"] = std::move(cfg);
  report["inputs"] = Json{{"graph", input_entry(opt.graph_path, graph_text)}};
  report["result"] = Json{{"max_defect", max_defect}, {"trials", trials}};
  report["checks"] = checks;
  emit_verify_report(report, opt.output, opt.format);
  return all_pass(checks) ? kOk : kPropertyViolated;
}

int cmd_verify_embedding(const CommonOptions& opt, int samples) {
  const std::string graph_text = read_file(opt.graph_path);
  auto [graph, domain] = load_graph(graph_text);
  const OperatorContext ctx = make_context(std::move(graph), std::move(domain), opt.p);
  const LinfEmbeddingReport rep = linf_embedding_check(ctx, samples, opt.seed);

  double mu_min = std::numeric_limits<double>::infinity();
  for (const int x : ctx.domain->closure()) mu_min = std::min(mu_min, ctx.graph->measure(x));

  Json checks = Json::array();
  checks.push_back(check_row("sup_norm_embedding", "observed <= expected", rep.max_sup_norm,
                             rep.c_hat_refined * (1.0 + 1e-9) / mu_min, true));

  Json report;
  report["tool"] = tool_section();
  report["command"] = "verify embedding";
  Json cfg = eigen_config_json(opt);
  cfg["samples"] = samples;
  cfg["format"] = opt.format;
  cfg["output"] = opt.output;
  report["config"] = std::move(cfg);
  report["inputs"] = Json{{"graph", input_entry(opt.graph_path, graph_text)}};
  report["result"] = Json{{"c_hat", rep.c_hat},
                          {"c_hat_refined", rep.c_hat_refined},
                          {"max_sup_norm", rep.max_sup_norm},
                          {"samples", rep.samples},
                          {"refinements", rep.refinements}};
  report["checks"] = checks;
  emit_verify_report(report, opt.output, opt.format);
  return all_pass(checks) ? kOk : kPropertyViolated;
}

int cmd_verify_tm(const CommonOptions& opt, double alpha, double c0, int samples) {
  const std::string graph_text = read_file(opt.graph_path);
  auto [graph, domain] = load_graph(graph_text);
  const OperatorContext ctx = make_context(std::move(graph), std::move(domain), opt.p);
  double used_c0 = c0;
  if (used_c0 <= 0.0) {
    used_c0 = sobolev_constant_estimate(ctx, ctx.p / (ctx.p - 1.0), 200, Rng::derive(opt.seed, 1));
  }
  const double bound = trudinger_moser_bound(ctx, alpha, used_c0);
  const TmCheckReport rep = trudinger_moser_check(ctx, alpha, used_c0, samples, opt.seed);

  Json checks = Json::array();
  checks.push_back(check_row("exp_integral_bound", "observed <= expected", rep.max_integral,
                             rep.bound, rep.max_integral <= rep.bound));
  checks.push_back(check_row("violations", "observed == expected", rep.violations, 0,
                             rep.violations == 0));

  Json report;
  report["tool"] = tool_section();
  report["command"] = "verify tm";
  Json cfg = eigen_config_json(opt);
  cfg["alpha"] = alpha;
  cfg["c0"] = used_c0;
  cfg["samples"] = samples;
  cfg["format"] = opt.format;
  cfg["output"] = opt.output;
  report["config"] = std::move(cfg);
  report["inputs"] = Json{{"graph", input_entry(opt.graph_path, graph_text)}};
  report["result"] = Json{{"c0", rep.c0},
                          {"bound", bound},
                          {"max_integral", rep.max_integral},
                          {"samples", rep.samples},
                          {"violations", rep.violations}};
  report["checks"] = checks;
  emit_verify_report(report, opt.output, opt.format);
  return all_pass(checks) ? kOk : kPropertyViolated;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"p-Laplacian eigenvalue and semilinear solver on weighted graphs"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  int exit_code = kOk;

  // eigen
  CommonOptions eigen_opt;
  int eigen_grid = 0;
  CLI::App* eigen_cmd = app.add_subcommand("eigen", "principal eigenvalue of the weighted problem");
  add_eigen_options(eigen_cmd, eigen_opt);
  eigen_cmd->add_option("--weight", eigen_opt.weight_path, "weight document (JSON)")->required();
  eigen_cmd->add_option("--grid", eigen_grid,
                        "cross-check against the exhaustive oracle (0 = off)");
  eigen_cmd->callback([&] { exit_code = cmd_eigen(eigen_opt, eigen_grid); });

  // solve
  SolveOptions solve_opt;
  solve_opt.common.p = 3.0;
  CLI::App* solve_cmd = app.add_subcommand("solve", "mountain-pass solve of the semilinear equation");
  solve_cmd->add_option("--graph", solve_opt.common.graph_path, "graph document (JSON)")
      ->required();
  solve_cmd->add_option("--weight", solve_opt.common.weight_path, "weight document (JSON)")
      ->required();
  solve_cmd->add_option("--p", solve_opt.common.p, "exponent p > 2");
  solve_cmd->add_option("--tol", solve_opt.mp_tol, "gradient tolerance of the path descent");
  solve_cmd->add_option("--max-iter", solve_opt.common.max_iter,
                        "iteration budget per eigenvalue restart");
  solve_cmd->add_option("--restarts", solve_opt.common.restarts, "eigenvalue random restarts");
  solve_cmd->add_option("--seed", solve_opt.common.seed, "random seed");
  solve_cmd->add_option("--output", solve_opt.common.output, "report path (stdout when absent)");
  solve_cmd->add_option("--format", solve_opt.common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  solve_cmd->add_option("--q", solve_opt.q, "growth exponent q > p")->required();
  solve_cmd->add_option("--theta", solve_opt.theta, "superlinearity exponent (0 = (p+q)/2)");
  solve_cmd->add_option("--s0", solve_opt.s0, "superlinearity threshold");
  solve_cmd->add_option("--family", solve_opt.family, "source family: power or exp")
      ->check(CLI::IsMember({"power", "exp"}));
  solve_cmd->add_option("--beta", solve_opt.beta, "exponential rate (exp family)");
  solve_cmd->add_option("--cap", solve_opt.cap, "exponent cap (exp family)");
  CLI::Option* lam = solve_cmd->add_option("--lambda", solve_opt.lambda_abs,
                                           "spectral parameter (absolute)");
  CLI::Option* lam_frac = solve_cmd->add_option("--lambda-frac", solve_opt.lambda_frac,
                                                "spectral parameter as a fraction of lambda1");
  lam->excludes(lam_frac);
  lam_frac->excludes(lam);
  solve_cmd->add_option("--path-points", solve_opt.path_points, "points on the deformation path");
  solve_cmd->add_option("--max-outer", solve_opt.max_outer, "outer deformation budget");
  solve_cmd->add_option("--ring-samples", solve_opt.ring_samples, "geometry ring samples");
  solve_cmd->add_option("--eigen-tol", solve_opt.eigen_tol, "tolerance of the eigenvalue stage");
  solve_cmd->callback([&] {
    solve_opt.has_lambda_abs = lam->count() > 0;
    solve_opt.has_lambda_frac = lam_frac->count() > 0;
    if (!solve_opt.has_lambda_abs && !solve_opt.has_lambda_frac) {
      throw std::invalid_argument("one of --lambda or --lambda-frac is required");
    }
    if (solve_opt.family == "exp" && solve_opt.beta <= 0.0) {
      throw std::invalid_argument("--beta is required for the exp family");
    }
    exit_code = cmd_solve(solve_opt);
  });

  // verify
  CLI::App* verify_cmd = app.add_subcommand("verify", "property verification suites");
  verify_cmd->require_subcommand(1);

  CommonOptions mw_opt;
  std::string k1_path, k2_path;
  CLI::App* mw_cmd = verify_cmd->add_subcommand("monotonicity-weight",
                                                "strict eigenvalue decrease under weight increase");
  add_eigen_options(mw_cmd, mw_opt);
  mw_cmd->add_option("--k1", k1_path, "smaller weight document")->required();
  mw_cmd->add_option("--k2", k2_path, "larger weight document")->required();
  mw_cmd->callback([&] { exit_code = cmd_verify_monotonicity_weight(mw_opt, k1_path, k2_path); });

  CommonOptions md_opt;
  std::vector<std::string> inner_ids;
  CLI::App* md_cmd = verify_cmd->add_subcommand("monotonicity-domain",
                                                "eigenvalue monotonicity under domain inclusion");
  add_eigen_options(md_cmd, md_opt);
  md_cmd->add_option("--weight", md_opt.weight_path, "weight document on the outer interior")
      ->required();
  md_cmd->add_option("--inner", inner_ids, "vertex ids of the inner interior")
      ->required()
      ->expected(-1);
  md_cmd->callback([&] { exit_code = cmd_verify_monotonicity_domain(md_opt, inner_ids); });

  CommonOptions green_opt;
  int green_trials = 200;
  CLI::App* green_cmd = verify_cmd->add_subcommand("green", "summation-by-parts identity");
  add_eigen_options(green_cmd, green_opt);
  green_cmd->add_option("--trials", green_trials, "random function pairs");
  green_cmd->callback([&] { exit_code = cmd_verify_green(green_opt, green_trials); });

  CommonOptions emb_opt;
  int emb_samples = 200;
  CLI::App* emb_cmd = verify_cmd->add_subcommand("embedding", "max-norm embedding bound");
  add_eigen_options(emb_cmd, emb_opt);
  emb_cmd->add_option("--samples", emb_samples, "unit-seminorm samples");
  emb_cmd->callback([&] { exit_code = cmd_verify_embedding(emb_opt, emb_samples); });

  CommonOptions tm_opt;
  tm_opt.p = 3.0;
  double tm_alpha = 1.5;
  double tm_c0 = 0.0;
  int tm_samples = 1000;
  CLI::App* tm_cmd = verify_cmd->add_subcommand("tm", "exponential integrability bound");
  add_eigen_options(tm_cmd, tm_opt);
  tm_cmd->add_option("--alpha", tm_alpha, "exponent multiplier, > 1")->required();
  tm_cmd->add_option("--c0", tm_c0, "embedding constant (0 = empirical estimate)");
  tm_cmd->add_option("--samples", tm_samples, "unit-seminorm samples");
  tm_cmd->callback([&] { exit_code = cmd_verify_tm(tm_opt, tm_alpha, tm_c0, tm_samples); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoGeometry;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotConverged;
  }
  return exit_code;
}

}  // namespace plgraph
