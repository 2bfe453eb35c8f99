#include "plgraph/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "plgraph/summation.hpp"

namespace plgraph {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

WeightedGraph::WeightedGraph(
    std::vector<std::string> vertex_ids,
    const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  if (vertex_ids.empty()) fail("graph has no vertices");
  std::sort(vertex_ids.begin(), vertex_ids.end());
  if (std::adjacent_find(vertex_ids.begin(), vertex_ids.end()) != vertex_ids.end()) {
    fail("duplicate vertex id");
  }
  ids_ = std::move(vertex_ids);
  const int n = vertex_count();
  adj_.assign(n, {});
  mu_.assign(n, 0.0);

  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b, w] : edges) {
    const int ia = index_of(a);
    const int ib = index_of(b);
    if (ia < 0) fail("unknown vertex referenced by edge: " + a);
    if (ib < 0) fail("unknown vertex referenced by edge: " + b);
    if (ia == ib) fail("self-loop at vertex: " + a);
    if (!(w > 0.0)) fail("nonpositive weight on edge " + a + "-" + b);
    const auto key = std::minmax(ia, ib);
    if (!seen.insert(key).second) fail("duplicate edge " + a + "-" + b);
    adj_[ia].push_back({ib, w});
    adj_[ib].push_back({ia, w});
  }

  for (int v = 0; v < n; ++v) {
    auto& nb = adj_[v];
    std::sort(nb.begin(), nb.end(), [](const Edge& l, const Edge& r) { return l.to < r.to; });
    CompensatedSum mu;
    for (const Edge& e : nb) mu.add(e.weight);
    mu_[v] = mu.value();
    if (nb.empty()) fail("isolated vertex: " + ids_[v]);
  }

  // Connectivity over the full vertex set.
  std::vector<char> reach(n, 0);
  std::vector<int> stack{0};
  reach[0] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Edge& e : adj_[v]) {
      if (!reach[e.to]) {
        reach[e.to] = 1;
        stack.push_back(e.to);
      }
    }
  }
  if (std::count(reach.begin(), reach.end(), char(1)) != n) fail("graph is not connected");
}

int WeightedGraph::index_of(std::string_view id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return -1;
  return static_cast<int>(it - ids_.begin());
}

DirichletDomain::DirichletDomain(const WeightedGraph& graph,
                                 const std::vector<std::string>& interior_ids) {
  const int n = graph.vertex_count();
  if (interior_ids.empty()) fail("empty interior");
  interior_flag_.assign(n, 0);
  for (const auto& id : interior_ids) {
    const int v = graph.index_of(id);
    if (v < 0) fail("unknown interior vertex: " + id);
    if (interior_flag_[v]) fail("duplicate interior vertex: " + id);
    interior_flag_[v] = 1;
  }
  std::vector<char> boundary_flag(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!interior_flag_[v]) continue;
    interior_.push_back(v);
    for (const Edge& e : graph.neighbors(v)) {
      if (!interior_flag_[e.to]) boundary_flag[e.to] = 1;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (boundary_flag[v]) boundary_.push_back(v);
  }
  if (boundary_.empty()) {
    // Interior == whole vertex set: the zero-boundary function class would be
    // unconstrained and constants would have vanishing energy.
    fail("empty boundary: interior must be a proper subset of the vertex set");
  }
  closure_pos_.assign(n, -1);
  interior_pos_.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (interior_flag_[v] || boundary_flag[v]) {
      closure_pos_[v] = static_cast<int>(closure_.size());
      closure_.push_back(v);
    }
  }
  for (int i = 0; i < interior_size(); ++i) interior_pos_[interior_[i]] = i;
}

VertexFunction VertexFunction::zeros(const DirichletDomain& dom) {
  VertexFunction u;
  u.v_.assign(dom.closure_size(), 0.0);
  u.dirichlet_ = true;
  return u;
}

VertexFunction VertexFunction::from_closure_values(const DirichletDomain& dom,
                                                   std::vector<double> values, bool dirichlet) {
  if (static_cast<int>(values.size()) != dom.closure_size()) {
    fail("function value count does not match the closure");
  }
  if (dirichlet) {
    for (int ci = 0; ci < dom.closure_size(); ++ci) {
      if (!dom.in_interior(dom.closure()[ci]) && values[ci] != 0.0) {
        fail("dirichlet function has a nonzero boundary value");
      }
    }
  }
  VertexFunction u;
  u.v_ = std::move(values);
  u.dirichlet_ = dirichlet;
  return u;
}

VertexFunction VertexFunction::from_interior_values(const DirichletDomain& dom,
                                                    const std::vector<double>& interior_values) {
  if (static_cast<int>(interior_values.size()) != dom.interior_size()) {
    fail("function value count does not match the interior");
  }
  std::vector<double> v(dom.closure_size(), 0.0);
  for (int i = 0; i < dom.interior_size(); ++i) {
    v[dom.closure_index(dom.interior()[i])] = interior_values[i];
  }
  return from_closure_values(dom, std::move(v), true);
}

VertexFunction VertexFunction::from_map(const WeightedGraph& graph, const DirichletDomain& dom,
                                        const std::map<std::string, double>& values) {
  if (static_cast<int>(values.size()) != dom.closure_size()) {
    fail("function document must cover the closure exactly");
  }
  std::vector<double> v(dom.closure_size(), 0.0);
  for (const auto& [id, val] : values) {
    const int gv = graph.index_of(id);
    const int ci = gv < 0 ? -1 : dom.closure_index(gv);
    if (ci < 0) fail("function value for vertex outside the closure: " + id);
    v[ci] = val;
  }
  bool zero_boundary = true;
  for (const int b : dom.boundary()) {
    if (v[dom.closure_index(b)] != 0.0) zero_boundary = false;
  }
  return from_closure_values(dom, std::move(v), zero_boundary);
}

double VertexFunction::at(const WeightedGraph& graph, const DirichletDomain& dom,
                          std::string_view id) const {
  const int gv = graph.index_of(id);
  const int ci = gv < 0 ? -1 : dom.closure_index(gv);
  if (ci < 0) fail("evaluation outside the closure: " + std::string(id));
  return v_[ci];
}

std::vector<double> VertexFunction::interior_values(const DirichletDomain& dom) const {
  std::vector<double> out(dom.interior_size());
  for (int i = 0; i < dom.interior_size(); ++i) {
    out[i] = v_[dom.closure_index(dom.interior()[i])];
  }
  return out;
}

WeightField WeightField::from_interior_values(const DirichletDomain& dom,
                                              std::vector<double> values) {
  if (static_cast<int>(values.size()) != dom.interior_size()) {
    fail("weight value count does not match the interior");
  }
  bool positive_somewhere = false;
  for (const double k : values) {
    if (k > 0.0) positive_somewhere = true;
  }
  if (!positive_somewhere) fail("weight must be positive at some interior vertex");
  WeightField k;
  k.k_ = std::move(values);
  return k;
}

WeightField WeightField::from_map(const WeightedGraph& graph, const DirichletDomain& dom,
                                  const std::map<std::string, double>& values) {
  if (static_cast<int>(values.size()) != dom.interior_size()) {
    fail("weight document must cover the interior exactly");
  }
  std::vector<double> k(dom.interior_size(), 0.0);
  for (const auto& [id, val] : values) {
    const int gv = graph.index_of(id);
    const int ii = gv < 0 ? -1 : dom.interior_index(gv);
    if (ii < 0) fail("weight value for vertex outside the interior: " + id);
    k[ii] = val;
  }
  return from_interior_values(dom, std::move(k));
}

namespace {

nlohmann::json parse_json(const std::string& text, const char* what) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(std::string("malformed JSON in ") + what);
  return doc;
}

std::map<std::string, double> parse_value_map(const nlohmann::json& obj, const char* what) {
  if (!obj.is_object()) fail(std::string(what) + " must be an object of {id: value}");
  std::map<std::string, double> out;
  for (const auto& [key, val] : obj.items()) {
    if (!val.is_number()) fail(std::string(what) + " value for '" + key + "' is not a number");
    out[key] = val.get<double>();
  }
  return out;
}

}  // namespace

std::pair<WeightedGraph, DirichletDomain> load_graph(const std::string& json_text) {
  const nlohmann::json doc = parse_json(json_text, "graph document");
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges") ||
      !doc.contains("interior")) {
    fail("graph document must contain vertices, edges and interior");
  }
  std::vector<std::string> ids;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) fail("vertex id is not a string");
    ids.push_back(v.get<std::string>());
  }
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() ||
        !e[2].is_number()) {
      fail("edge entries must be [id, id, weight]");
    }
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<double>());
  }
  std::vector<std::string> interior;
  for (const auto& v : doc["interior"]) {
    if (!v.is_string()) fail("interior id is not a string");
    interior.push_back(v.get<std::string>());
  }
  WeightedGraph graph(std::move(ids), edges);
  DirichletDomain dom(graph, interior);
  return {std::move(graph), std::move(dom)};
}

WeightField load_weight(const WeightedGraph& graph, const DirichletDomain& dom,
                        const std::string& json_text) {
  const nlohmann::json doc = parse_json(json_text, "weight document");
  if (!doc.is_object() || !doc.contains("K")) fail("weight document must contain K");
  return WeightField::from_map(graph, dom, parse_value_map(doc["K"], "K"));
}

VertexFunction load_function(const WeightedGraph& graph, const DirichletDomain& dom,
                             const std::string& json_text) {
  const nlohmann::json doc = parse_json(json_text, "function document");
  if (!doc.is_object() || !doc.contains("u")) fail("function document must contain u");
  return VertexFunction::from_map(graph, dom, parse_value_map(doc["u"], "u"));
}

double integral(const WeightedGraph& graph, const DirichletDomain& dom, const VertexFunction& u) {
  if (u.size() != dom.closure_size()) fail("function does not match the domain");
  CompensatedSum s;
  for (int ci = 0; ci < dom.closure_size(); ++ci) {
    s.add(graph.measure(dom.closure()[ci]) * u[ci]);
  }
  return s.value();
}

double volume(const WeightedGraph& graph, const DirichletDomain& dom) {
  CompensatedSum s;
  for (const int v : dom.closure()) s.add(graph.measure(v));
  return s.value();
}

VertexFunction positive_part(const DirichletDomain& dom, const VertexFunction& u) {
  std::vector<double> v(u.values());
  for (double& x : v) x = x > 0.0 ? x : 0.0;
  return VertexFunction::from_closure_values(dom, std::move(v), u.dirichlet());
}

VertexFunction negative_part(const DirichletDomain& dom, const VertexFunction& u) {
  std::vector<double> v(u.values());
  for (double& x : v) x = x < 0.0 ? x : 0.0;
  return VertexFunction::from_closure_values(dom, std::move(v), u.dirichlet());
}

}  // namespace plgraph
