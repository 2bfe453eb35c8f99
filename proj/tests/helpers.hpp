#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "plgraph/calculus.hpp"
#include "plgraph/graph.hpp"
#include "plgraph/rng.hpp"

namespace th {

using plgraph::DirichletDomain;
using plgraph::Rng;
using plgraph::VertexFunction;
using plgraph::WeightedGraph;
using plgraph::WeightField;

// Path a-b-c with unit weights, interior {b}. mu = (1, 2, 1).
inline std::pair<WeightedGraph, DirichletDomain> path3() {
  WeightedGraph g({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 1.0}});
  DirichletDomain dom(g, {"b"});
  return {std::move(g), dom};
}

// Path a-b-c-d with unit weights, interior {b, c}. mu = (1, 2, 2, 1).
inline std::pair<WeightedGraph, DirichletDomain> path4() {
  WeightedGraph g({"a", "b", "c", "d"},
                  {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "d", 1.0}});
  DirichletDomain dom(g, {"b", "c"});
  return {std::move(g), dom};
}

// Hub with `leaves` unit spokes, interior is the hub.
inline std::pair<WeightedGraph, DirichletDomain> star(int leaves, double w = 1.0) {
  std::vector<std::string> ids{"hub"};
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (int i = 0; i < leaves; ++i) {
    ids.push_back("leaf" + std::to_string(i));
    edges.emplace_back("hub", ids.back(), w);
  }
  WeightedGraph g(std::move(ids), edges);
  DirichletDomain dom(g, {"hub"});
  return {std::move(g), dom};
}

inline std::string vertex_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "v%03d", i);
  return buf;
}

// Connected graph on n vertices: random spanning tree plus extra edges,
// weights uniform in [0.5, 2].
inline WeightedGraph random_connected(Rng& rng, int n, double extra_edge_prob = 0.25) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(vertex_name(i));
  std::set<std::pair<int, int>> used;
  std::vector<std::tuple<std::string, std::string, double>> edges;
  const auto add = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) return;
    edges.emplace_back(ids[a], ids[b], rng.uniform(0.5, 2.0));
  };
  for (int i = 1; i < n; ++i) add(rng.uniform_int(0, i - 1), i);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform01() < extra_edge_prob) add(i, j);
    }
  }
  return WeightedGraph(std::move(ids), edges);
}

// Random interior of size k; k < n keeps the boundary nonempty.
inline DirichletDomain random_interior(Rng& rng, const WeightedGraph& g, int k) {
  const int n = g.vertex_count();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
  std::vector<std::string> ids;
  for (int i = 0; i < k; ++i) ids.push_back(g.id_of(perm[i]));
  return DirichletDomain(g, ids);
}

// Weight with a positive value somewhere; both signs when the interior
// has room for them.
inline WeightField random_indefinite(Rng& rng, const DirichletDomain& dom) {
  const int n = dom.interior_size();
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = rng.uniform(-1.0, 1.0);
  k[0] = rng.uniform(0.2, 1.0);
  if (n >= 2) k[1] = -rng.uniform(0.2, 1.0);
  return WeightField::from_interior_values(dom, std::move(k));
}

inline WeightField random_positive(Rng& rng, const DirichletDomain& dom) {
  std::vector<double> k(dom.interior_size());
  for (double& x : k) x = rng.uniform(0.1, 1.0);
  return WeightField::from_interior_values(dom, std::move(k));
}

// Dirichlet function with normal interior values.
inline VertexFunction random_dirichlet(Rng& rng, const DirichletDomain& dom,
                                       double scale = 1.0) {
  std::vector<double> v(dom.interior_size());
  for (double& x : v) x = scale * rng.normal();
  return VertexFunction::from_interior_values(dom, v);
}

// Free function on the closure (boundary values included).
inline VertexFunction random_closure(Rng& rng, const DirichletDomain& dom,
                                     double scale = 1.0) {
  std::vector<double> v(dom.closure_size());
  for (double& x : v) x = scale * rng.normal();
  return VertexFunction::from_closure_values(dom, std::move(v), false);
}

inline double dot_mu(const WeightedGraph& g, const DirichletDomain& dom,
                     const VertexFunction& a, const VertexFunction& b) {
  double s = 0.0;
  for (int ci = 0; ci < dom.closure_size(); ++ci) {
    s += g.measure(dom.closure()[ci]) * a[ci] * b[ci];
  }
  return s;
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace th
