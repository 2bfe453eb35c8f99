#pragma once

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace plgraph {

struct Edge {
  int to;
  double weight;
};

/// Finite connected graph with symmetric positive edge weights. Vertices are
/// kept sorted by id, so vertex index order is lexicographic id order and
/// every iteration over vertices is deterministic. The vertex measure mu is
/// the sum of the weights of all incident edges.
class WeightedGraph {
 public:
  WeightedGraph(std::vector<std::string> vertex_ids,
                const std::vector<std::tuple<std::string, std::string, double>>& edges);

  int vertex_count() const { return static_cast<int>(ids_.size()); }
  const std::string& id_of(int v) const { return ids_[v]; }
  /// Returns -1 for an unknown id.
  int index_of(std::string_view id) const;
  const std::vector<Edge>& neighbors(int v) const { return adj_[v]; }
  double measure(int v) const { return mu_[v]; }

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<double> mu_;
};

/// Interior/boundary split of a graph. The interior is user-chosen; the
/// boundary is derived as the set of vertices outside the interior adjacent
/// to it, and the closure is their union. Vertex lists are ascending in graph
/// index, i.e. lexicographic in id.
class DirichletDomain {
 public:
  DirichletDomain(const WeightedGraph& graph, const std::vector<std::string>& interior_ids);

  int interior_size() const { return static_cast<int>(interior_.size()); }
  int boundary_size() const { return static_cast<int>(boundary_.size()); }
  int closure_size() const { return static_cast<int>(closure_.size()); }

  const std::vector<int>& interior() const { return interior_; }
  const std::vector<int>& boundary() const { return boundary_; }
  const std::vector<int>& closure() const { return closure_; }

  /// Position of a graph vertex in the closure list, or -1 if outside.
  int closure_index(int graph_vertex) const { return closure_pos_[graph_vertex]; }
  bool in_interior(int graph_vertex) const { return interior_flag_[graph_vertex] != 0; }
  /// Position of a graph vertex in the interior list, or -1.
  int interior_index(int graph_vertex) const { return interior_pos_[graph_vertex]; }

 private:
  std::vector<int> interior_;
  std::vector<int> boundary_;
  std::vector<int> closure_;
  std::vector<int> closure_pos_;
  std::vector<int> interior_pos_;
  std::vector<char> interior_flag_;
};

/// Real-valued function on the closure of a domain, stored in closure order.
/// The dirichlet flag marks membership in the zero-boundary class and is
/// enforced at construction: flagged functions are exactly zero on the
/// boundary.
class VertexFunction {
 public:
  VertexFunction() = default;

  static VertexFunction zeros(const DirichletDomain& dom);
  static VertexFunction from_closure_values(const DirichletDomain& dom, std::vector<double> values,
                                            bool dirichlet);
  /// Zero-extends interior values to the closure; always a Dirichlet function.
  static VertexFunction from_interior_values(const DirichletDomain& dom,
                                             const std::vector<double>& interior_values);
  /// Parses {id: value}; the keys must cover the closure exactly.
  static VertexFunction from_map(const WeightedGraph& graph, const DirichletDomain& dom,
                                 const std::map<std::string, double>& values);

  double operator[](int closure_idx) const { return v_[closure_idx]; }
  int size() const { return static_cast<int>(v_.size()); }
  bool dirichlet() const { return dirichlet_; }
  const std::vector<double>& values() const { return v_; }

  /// Value at a vertex id; evaluation outside the closure is an error.
  double at(const WeightedGraph& graph, const DirichletDomain& dom, std::string_view id) const;

  std::vector<double> interior_values(const DirichletDomain& dom) const;

 private:
  std::vector<double> v_;
  bool dirichlet_ = false;
};

/// Weight K on the interior, stored in interior order. Must be positive
/// somewhere: an everywhere-nonpositive weight admits no admissible function.
class WeightField {
 public:
  static WeightField from_interior_values(const DirichletDomain& dom, std::vector<double> values);
  /// Parses {id: value}; the keys must cover the interior exactly.
  static WeightField from_map(const WeightedGraph& graph, const DirichletDomain& dom,
                              const std::map<std::string, double>& values);

  double operator[](int interior_idx) const { return k_[interior_idx]; }
  int size() const { return static_cast<int>(k_.size()); }
  const std::vector<double>& values() const { return k_; }

 private:
  std::vector<double> k_;
};

/// Parses a graph document: {"vertices": [...], "edges": [[a,b,w],...],
/// "interior": [...]}.
std::pair<WeightedGraph, DirichletDomain> load_graph(const std::string& json_text);

/// Parses a weight document {"K": {id: value}}.
WeightField load_weight(const WeightedGraph& graph, const DirichletDomain& dom,
                        const std::string& json_text);

/// Parses a function document {"u": {id: value}}.
VertexFunction load_function(const WeightedGraph& graph, const DirichletDomain& dom,
                             const std::string& json_text);

/// Integral over the closure: sum of mu(x) u(x), compensated, in id order.
double integral(const WeightedGraph& graph, const DirichletDomain& dom, const VertexFunction& u);

/// Volume of the closure: integral of the constant 1.
double volume(const WeightedGraph& graph, const DirichletDomain& dom);

VertexFunction positive_part(const DirichletDomain& dom, const VertexFunction& u);
/// Negative part with the sign convention u = u_plus + u_minus, so the
/// returned values are <= 0.
VertexFunction negative_part(const DirichletDomain& dom, const VertexFunction& u);

}  // namespace plgraph
