#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "plgraph/semilinear.hpp"
#include "plgraph/spectral.hpp"

namespace plgraph {

/// Insertion-ordered JSON: report key order is fixed by construction order,
/// which keeps serialized reports byte-stable for identical inputs.
using Json = nlohmann::ordered_json;

/// FNV-1a 64-bit digest, lowercase hex. Used to fingerprint input documents
/// inside reports.
std::string fnv1a_hex(std::string_view bytes);

/// Reads a whole file; throws std::invalid_argument with the path on failure.
std::string read_file(const std::string& path);

/// Writes via a sibling temp file plus rename so readers never observe a
/// partial report.
void atomic_write_file(const std::string& path, const std::string& content);

/// {id: value} over the closure, in id order.
Json function_to_json(const WeightedGraph& graph, const DirichletDomain& dom,
                      const VertexFunction& u);

Json eigen_result_to_json(const WeightedGraph& graph, const DirichletDomain& dom,
                          const EigenResult& result);

Json solution_report_to_json(const WeightedGraph& graph, const DirichletDomain& dom,
                             const SolutionReport& report);

/// Flattens a JSON document into two-column key,value CSV. Nested object
/// keys are joined with '.', array elements indexed with '.N'; values keep
/// exactly the JSON serialization of the scalar.
std::string json_to_kv_csv(const Json& doc);

/// Escapes one CSV field per RFC 4180 (quotes only when needed).
std::string csv_escape(const std::string& field);

}  // namespace plgraph
