#include "plgraph/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plgraph {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (!in.good() && !in.eof()) throw std::invalid_argument("cannot read file: " + path);
  return std::move(out).str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot open file for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) throw std::invalid_argument("cannot write file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::invalid_argument("cannot move report into place: " + path);
  }
}

Json function_to_json(const WeightedGraph& graph, const DirichletDomain& dom,
                      const VertexFunction& u) {
  Json out = Json::object();
  for (int ci = 0; ci < dom.closure_size(); ++ci) {
    out[graph.id_of(dom.closure()[ci])] = u[ci];
  }
  return out;
}

Json eigen_result_to_json(const WeightedGraph& graph, const DirichletDomain& dom,
                          const EigenResult& result) {
  Json out;
  out["lambda1"] = result.lambda1;
  out["eigenfunction"] = function_to_json(graph, dom, result.eigenfunction);
  out["residual"] = result.residual;
  out["iterations"] = result.iterations;
  out["restarts"] = result.restart_values;
  out["converged"] = result.converged;
  out["psi"] = result.psi_value;
  out["min_before_clamp"] = result.min_before_clamp;
  return out;
}

Json solution_report_to_json(const WeightedGraph& graph, const DirichletDomain& dom,
                             const SolutionReport& report) {
  Json out;
  out["lambda1"] = report.lambda1;
  out["lambda"] = report.lambda;
  out["c"] = report.c;
  out["J"] = report.j_value;
  out["residual"] = report.residual;
  out["u"] = function_to_json(graph, dom, report.solution);
  out["geometry"] = Json{{"r", report.geometry.r},
                         {"inf_ring", report.geometry.inf_ring},
                         {"J_u1", report.geometry.j_u1}};
  out["converged"] = report.converged;
  out["outer_iterations"] = report.outer_iterations;
  out["negative_part_max"] = report.negative_part_max;
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

namespace {

void flatten(const Json& node, const std::string& prefix, std::string& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  if (node.is_array()) {
    int i = 0;
    for (const auto& value : node) {
      flatten(value, prefix + "." + std::to_string(i++), out);
    }
    return;
  }
  std::string value = node.dump();
  if (node.is_string()) value = node.get<std::string>();  // unquoted in CSV
  out += csv_escape(prefix);
  out += ",";
  out += csv_escape(value);
  out += "\n";
}

}  // namespace

std::string json_to_kv_csv(const Json& doc) {
  std::string out = "key,value\n";
  flatten(doc, "", out);
  return out;
}

}  // namespace plgraph
