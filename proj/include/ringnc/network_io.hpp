#pragma once

// JSON network description:
// {"nodes":[{"rate_bps":..,"latency_s":..}],
//  "flows":[{"id":..,"source":..,"hops":..,"rho_bps":..,"sigma0_bits":..,
//            "priority":..,"max_frame_bits":..}]}

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringnc/errors.hpp"
#include "ringnc/model.hpp"

namespace ringnc {

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
  return *it;
}

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline int integer_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace detail

inline RingNetwork network_from_json(const nlohmann::json& doc) {
  const auto& nodes = detail::field(doc, "nodes", "network");
  const auto& flows = detail::field(doc, "flows", "network");
  if (!nodes.is_array()) throw ParseError("network.nodes: expected an array");
  if (!flows.is_array()) throw ParseError("network.flows: expected an array");

  std::vector<Node> ns;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string where = "nodes[" + std::to_string(k) + "]";
    ns.push_back({detail::number_field(nodes[k], "rate_bps", where), detail::number_field(nodes[k], "latency_s", where)});
  }
  std::vector<Flow> fs;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const std::string where = "flows[" + std::to_string(i) + "]";
    const auto& o = flows[i];
    Flow f;
    f.id = detail::integer_field(o, "id", where);
    f.source = detail::integer_field(o, "source", where);
    f.hops = detail::integer_field(o, "hops", where);
    f.rho = detail::number_field(o, "rho_bps", where);
    f.sigma0 = detail::number_field(o, "sigma0_bits", where);
    f.priority = detail::integer_field(o, "priority", where);
    f.max_frame = detail::number_field(o, "max_frame_bits", where);
    fs.push_back(f);
  }
  return RingNetwork(std::move(ns), std::move(fs));
}

inline nlohmann::json network_to_json(const RingNetwork& net) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : net.nodes()) doc["nodes"].push_back({{"rate_bps", n.rate}, {"latency_s", n.latency}});
  doc["flows"] = nlohmann::json::array();
  for (const auto& f : net.flows())
    doc["flows"].push_back({{"id", f.id},
                            {"source", f.source},
                            {"hops", f.hops},
                            {"rho_bps", f.rho},
                            {"sigma0_bits", f.sigma0},
                            {"priority", f.priority},
                            {"max_frame_bits", f.max_frame}});
  return doc;
}

inline RingNetwork parse_network(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return network_from_json(doc);
}

inline RingNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open network file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

inline void save_network(const RingNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << network_to_json(net).dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace ringnc
