#pragma once

#include <istream>
#include <ostream>

#include <json.hpp>

#include "ckm/instance.hpp"

namespace ckm {

// Instance schema:
//   {"n": int, "k": int, "dist": [[..]], "edges": [[u,v],..],
//    "centers": [..] (optional), "metric": bool}
// Clustering schema:
//   {"clusters": [{"center": c, "members": [..]}, ..]}

inline nlohmann::json to_json(const Instance<double>& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["k"] = inst.k;
  auto dist = nlohmann::json::array();
  for (int i = 0; i < inst.n; ++i) {
    auto row = nlohmann::json::array();
    for (int l = 0; l < inst.n; ++l) row.push_back(inst.dist(i, l));
    dist.push_back(std::move(row));
  }
  j["dist"] = std::move(dist);
  auto edges = nlohmann::json::array();
  for (const auto& e : inst.edges)
    edges.push_back(nlohmann::json::array({e[0], e[1]}));
  j["edges"] = std::move(edges);
  if (inst.fixed_centers) j["centers"] = *inst.fixed_centers;
  j["metric"] = inst.metric;
  return j;
}

inline Instance<double> instance_from_json(const nlohmann::json& j,
                                           double tol = 1e-9) {
  Instance<double> inst;
  inst.n = j.at("n").get<int>();
  inst.k = j.at("k").get<int>();
  if (inst.n <= 0) throw contract_error("instance json: bad n");
  inst.dist.resize(inst.n, inst.n);
  const auto& dist = j.at("dist");
  if (static_cast<int>(dist.size()) != inst.n)
    throw contract_error("instance json: dist row count");
  for (int i = 0; i < inst.n; ++i) {
    if (static_cast<int>(dist[i].size()) != inst.n)
      throw contract_error("instance json: dist column count");
    for (int l = 0; l < inst.n; ++l) inst.dist(i, l) = dist[i][l].get<double>();
  }
  for (const auto& e : j.at("edges")) {
    if (e.size() != 2) throw contract_error("instance json: bad edge");
    inst.edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  if (j.contains("centers") && !j["centers"].is_null())
    inst.fixed_centers = j["centers"].get<std::vector<int>>();
  inst.metric = j.value("metric", true);
  check_instance(inst, tol);
  return inst;
}

inline nlohmann::json to_json(const Clustering& clustering) {
  nlohmann::json j;
  auto arr = nlohmann::json::array();
  for (const auto& cl : clustering.clusters) {
    nlohmann::json c;
    c["center"] = cl.center;
    c["members"] = cl.members;
    arr.push_back(std::move(c));
  }
  j["clusters"] = std::move(arr);
  return j;
}

inline Clustering clustering_from_json(const nlohmann::json& j) {
  Clustering clustering;
  for (const auto& c : j.at("clusters"))
    clustering.clusters.push_back(make_cluster(
        c.at("center").get<int>(), c.at("members").get<std::vector<int>>()));
  return clustering;
}

inline nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["feasible"] = report.feasible();
  auto arr = nlohmann::json::array();
  for (const auto& v : report.violations) {
    nlohmann::json e;
    e["kind"] = to_string(v.kind);
    e["cluster"] = v.cluster;
    e["detail"] = v.detail;
    arr.push_back(std::move(e));
  }
  j["violations"] = std::move(arr);
  return j;
}

}  // namespace ckm
