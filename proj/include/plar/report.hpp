#pragma once

// JSON documents emitted by the command-line tool. Timings are stored as
// whole milliseconds so that reports diff cleanly; Θ values keep full
// double precision.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "plar/engine.hpp"
#include "plar/measures.hpp"

namespace plar {

using json = nlohmann::json;

struct DatasetInfo {
  std::string path;
  std::uint64_t objects = 0;
  std::uint64_t conditions = 0;
  std::uint64_t decision_classes = 0;
  std::uint64_t granules = 0;  // |G^(C∪D)|
  std::vector<std::string> attribute_names;

  bool operator==(const DatasetInfo&) const = default;
};

struct ConfigEcho {
  std::string metric = "pr";
  double epsilon = 0.0;
  double stop_tolerance = 1e-10;
  std::uint64_t model_parallelism = 1;
  std::uint64_t data_chunks = 1;

  bool operator==(const ConfigEcho&) const = default;
};

struct IterationEntry {
  std::uint64_t candidates = 0;
  std::uint64_t chosen = 0;
  double theta = 0.0;
  std::int64_t wall_ms = 0;

  bool operator==(const IterationEntry&) const = default;
};

struct RunReport {
  DatasetInfo dataset;
  ConfigEcho config;
  std::vector<std::uint64_t> core;
  std::vector<std::uint64_t> reduct;
  double theta_full = 0.0;
  double theta_core = 0.0;
  double theta_reduct = 0.0;
  std::vector<IterationEntry> iterations;
  std::int64_t core_wall_ms = 0;
  std::int64_t total_wall_ms = 0;

  bool operator==(const RunReport&) const = default;
};

inline std::int64_t to_ms(double ms) { return static_cast<std::int64_t>(std::llround(ms)); }

inline ConfigEcho echo(const ReductionConfig& cfg) {
  return {std::string(to_string(cfg.metric)), cfg.epsilon, cfg.stop_tolerance, cfg.model_parallelism_level,
          cfg.data_chunks};
}

inline DatasetInfo describe(const std::string& path, const DecisionTable& table, const GranularityRepresentation& g) {
  DatasetInfo d{path, table.n_objects(), table.n_conditions(), table.decision().cardinality(), g.size(), {}};
  for (const auto& c : table.conditions()) d.attribute_names.push_back(c.name());
  return d;
}

inline RunReport make_report(DatasetInfo dataset, const ReductionConfig& cfg, const ReductResult& r,
                             double total_wall_ms) {
  RunReport rep;
  rep.dataset = std::move(dataset);
  rep.config = echo(cfg);
  rep.core.assign(r.core.begin(), r.core.end());
  rep.reduct.assign(r.reduct.begin(), r.reduct.end());
  rep.theta_full = r.theta_full;
  rep.theta_core = r.theta_core;
  rep.theta_reduct = r.theta_reduct;
  for (const auto& it : r.iterations) rep.iterations.push_back({it.candidates, it.chosen, it.theta, to_ms(it.wall_ms)});
  rep.core_wall_ms = to_ms(r.core_wall_ms);
  rep.total_wall_ms = to_ms(total_wall_ms);
  return rep;
}

inline void to_json(json& j, const DatasetInfo& d) {
  j = json{{"path", d.path},         {"objects", d.objects},   {"conditions", d.conditions},
           {"decision_classes", d.decision_classes}, {"granules", d.granules}, {"attribute_names", d.attribute_names}};
}
inline void from_json(const json& j, DatasetInfo& d) {
  j.at("path").get_to(d.path);
  j.at("objects").get_to(d.objects);
  j.at("conditions").get_to(d.conditions);
  j.at("decision_classes").get_to(d.decision_classes);
  j.at("granules").get_to(d.granules);
  j.at("attribute_names").get_to(d.attribute_names);
}

inline void to_json(json& j, const ConfigEcho& c) {
  j = json{{"metric", c.metric},
           {"epsilon", c.epsilon},
           {"stop_tolerance", c.stop_tolerance},
           {"model_parallelism", c.model_parallelism},
           {"data_chunks", c.data_chunks}};
}
inline void from_json(const json& j, ConfigEcho& c) {
  j.at("metric").get_to(c.metric);
  j.at("epsilon").get_to(c.epsilon);
  j.at("stop_tolerance").get_to(c.stop_tolerance);
  j.at("model_parallelism").get_to(c.model_parallelism);
  j.at("data_chunks").get_to(c.data_chunks);
}

inline void to_json(json& j, const IterationEntry& e) {
  j = json{{"candidates", e.candidates}, {"chosen", e.chosen}, {"theta", e.theta}, {"wall_ms", e.wall_ms}};
}
inline void from_json(const json& j, IterationEntry& e) {
  j.at("candidates").get_to(e.candidates);
  j.at("chosen").get_to(e.chosen);
  j.at("theta").get_to(e.theta);
  j.at("wall_ms").get_to(e.wall_ms);
}

inline void to_json(json& j, const RunReport& r) {
  j = json{{"dataset", r.dataset},
           {"config", r.config},
           {"core", r.core},
           {"reduct", r.reduct},
           {"theta_full", r.theta_full},
           {"theta_core", r.theta_core},
           {"theta_reduct", r.theta_reduct},
           {"iterations", r.iterations},
           {"core_wall_ms", r.core_wall_ms},
           {"total_wall_ms", r.total_wall_ms}};
}
inline void from_json(const json& j, RunReport& r) {
  j.at("dataset").get_to(r.dataset);
  j.at("config").get_to(r.config);
  j.at("core").get_to(r.core);
  j.at("reduct").get_to(r.reduct);
  j.at("theta_full").get_to(r.theta_full);
  j.at("theta_core").get_to(r.theta_core);
  j.at("theta_reduct").get_to(r.theta_reduct);
  j.at("iterations").get_to(r.iterations);
  j.at("core_wall_ms").get_to(r.core_wall_ms);
  j.at("total_wall_ms").get_to(r.total_wall_ms);
}

// Core-stage document.
inline json core_document(const DatasetInfo& dataset, const ReductionConfig& cfg, const CoreResult& c) {
  json records = json::array();
  for (const auto& rec : c.report.records)
    records.push_back({{"attribute", rec.attribute},
                       {"theta", rec.theta},
                       {"significance", rec.significance},
                       {"kind", rec.kind == SignificanceKind::inner ? "inner" : "outer"}});
  return json{{"dataset", dataset},
              {"config", echo(cfg)},
              {"theta_full", c.report.theta_base},
              {"core", std::vector<std::size_t>(c.core.begin(), c.core.end())},
              {"significance", records}};
}

inline SignificanceReport parse_significance(const json& doc) {
  SignificanceReport rep;
  doc.at("theta_full").get_to(rep.theta_base);
  for (const auto& r : doc.at("significance")) {
    const auto kind = r.at("kind").get<std::string>();
    if (kind != "inner" && kind != "outer") throw DomainError("unknown significance kind '" + kind + "'");
    rep.records.push_back({r.at("attribute").get<std::size_t>(), r.at("theta").get<double>(),
                           r.at("significance").get<double>(),
                           kind == "inner" ? SignificanceKind::inner : SignificanceKind::outer});
  }
  return rep;
}

}  // namespace plar
