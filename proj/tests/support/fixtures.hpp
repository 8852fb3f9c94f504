#pragma once

#include <sstream>
#include <string>

#include "plar/plar.hpp"
#include "support/oracle.hpp"

namespace fixtures {

inline plar::DecisionTable load(const oracle::RawTable& t) {
  plar::SchemaConfig cfg;
  cfg.header = plar::HeaderMode::no;
  return plar::parse_table(std::string_view(t.csv()), cfg);
}

inline plar::DecisionTable sample_table() { return plar::parse_table(std::string_view(oracle::sample_table_csv())); }

inline plar::AttributeSubset subset(const std::vector<std::size_t>& v) { return plar::AttributeSubset(v); }

inline int metric_index(plar::Metric m) { return static_cast<int>(m); }

}  // namespace fixtures
