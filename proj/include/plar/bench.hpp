#pragma once

// Runs one reduction across a grid of model-parallelism levels and data-chunk
// counts and tabulates wall times.

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "plar/engine.hpp"
#include "plar/report.hpp"

namespace plar {

struct BenchRow {
  std::size_t level = 1;
  std::size_t chunks = 1;
  std::vector<std::size_t> reduct;
  std::vector<double> iteration_ms;
  double total_ms = 0.0;
  double speedup = 1.0;  // relative to level 1 at the same chunk count
};

struct BenchTable {
  std::vector<BenchRow> rows;
  // Every row selected the same reduct sequence.
  bool identical_reducts = true;
};

inline BenchTable run_bench(const GranularityRepresentation& g_full, ReductionConfig base,
                            const std::vector<std::size_t>& levels, const std::vector<std::size_t>& chunks,
                            std::size_t repeats = 1) {
  if (levels.empty() || chunks.empty()) throw DomainError("bench grid must name at least one level and chunk count");
  if (repeats < 1) throw DomainError("bench repeats must be at least 1");
  BenchTable out;
  for (auto c : chunks) {
    const std::size_t first = out.rows.size();
    for (auto l : levels) {
      ReductionConfig cfg = base;
      cfg.model_parallelism_level = l;
      cfg.data_chunks = c;
      BenchRow row{l, c, {}, {}, 0.0, 1.0};
      for (std::size_t rep = 0; rep < repeats; ++rep) {
        const auto t0 = detail::Clock::now();
        auto r = plar_reduce(g_full, cfg);
        const double ms = detail::elapsed_ms(t0);
        // keep the fastest repetition
        if (rep == 0 || ms < row.total_ms) {
          row.total_ms = ms;
          row.iteration_ms.clear();
          for (const auto& it : r.iterations) row.iteration_ms.push_back(it.wall_ms);
        }
        row.reduct = r.reduct;
      }
      out.rows.push_back(std::move(row));
    }
    const BenchRow* ref = nullptr;
    for (std::size_t k = first; k < out.rows.size(); ++k)
      if (out.rows[k].level == 1) ref = &out.rows[k];
    for (std::size_t k = first; k < out.rows.size(); ++k)
      out.rows[k].speedup = ref && out.rows[k].total_ms > 0 ? ref->total_ms / out.rows[k].total_ms : 0.0;
  }
  for (const auto& row : out.rows)
    if (row.reduct != out.rows.front().reduct) out.identical_reducts = false;
  return out;
}

inline void print_bench(std::ostream& out, const BenchTable& t) {
  out << "level\tchunks\ttotal_ms\tspeedup\t|R|\titeration_ms\n";
  for (const auto& r : t.rows) {
    out << r.level << '\t' << r.chunks << '\t' << to_ms(r.total_ms) << '\t' << std::fixed << std::setprecision(2)
        << r.speedup << std::defaultfloat << '\t' << r.reduct.size() << '\t';
    for (std::size_t i = 0; i < r.iteration_ms.size(); ++i) out << (i ? "," : "") << to_ms(r.iteration_ms[i]);
    out << '\n';
  }
  out << "identical_reducts\t" << (t.identical_reducts ? "yes" : "no") << '\n';
}

inline nlohmann::json bench_document(const DatasetInfo& dataset, const BenchTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    std::vector<std::int64_t> its;
    for (double ms : r.iteration_ms) its.push_back(to_ms(ms));
    rows.push_back({{"level", r.level},
                    {"chunks", r.chunks},
                    {"total_ms", to_ms(r.total_ms)},
                    {"speedup", r.speedup},
                    {"reduct", r.reduct},
                    {"iteration_ms", its}});
  }
  return {{"dataset", dataset}, {"rows", rows}, {"identical_reducts", t.identical_reducts}};
}

}  // namespace plar
