#pragma once

// Command-line front end. run() is separate from main() so tests can drive it
// with captured streams.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plar/plar.hpp"

namespace plar::cli {

struct InputOptions {
  std::string path;
  std::string decision_col;
  std::string missing = "keep";
  std::string header = "auto";
  char delimiter = ',';
};

struct RunOptions {
  std::string metric = "pr";
  double epsilon = 0.0;
  double stop_tol = 1e-10;
  std::size_t model_parallelism = hardware_workers();
  std::size_t data_chunks = hardware_workers();
  bool verify = false;
  std::string output;
};

inline constexpr double kVerifyTolerance = 1e-9;

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline SchemaConfig schema(const InputOptions& in) {
  SchemaConfig cfg;
  cfg.delimiter = in.delimiter;
  cfg.decision_column = in.decision_col;
  cfg.missing = in.missing == "drop" ? MissingPolicy::drop : MissingPolicy::keep;
  cfg.header = in.header == "yes" ? HeaderMode::yes : in.header == "no" ? HeaderMode::no : HeaderMode::automatic;
  return cfg;
}

inline DecisionTable load(const InputOptions& in) {
  std::ifstream f(in.path);
  if (!f) throw std::runtime_error("cannot open '" + in.path + "'");
  return parse_table(f, schema(in));
}

inline ReductionConfig reduction_config(const RunOptions& o) {
  ReductionConfig cfg;
  cfg.metric = parse_metric(o.metric);
  cfg.epsilon = o.epsilon;
  cfg.stop_tolerance = o.stop_tol;
  cfg.model_parallelism_level = o.model_parallelism;
  cfg.data_chunks = o.data_chunks;
  cfg.validate();
  return cfg;
}

// Comma-separated attribute names; a token that names no attribute is read
// as a zero-based index.
inline AttributeSubset parse_subset(const DecisionTable& table, const std::string& spec) {
  std::vector<std::size_t> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = std::string(detail::trim(tok));
    if (tok.empty()) continue;
    if (auto a = table.find_condition(tok)) {
      out.push_back(*a);
      continue;
    }
    std::size_t idx = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
    if (ec != std::errc() || p != tok.data() + tok.size() || idx >= table.n_conditions())
      throw DomainError("unknown condition attribute '" + tok + "'");
    out.push_back(idx);
  }
  return AttributeSubset(out);
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline void check_close(const char* what, double fast, double oracle) {
  if (std::abs(fast - oracle) > kVerifyTolerance) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "verification failed for " << what << ": " << fast << " vs oracle " << oracle;
    throw VerifyError(msg.str());
  }
}

inline void add_input(CLI::App* sub, InputOptions& in) {
  sub->add_option("input", in.path, "Delimiter-separated decision table")->required();
  sub->add_option("--decision-col", in.decision_col, "Decision column name or zero-based index (default last)");
  sub->add_option("--missing", in.missing, "Rows containing '?'")->check(CLI::IsMember({"keep", "drop"}));
  sub->add_option("--header", in.header, "First line is a header")->check(CLI::IsMember({"auto", "yes", "no"}));
  sub->add_option("--delimiter", in.delimiter, "Field delimiter");
}

inline void add_run(CLI::App* sub, RunOptions& o) {
  sub->add_option("--metric", o.metric, "pr, sce, lce or cce")->check(CLI::IsMember({"pr", "sce", "lce", "cce"},
                                                                                     CLI::ignore_case));
  sub->add_option("--epsilon", o.epsilon, "Core threshold");
  sub->add_option("--stop-tol", o.stop_tol, "Relative slack on the stopping test");
  sub->add_option("--model-parallelism", o.model_parallelism, "Candidate evaluations in flight")->capture_default_str();
  sub->add_option("--data-chunks", o.data_chunks, "Chunks per evaluation fold")->capture_default_str();
  sub->add_flag("--verify", o.verify, "Cross-check against the object-level definitions");
  sub->add_option("--output", o.output, "Write the result here instead of stdout");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribute reduction over granularity representations"};
  app.require_subcommand(1);

  InputOptions in;
  RunOptions ro;
  std::string subset;
  GeneratorSpec gen;
  std::string gen_output;
  std::vector<std::size_t> levels{1, 2, 4};
  std::vector<std::size_t> chunk_grid;
  std::size_t repeats = 1;
  bool bench_json = false;

  auto* reduce = app.add_subcommand("reduce", "Compute a reduct and print a JSON report");
  add_input(reduce, in);
  add_run(reduce, ro);

  auto* core = app.add_subcommand("core", "Compute the attribute core with inner significances");
  add_input(core, in);
  add_run(core, ro);

  auto* evaluate = app.add_subcommand("evaluate", "Print the evaluation function on a subset");
  add_input(evaluate, in);
  add_run(evaluate, ro);
  evaluate->add_option("--attrs", subset, "Comma-separated condition attributes (empty means none)");

  auto* granules = app.add_subcommand("granules", "Dump the granularity representation of the full table");
  add_input(granules, in);
  granules->add_option("--output", ro.output, "Write here instead of stdout");

  auto* gencmd = app.add_subcommand("gen", "Write a seeded uniform random table as CSV");
  gencmd->add_option("--objects,-n", gen.objects)->check(CLI::PositiveNumber);
  gencmd->add_option("--attrs", gen.attributes)->check(CLI::PositiveNumber);
  gencmd->add_option("--values", gen.values)->check(CLI::PositiveNumber);
  gencmd->add_option("--classes", gen.classes)->check(CLI::PositiveNumber);
  gencmd->add_option("--seed", gen.seed);
  gencmd->add_option("--output", gen_output);

  auto* bench = app.add_subcommand("bench", "Time one reduction over a grid of parallelism settings");
  add_input(bench, in);
  add_run(bench, ro);
  bench->add_option("--levels", levels, "Model-parallelism levels")->delimiter(',');
  bench->add_option("--chunk-grid", chunk_grid, "Data-chunk counts (default: --data-chunks)")->delimiter(',');
  bench->add_option("--repeats", repeats, "Repetitions per cell; the fastest is kept")->check(CLI::PositiveNumber);
  bench->add_flag("--json", bench_json, "Emit JSON instead of a tab-separated table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gencmd) {
      Sink sink(gen_output, out);
      write_csv(*sink, gen);
      return 0;
    }

    const auto t0 = detail::Clock::now();
    const DecisionTable table = load(in);
    const auto g = build_granularity(table);
    const auto info = describe(in.path, table, g);

    if (*granules) {
      Sink sink(ro.output, out);
      dump(*sink, g, &table);
      return 0;
    }

    const auto cfg = reduction_config(ro);
    Sink sink(ro.output, out);

    if (*evaluate) {
      const auto b = parse_subset(table, subset);
      const double th = evaluate_theta(g, b, cfg.metric, cfg.data_chunks);
      *sink << std::setprecision(17) << th << '\n';
      if (ro.verify) {
        const double oracle = direct_theta(table, b, cfg.metric);
        *sink << "oracle " << oracle << "\ndelta " << std::abs(th - oracle) << '\n';
        check_close("evaluate", th, oracle);
      }
      return 0;
    }

    if (*core) {
      const auto c = compute_core(g, cfg);
      if (ro.verify) {
        const auto all = AttributeSubset::all(table.n_conditions());
        check_close("theta(C)", c.report.theta_base, direct_theta(table, all, cfg.metric));
        for (const auto& rec : c.report.records)
          check_close("theta(C - a)", rec.theta, direct_theta(table, all.without(rec.attribute), cfg.metric));
      }
      *sink << core_document(info, cfg, c).dump(2) << '\n';
      return 0;
    }

    if (*reduce) {
      const auto r = plar_reduce(g, cfg);
      if (r.exhausted) err << "warning: candidates exhausted before the full-set value was reached\n";
      if (ro.verify) {
        check_close("theta(C)", r.theta_full, direct_theta(table, AttributeSubset::all(table.n_conditions()), cfg.metric));
        check_close("theta(R)", r.theta_reduct, direct_theta(table, AttributeSubset(r.reduct), cfg.metric));
      }
      const auto rep = make_report(info, cfg, r, detail::elapsed_ms(t0));
      *sink << json(rep).dump(2) << '\n';
      return 0;
    }

    if (*bench) {
      if (chunk_grid.empty()) chunk_grid = {cfg.data_chunks};
      const auto t = run_bench(g, cfg, levels, chunk_grid, repeats);
      if (bench_json)
        *sink << bench_document(info, t).dump(2) << '\n';
      else
        print_bench(*sink, t);
      if (!t.identical_reducts) {
        err << "error: reducts differ across parallelism settings\n";
        return 3;
      }
      return 0;
    }
  } catch (const VerifyError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace plar::cli
