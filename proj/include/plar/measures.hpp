#pragma once

// The four rough-set evaluation functions. Each Θ(D|B) decomposes into a sum
// over condition classes of a sub-function θ that needs only |E_i|, the
// decision histogram of E_i, and |U|. The direct_* functions evaluate the
// undecomposed definitions from object-level partitions and serve as oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plar/granule.hpp"
#include "plar/tabular.hpp"

namespace plar {

enum class Metric { pr, sce, lce, cce };

inline constexpr Metric kAllMetrics[] = {Metric::pr, Metric::sce, Metric::lce, Metric::cce};

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::pr: return "pr";
    case Metric::sce: return "sce";
    case Metric::lce: return "lce";
    case Metric::cce: return "cce";
  }
  return "?";
}

inline Metric parse_metric(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto m : kAllMetrics)
    if (to_string(m) == s) return m;
  throw DomainError("unknown metric '" + std::string(name) + "' (expected pr, sce, lce or cce)");
}

struct ThetaValue {
  Metric metric;
  double value;

  // Range of a single θ term or of a full Θ sum.
  bool in_range(double tol = 1e-12) const {
    switch (metric) {
      case Metric::pr: return value >= -1.0 - tol && value <= tol;
      case Metric::lce: return value >= -tol && value <= 1.0 + tol;
      case Metric::sce:
      case Metric::cce: return value >= -tol;
    }
    return false;
  }
};

inline constexpr double kDefaultLogBase = 2.0;

namespace detail {

inline void require_universe(Metric m, count_t universe) {
  if (universe < 1) throw DomainError("universe must contain at least one object");
  if (m == Metric::cce && universe < 2) throw DomainError("CCE is undefined on a one-object universe");
}

// θ(S_i) from the class size and its non-zero decision counts.
inline double theta_counts(Metric m, count_t class_size, std::span<const count_t> decision_counts, count_t universe,
                           double log_base) {
  const double u = static_cast<double>(universe);
  const double e = static_cast<double>(class_size);
  switch (m) {
    case Metric::pr:
      return decision_counts.size() == 1 ? -e / u : 0.0;
    case Metric::sce: {
      const double inv_log = 1.0 / std::log(log_base);
      double s = 0.0;
      for (auto c : decision_counts) {
        const double d = static_cast<double>(c);
        s += d * std::log(d / e) * inv_log;
      }
      return -s / u;
    }
    case Metric::lce: {
      double s = 0.0;
      for (auto c : decision_counts) {
        const double d = static_cast<double>(c);
        s += d * (e - d);
      }
      return s / (u * u);
    }
    case Metric::cce: {
      // C²(|E|) = |E|(|E|-1)/2 against C²(|U|) = |U|(|U|-1)/2: the halves cancel
      const double denom = u * u * (u - 1.0);
      double s = e * e * (e - 1.0);
      for (auto c : decision_counts) {
        const double d = static_cast<double>(c);
        s -= d * d * (d - 1.0);
      }
      return s / denom;
    }
  }
  return 0.0;
}

}  // namespace detail

inline double theta(Metric m, const ConditionGroup& group, count_t universe, double log_base = kDefaultLogBase) {
  detail::require_universe(m, universe);
  std::vector<count_t> counts;
  counts.reserve(group.decision_counts.size());
  for (const auto& [d, c] : group.decision_counts) counts.push_back(c);
  return detail::theta_counts(m, group.size, counts, universe, log_base);
}

// ---------------------------------------------------------------------------
// Object-level definitions.

// U/B as ascending object lists, classes ordered by their B-key.
inline std::vector<std::vector<std::size_t>> partition_objects(const DecisionTable& table, const AttributeSubset& b) {
  b.check_bounds(table.n_conditions());
  std::map<std::vector<value_id>, std::vector<std::size_t>> classes;
  for (std::size_t obj = 0; obj < table.n_objects(); ++obj) classes[project_row(table, obj, b, false)].push_back(obj);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(classes.size());
  for (auto& [k, objs] : classes) out.push_back(std::move(objs));
  return out;
}

// U/D indexed by decision value identifier.
inline std::vector<std::vector<std::size_t>> decision_partition(const DecisionTable& table) {
  std::vector<std::vector<std::size_t>> out(table.decision().cardinality());
  for (std::size_t obj = 0; obj < table.n_objects(); ++obj) out[table.decision_value(obj)].push_back(obj);
  return out;
}

// POS_B(D): union of the condition classes that fall inside a single decision class.
inline std::vector<std::size_t> direct_positive_region(const DecisionTable& table, const AttributeSubset& b) {
  std::vector<std::size_t> pos;
  for (const auto& cls : partition_objects(table, b)) {
    const auto d = table.decision_value(cls.front());
    if (std::all_of(cls.begin(), cls.end(), [&](std::size_t o) { return table.decision_value(o) == d; }))
      pos.insert(pos.end(), cls.begin(), cls.end());
  }
  std::sort(pos.begin(), pos.end());
  return pos;
}

// Θ(D|B) evaluated from its definition over U/B and U/D:
//   PR  -|POS_B(D)|/|U|
//   SCE -Σ_i p(E_i) Σ_j p(D_j|E_i) log p(D_j|E_i)
//   LCE  Σ_i Σ_j |D_j ∩ E_i|/|U| · |E_i − D_j|/|U|
//   CCE  Σ_i (|E_i|/|U| · C²(|E_i|)/C²(|U|) − Σ_j |E_i ∩ D_j|/|U| · C²(|E_i ∩ D_j|)/C²(|U|))
inline double direct_theta(const DecisionTable& table, const AttributeSubset& b, Metric m,
                           double log_base = kDefaultLogBase) {
  const count_t n = table.n_objects();
  detail::require_universe(m, n);
  const double u = static_cast<double>(n);
  if (m == Metric::pr) return -static_cast<double>(direct_positive_region(table, b).size()) / u;

  const auto decisions = decision_partition(table);
  std::vector<std::size_t> class_of(n);
  for (std::size_t j = 0; j < decisions.size(); ++j)
    for (auto o : decisions[j]) class_of[o] = j;

  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double total = 0.0;
  std::vector<std::size_t> touched;
  for (const auto& ei : partition_objects(table, b)) {
    const double e = static_cast<double>(ei.size());
    double term = 0.0;
    if (m == Metric::cce) term = e / u * choose2(e) / choose2(u);
    // only decision classes meeting E_i contribute
    touched.clear();
    for (auto o : ei) touched.push_back(class_of[o]);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (auto j : touched) {
      std::size_t inter = 0, outside = 0;  // |E_i ∩ D_j|, |E_i − D_j|
      for (auto o : ei) (class_of[o] == j ? inter : outside) += 1;
      const double x = static_cast<double>(inter);
      switch (m) {
        case Metric::sce: {
          const double p = x / e;
          term -= (e / u) * p * std::log(p) / std::log(log_base);
          break;
        }
        case Metric::lce: term += x / u * static_cast<double>(outside) / u; break;
        case Metric::cce: term -= x / u * choose2(x) / choose2(u); break;
        case Metric::pr: break;
      }
    }
    total += term;
  }
  return total;
}

}  // namespace plar
