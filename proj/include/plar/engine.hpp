#pragma once

// Θ(D|B) evaluation over the cached G^(C∪D), significance measures, the
// attribute core, and the two forward-selection drivers: the parallel one
// working on granules and the sequential object-level baseline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plar/granule.hpp"
#include "plar/measures.hpp"
#include "plar/parallel.hpp"
#include "plar/tabular.hpp"

namespace plar {

struct ReductionConfig {
  Metric metric = Metric::pr;
  double epsilon = 0.0;           // core threshold, strict
  // Both tolerances are relative to the magnitude of the Θ values compared:
  // x and y are "equal" when |x - y| <= tol * max(|x|, |y|).
  double stop_tolerance = 1e-10;  // slack on Θ(D|R) <= Θ(D|C)
  double tie_tolerance = 1e-10;   // argmin ties and the core's noise floor
  std::size_t model_parallelism_level = 1;
  std::size_t data_chunks = 1;
  double log_base = kDefaultLogBase;

  void validate() const {
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
    if (!(stop_tolerance >= 0.0)) throw DomainError("stop tolerance must be >= 0");
    if (!(tie_tolerance >= 0.0)) throw DomainError("tie tolerance must be >= 0");
    if (model_parallelism_level < 1) throw DomainError("model parallelism level must be >= 1");
    if (data_chunks < 1) throw DomainError("data chunk count must be >= 1");
    if (!(log_base > 0.0) || log_base == 1.0) throw DomainError("log base must be positive and != 1");
  }
};

enum class SignificanceKind { inner, outer };

struct SignificanceRecord {
  std::size_t attribute;
  double theta;         // Θ(D|B') of the probed subset B'
  double significance;  // difference against Θ(D|B)
  SignificanceKind kind;
};

struct SignificanceReport {
  double theta_base = 0.0;  // Θ(D|B) the records are measured against
  std::vector<SignificanceRecord> records;
};

struct CoreResult {
  AttributeSubset core;
  SignificanceReport report;
};

struct IterationRecord {
  std::size_t candidates;
  std::size_t chosen;
  double theta;  // Θ(D|R ∪ {chosen})
  double wall_ms;
};

struct ReductResult {
  AttributeSubset core;
  std::vector<std::size_t> reduct;  // core ascending, then selections in pick order
  double theta_full = 0.0;          // Θ(D|C)
  double theta_core = 0.0;          // Θ(D|Core)
  double theta_reduct = 0.0;        // Θ(D|R) at termination
  std::vector<IterationRecord> iterations;
  SignificanceReport core_report;
  double core_wall_ms = 0.0;
  // Candidates ran out before Θ(D|C) was reached; cannot happen for a
  // well-formed run since R = C always reaches it.
  bool exhausted = false;
};

struct EvaluationOptions {
  Metric metric = Metric::pr;
  std::size_t data_chunks = 1;
  std::size_t workers = 1;
  double log_base = kDefaultLogBase;
};

namespace detail {

inline void require_full(const GranularityRepresentation& g) {
  if (!g.has_decision()) throw DomainError("evaluation requires a representation that includes the decision");
}

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline double band(double x, double y, double tol) { return tol * std::max(std::abs(x), std::abs(y)); }

// Lowest index whose value lies within the tie band of the minimum.
inline std::size_t argmin_lowest(std::span<const double> values, double tol) {
  const double best = *std::min_element(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] <= best + band(values[i], best, tol)) return i;
  return 0;
}

// Lowest index of maximal outer significance, with the tie band taken on the
// Θ(D|R∪{a}) values the significances were derived from.
inline std::size_t argmax_lowest(std::span<const double> sigs, std::span<const double> thetas, double tol) {
  const auto best = static_cast<std::size_t>(std::max_element(sigs.begin(), sigs.end()) - sigs.begin());
  for (std::size_t i = 0; i < sigs.size(); ++i)
    if (sigs[i] >= sigs[best] - band(thetas[i], thetas[best], tol)) return i;
  return 0;
}

inline bool reached(double theta_r, double theta_full, double tol) {
  return theta_r <= theta_full + band(theta_r, theta_full, tol);
}

inline std::size_t fold_workers(const ReductionConfig& cfg) {
  // the worker budget goes to model parallelism whenever it is enabled
  return cfg.model_parallelism_level > 1 ? 1 : std::min(cfg.data_chunks, hardware_workers());
}

}  // namespace detail

namespace detail {

// Sorts (B-key, decision) codes and folds θ over the resulting condition
// classes. Codes must order like the keys and satisfy code / n_dec = B-key rank.
inline double fold_coded(const GranularityRepresentation& g_full, std::vector<CodedEntry>& coded,
                         std::uint64_t max_code, std::uint64_t n_dec, const EvaluationOptions& opt) {
  sort_by_code(coded, max_code);

  // runs of equal (B-key, decision) → |D_ij|; runs of equal B-key → E_i
  std::vector<count_t> dij;
  std::vector<std::size_t> group_start;
  std::uint64_t prev_code = 0, prev_group = 0;
  for (std::size_t i = 0; i < coded.size(); ++i) {
    const auto code = coded[i].code;
    const auto cnt = g_full.count(coded[i].src);
    if (i > 0 && code == prev_code) {
      dij.back() += cnt;
      continue;
    }
    const std::uint64_t grp = code / n_dec;
    if (i == 0 || grp != prev_group) group_start.push_back(dij.size());
    dij.push_back(cnt);
    prev_code = code;
    prev_group = grp;
  }
  group_start.push_back(dij.size());

  const std::size_t n_groups = group_start.size() - 1;
  const auto universe = g_full.universe_size();
  auto theta_of = [&](std::size_t k) {
    std::span<const count_t> counts(dij.data() + group_start[k], group_start[k + 1] - group_start[k]);
    count_t size = 0;
    for (auto c : counts) size += c;
    return theta_counts(opt.metric, size, counts, universe, opt.log_base);
  };
  return chunked_fold(ChunkPlan(n_groups, opt.data_chunks), theta_of, opt.workers);
}

}  // namespace detail

// Θ(D|B) = Σ_i θ(S_i). Coarsens G^(C∪D) to B ∪ D, groups by the B-key, and
// folds θ over the key-sorted groups in `data_chunks` contiguous chunks.
inline double evaluate_theta(const GranularityRepresentation& g_full, const AttributeSubset& b,
                             const EvaluationOptions& opt) {
  detail::require_full(g_full);
  detail::require_universe(opt.metric, g_full.universe_size());
  std::vector<std::size_t> positions, radices;
  for (auto a : b) positions.push_back(g_full.position_of(a));
  const std::size_t dpos = g_full.position_of(GranularityRepresentation::npos);
  positions.push_back(dpos);
  for (auto p : positions) radices.push_back(g_full.cardinalities()[p]);
  const std::uint64_t n_dec = std::max<std::size_t>(g_full.cardinalities()[dpos], 1);

  std::vector<detail::CodedEntry> coded;
  const auto max_code =
      detail::encode(g_full.size(), positions, radices, [&](std::size_t i, std::size_t p) { return g_full.key(i)[p]; },
                     coded);
  return detail::fold_coded(g_full, coded, max_code, n_dec, opt);
}

inline double evaluate_theta(const GranularityRepresentation& g_full, const AttributeSubset& b, Metric metric,
                             std::size_t data_chunks = 1) {
  return evaluate_theta(g_full, b, EvaluationOptions{metric, data_chunks, 1, kDefaultLogBase});
}

// Θ(D|B∖{a}) − Θ(D|B)
inline double inner_significance(const GranularityRepresentation& g_full, const AttributeSubset& b, std::size_t a,
                                 Metric metric, std::size_t data_chunks = 1) {
  if (!b.contains(a)) throw DomainError("inner significance needs an attribute inside the subset");
  return evaluate_theta(g_full, b.without(a), metric, data_chunks) - evaluate_theta(g_full, b, metric, data_chunks);
}

// Θ(D|B) − Θ(D|B∪{a})
inline double outer_significance(const GranularityRepresentation& g_full, const AttributeSubset& b, std::size_t a,
                                 Metric metric, std::size_t data_chunks = 1) {
  if (b.contains(a)) throw DomainError("outer significance needs an attribute outside the subset");
  if (!g_full.attributes().conditions.contains(a)) throw DomainError("attribute not in representation");
  return evaluate_theta(g_full, b, metric, data_chunks) - evaluate_theta(g_full, b.with(a), metric, data_chunks);
}


namespace detail {

// Θ(D|C∖{a}) for each condition attribute without re-encoding |C|−1 key
// positions per attribute. G^(C∪D) is key-sorted, so the prefix before
// position k has a dense rank obtainable from common-prefix lengths, and the
// suffix after k gets a dense rank precomputed right to left. The code
// (prefix rank, suffix rank, decision) orders like the C∖{a} key, so every
// result is bit-identical to evaluate_theta on C∖{a}.
class LeaveOneOut {
 public:
  explicit LeaveOneOut(const GranularityRepresentation& g) : g_(g), m_(g.attributes().conditions.size()) {
    const std::size_t n = g.size();
    lcp_.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
      auto a = g.key(i - 1), b = g.key(i);
      std::uint32_t l = 0;
      while (l < m_ && a[l] == b[l]) ++l;
      lcp_[i] = l;
    }
    suffix_.assign(m_ + 1, std::vector<std::uint32_t>(n, 0));
    distinct_.assign(m_ + 1, 1);
    std::vector<CodedEntry> coded(n);
    for (std::size_t k = m_; k-- > 0;) {
      const std::uint64_t below = distinct_[k + 1];
      for (std::size_t i = 0; i < n; ++i)
        coded[i] = {static_cast<std::uint64_t>(g.key(i)[k]) * below + suffix_[k + 1][i], static_cast<std::uint32_t>(i)};
      sort_by_code(coded, static_cast<std::uint64_t>(g.cardinalities()[k]) * below);
      std::uint32_t rank = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j > 0 && coded[j].code != coded[j - 1].code) ++rank;
        suffix_[k][coded[j].src] = rank;
      }
      distinct_[k] = static_cast<std::uint64_t>(rank) + 1;
    }
  }

  // Θ(D|C ∖ {attribute at key position k})
  double theta_without(std::size_t k, const EvaluationOptions& opt) const {
    const std::size_t n = g_.size();
    const std::uint64_t n_dec = std::max<std::size_t>(g_.cardinalities()[m_], 1);
    const std::uint64_t s_range = distinct_[k + 1];
    std::vector<CodedEntry> coded(n);
    std::uint64_t prefix = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && lcp_[i] < k) ++prefix;
      coded[i] = {(prefix * s_range + suffix_[k + 1][i]) * n_dec + g_.key(i)[m_], static_cast<std::uint32_t>(i)};
    }
    return fold_coded(g_, coded, ((prefix + 1) * s_range) * n_dec - 1, n_dec, opt);
  }

  // Codes stay below 2^64 as long as n^2 * |V_D| does.
  static bool fits(const GranularityRepresentation& g) {
    const long double n = static_cast<long double>(g.size()) + 1;
    return n * n * static_cast<long double>(std::max<std::size_t>(g.cardinalities().back(), 1)) < 1.8e19L;
  }

 private:
  const GranularityRepresentation& g_;
  std::size_t m_;
  std::vector<std::uint32_t> lcp_;
  std::vector<std::vector<std::uint32_t>> suffix_;
  std::vector<std::uint64_t> distinct_;
};

}  // namespace detail

namespace detail {

// Core from Θ(D|C) (first entry) and Θ(D|C∖{a}) for every a.
inline CoreResult core_from(const AttributeSubset& all, std::span<const double> thetas, const ReductionConfig& cfg) {
  CoreResult out;
  out.report.theta_base = thetas[0];
  std::vector<std::size_t> core;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const double sig = thetas[k + 1] - thetas[0];
    out.report.records.push_back({all[k], thetas[k + 1], sig, SignificanceKind::inner});
    if (sig > cfg.epsilon + band(thetas[k + 1], thetas[0], cfg.tie_tolerance)) core.push_back(all[k]);
  }
  out.core = AttributeSubset(std::move(core));
  return out;
}

}  // namespace detail

// Core = {a ∈ C : Θ(D|C∖{a}) − Θ(D|C) > ε}. The |C|+1 candidate subsets are
// evaluated as independent jobs.
inline CoreResult compute_core(const GranularityRepresentation& g_full, const ReductionConfig& cfg) {
  cfg.validate();
  detail::require_full(g_full);
  const AttributeSubset all = g_full.attributes().conditions;
  const EvaluationOptions opt{cfg.metric, cfg.data_chunks, detail::fold_workers(cfg), cfg.log_base};
  std::optional<detail::LeaveOneOut> loo;
  if (detail::LeaveOneOut::fits(g_full)) loo.emplace(g_full);
  auto thetas = bounded_map(
      all.size() + 1,
      [&](std::size_t k) {
        if (k == 0) return evaluate_theta(g_full, all, opt);
        return loo ? loo->theta_without(k - 1, opt) : evaluate_theta(g_full, all.without(all[k - 1]), opt);
      },
      cfg.model_parallelism_level);
  return detail::core_from(all, thetas, cfg);
}

inline CoreResult compute_core(const GranularityRepresentation& g_full, Metric metric, double epsilon,
                               std::size_t model_parallelism_level = 1, std::size_t data_chunks = 1) {
  ReductionConfig cfg;
  cfg.metric = metric;
  cfg.epsilon = epsilon;
  cfg.model_parallelism_level = model_parallelism_level;
  cfg.data_chunks = data_chunks;
  return compute_core(g_full, cfg);
}

// Forward selection on the granularity representation. Starting from the
// core, every remaining attribute is evaluated as R ∪ {a} (at most
// model_parallelism_level jobs in flight) and the argmin is appended, until
// Θ(D|R) ≤ Θ(D|C) + stop_tolerance.
inline ReductResult plar_reduce(const GranularityRepresentation& g_full, const ReductionConfig& cfg) {
  cfg.validate();
  detail::require_full(g_full);
  const auto t0 = detail::Clock::now();
  const AttributeSubset all = g_full.attributes().conditions;
  const EvaluationOptions opt{cfg.metric, cfg.data_chunks, detail::fold_workers(cfg), cfg.log_base};

  ReductResult res;
  auto core = compute_core(g_full, cfg);
  res.core = core.core;
  res.core_report = core.report;
  res.theta_full = core.report.theta_base;
  res.reduct.assign(res.core.begin(), res.core.end());
  res.theta_core = res.core == all ? res.theta_full : evaluate_theta(g_full, res.core, opt);
  res.core_wall_ms = detail::elapsed_ms(t0);

  AttributeSubset r = res.core;
  double theta_r = res.theta_core;
  while (!detail::reached(theta_r, res.theta_full, cfg.stop_tolerance) && r.size() < all.size()) {
    const auto ti = detail::Clock::now();
    const AttributeSubset cands = r.complement(all.size());
    auto thetas = bounded_map(
        cands.size(), [&](std::size_t k) { return evaluate_theta(g_full, r.with(cands[k]), opt); },
        cfg.model_parallelism_level);
    const std::size_t pick = detail::argmin_lowest(thetas, cfg.tie_tolerance);
    r = r.with(cands[pick]);
    res.reduct.push_back(cands[pick]);
    theta_r = thetas[pick];
    res.iterations.push_back({cands.size(), cands[pick], theta_r, detail::elapsed_ms(ti)});
  }
  res.theta_reduct = theta_r;
  res.exhausted = !detail::reached(theta_r, res.theta_full, cfg.stop_tolerance);
  return res;
}

// Sequential baseline on object-level partitions: core by inner significance,
// then repeatedly the attribute of maximal outer significance Θ(D|R) − Θ(D|R∪{a}).
inline ReductResult har_reduce(const DecisionTable& table, const ReductionConfig& cfg) {
  cfg.validate();
  const auto t0 = detail::Clock::now();
  const AttributeSubset all = AttributeSubset::all(table.n_conditions());
  auto eval = [&](const AttributeSubset& b) { return direct_theta(table, b, cfg.metric, cfg.log_base); };

  std::vector<double> core_thetas{eval(all)};
  for (auto a : all) core_thetas.push_back(eval(all.without(a)));
  auto core = detail::core_from(all, core_thetas, cfg);

  ReductResult res;
  res.core = core.core;
  res.core_report = core.report;
  res.theta_full = core_thetas[0];
  res.reduct.assign(res.core.begin(), res.core.end());
  res.theta_core = eval(res.core);
  res.core_wall_ms = detail::elapsed_ms(t0);

  AttributeSubset r = res.core;
  double theta_r = res.theta_core;
  while (!detail::reached(theta_r, res.theta_full, cfg.stop_tolerance) && r.size() < all.size()) {
    const auto ti = detail::Clock::now();
    const AttributeSubset cands = r.complement(all.size());
    std::vector<double> thetas, sigs;
    for (auto a : cands) {
      thetas.push_back(eval(r.with(a)));
      sigs.push_back(theta_r - thetas.back());
    }
    const std::size_t best = detail::argmax_lowest(sigs, thetas, cfg.tie_tolerance);
    const double best_theta = thetas[best];
    r = r.with(cands[best]);
    res.reduct.push_back(cands[best]);
    theta_r = best_theta;
    res.iterations.push_back({cands.size(), cands[best], theta_r, detail::elapsed_ms(ti)});
  }
  res.theta_reduct = theta_r;
  res.exhausted = !detail::reached(theta_r, res.theta_full, cfg.stop_tolerance);
  return res;
}

}  // namespace plar
