#pragma once

// Granularity representation G^(A): the distinct value vectors of a table over
// an attribute set A, each paired with its multiplicity. Keys are laid out in
// ascending condition-attribute order with the decision last, and granules are
// kept sorted lexicographically by key.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plar/tabular.hpp"

namespace plar {

// A ⊆ C ∪ D: condition attributes plus an optional decision flag.
struct AttributeSet {
  AttributeSubset conditions;
  bool decision = false;

  std::size_t width() const noexcept { return conditions.size() + (decision ? 1 : 0); }
  bool is_subset_of(const AttributeSet& q) const {
    return conditions.is_subset_of(q.conditions) && (!decision || q.decision);
  }
  friend bool operator==(const AttributeSet&, const AttributeSet&) = default;
};

struct Granule {
  std::vector<value_id> key;
  count_t count = 0;
  friend bool operator==(const Granule&, const Granule&) = default;
};

// One condition class E_i with its decision histogram E_i//D.
struct ConditionGroup {
  std::vector<value_id> key;
  std::vector<std::pair<value_id, count_t>> decision_counts;  // ascending decision id, no zero entries
  count_t size = 0;
  friend bool operator==(const ConditionGroup&, const ConditionGroup&) = default;
};

class GranularityRepresentation {
 public:
  GranularityRepresentation(AttributeSet attrs, std::vector<std::size_t> cardinalities, std::vector<value_id> keys,
                            std::vector<count_t> counts, count_t universe_size)
      : attrs_(std::move(attrs)),
        cards_(std::move(cardinalities)),
        keys_(std::move(keys)),
        counts_(std::move(counts)),
        universe_(universe_size) {}

  const AttributeSet& attributes() const noexcept { return attrs_; }
  std::size_t width() const noexcept { return attrs_.width(); }
  std::size_t size() const noexcept { return counts_.size(); }
  count_t universe_size() const noexcept { return universe_; }
  bool has_decision() const noexcept { return attrs_.decision; }

  std::span<const value_id> key(std::size_t i) const {
    return std::span<const value_id>(keys_).subspan(i * width(), width());
  }
  count_t count(std::size_t i) const { return counts_[i]; }
  std::span<const count_t> counts() const noexcept { return counts_; }
  // Dictionary size of each key position.
  std::span<const std::size_t> cardinalities() const noexcept { return cards_; }

  std::vector<Granule> granules() const {
    std::vector<Granule> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back({{key(i).begin(), key(i).end()}, count(i)});
    return out;
  }

  // Key position of a condition attribute, or of the decision when attr == npos.
  std::size_t position_of(std::size_t attr) const {
    if (attr == npos) {
      if (!attrs_.decision) throw DomainError("representation does not include the decision");
      return attrs_.conditions.size();
    }
    auto it = std::lower_bound(attrs_.conditions.begin(), attrs_.conditions.end(), attr);
    if (it == attrs_.conditions.end() || *it != attr) throw DomainError("attribute not in representation");
    return static_cast<std::size_t>(it - attrs_.conditions.begin());
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  AttributeSet attrs_;
  std::vector<std::size_t> cards_;
  std::vector<value_id> keys_;
  std::vector<count_t> counts_;
  count_t universe_;
};

namespace detail {

struct CodedEntry {
  std::uint64_t code;
  std::uint32_t src;
};

// LSD radix sort on `code`; stable, so equal codes keep source order.
inline void sort_by_code(std::vector<CodedEntry>& v, std::uint64_t max_code) {
  if (v.size() < 2048) {
    std::stable_sort(v.begin(), v.end(), [](const CodedEntry& a, const CodedEntry& b) { return a.code < b.code; });
    return;
  }
  int bits = 0;
  while (bits < 64 && (max_code >> bits) != 0) ++bits;
  constexpr int kDigit = 11;
  constexpr std::size_t kBuckets = std::size_t{1} << kDigit;
  std::vector<CodedEntry> tmp(v.size());
  std::vector<std::size_t> hist(kBuckets);
  for (int shift = 0; shift < bits; shift += kDigit) {
    std::fill(hist.begin(), hist.end(), 0);
    for (const auto& e : v) ++hist[(e.code >> shift) & (kBuckets - 1)];
    std::size_t sum = 0;
    for (auto& h : hist) {
      auto c = h;
      h = sum;
      sum += c;
    }
    for (const auto& e : v) tmp[hist[(e.code >> shift) & (kBuckets - 1)]++] = e;
    v.swap(tmp);
  }
}

// Mixed-radix code of each source key restricted to `positions`, most
// significant position first, so code order equals lexicographic key order.
// When the radix product would overflow, the running codes are replaced by
// their dense ranks, which preserves both order and injectivity.
template <typename ValueAt>
std::uint64_t encode(std::size_t n, std::span<const std::size_t> positions, std::span<const std::size_t> radices,
                     ValueAt&& value_at, std::vector<CodedEntry>& out) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {0, static_cast<std::uint32_t>(i)};
  std::uint64_t bound = 1;  // every current code is < bound
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const std::uint64_t radix = std::max<std::size_t>(radices[k], 1);
    if (bound > std::numeric_limits<std::uint64_t>::max() / radix) {
      std::vector<std::uint64_t> uniq(n);
      for (std::size_t i = 0; i < n; ++i) uniq[i] = out[i].code;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (auto& e : out) e.code = std::lower_bound(uniq.begin(), uniq.end(), e.code) - uniq.begin();
      bound = uniq.size();
    }
    const std::size_t pos = positions[k];
    for (auto& e : out) e.code = e.code * radix + value_at(e.src, pos);
    bound *= radix;
  }
  return bound - 1;
}

// Projects keys onto `positions`, merges equal projections, and returns the
// result sorted by projected key.
template <typename ValueAt, typename WeightAt>
void project_and_merge(std::size_t n, std::span<const std::size_t> positions, std::span<const std::size_t> radices,
                       ValueAt&& value_at, WeightAt&& weight_at, std::vector<value_id>& keys,
                       std::vector<count_t>& counts) {
  std::vector<CodedEntry> coded;
  const auto max_code = encode(n, positions, radices, value_at, coded);
  sort_by_code(coded, max_code);
  keys.clear();
  counts.clear();
  for (std::size_t i = 0; i < coded.size();) {
    std::size_t j = i;
    count_t total = 0;
    while (j < coded.size() && coded[j].code == coded[i].code) total += weight_at(coded[j++].src);
    for (auto pos : positions) keys.push_back(value_at(coded[i].src, pos));
    counts.push_back(total);
    i = j;
  }
}

inline std::vector<std::size_t> table_positions(const AttributeSet& attrs, std::size_t n_conditions) {
  std::vector<std::size_t> pos(attrs.conditions.begin(), attrs.conditions.end());
  if (attrs.decision) pos.push_back(n_conditions);
  return pos;
}

}  // namespace detail

// G^(A) straight from the table; defaults to A = C ∪ D.
inline GranularityRepresentation build_granularity(const DecisionTable& table, const AttributeSet& attrs) {
  attrs.conditions.check_bounds(table.n_conditions());
  const auto positions = detail::table_positions(attrs, table.n_conditions());
  std::vector<std::size_t> radices;
  for (auto p : positions) radices.push_back(table.cardinality(p));
  std::vector<value_id> keys;
  std::vector<count_t> counts;
  detail::project_and_merge(
      table.n_objects(), positions, radices, [&](std::size_t obj, std::size_t p) { return table.value(obj, p); },
      [](std::size_t) { return count_t{1}; }, keys, counts);
  return GranularityRepresentation(attrs, std::move(radices), std::move(keys), std::move(counts), table.n_objects());
}

inline GranularityRepresentation build_granularity(const DecisionTable& table) {
  return build_granularity(table, AttributeSet{AttributeSubset::all(table.n_conditions()), true});
}

// Coarsening: G^(P) from G^(Q) for P ⊆ Q, summing the counts of every fine
// granule whose key projects onto the same coarse key.
inline GranularityRepresentation coarsen(const GranularityRepresentation& g, const AttributeSet& p) {
  if (!p.is_subset_of(g.attributes())) throw DomainError("coarsen target is not a subset of the source attributes");
  std::vector<std::size_t> positions;
  for (auto a : p.conditions) positions.push_back(g.position_of(a));
  if (p.decision) positions.push_back(g.position_of(GranularityRepresentation::npos));
  std::vector<std::size_t> radices;
  for (auto pos : positions) radices.push_back(g.cardinalities()[pos]);
  std::vector<value_id> keys;
  std::vector<count_t> counts;
  detail::project_and_merge(
      g.size(), positions, radices, [&](std::size_t i, std::size_t pos) { return g.key(i)[pos]; },
      [&](std::size_t i) { return g.count(i); }, keys, counts);
  return GranularityRepresentation(p, std::move(radices), std::move(keys), std::move(counts), g.universe_size());
}

// Refining: G^(Q) from G^(P) for P ⊆ Q. Splitting a class E_P by Q − P needs
// object membership, so the source table is required; every object's P-key
// must be a granule of g and the per-granule counts must agree.
inline GranularityRepresentation refine(const DecisionTable& table, const GranularityRepresentation& g,
                                        const AttributeSet& q) {
  if (!g.attributes().is_subset_of(q)) throw DomainError("refine target is not a superset of the source attributes");
  q.conditions.check_bounds(table.n_conditions());
  if (g.universe_size() != table.n_objects()) throw DomainError("representation does not belong to this table");

  std::map<std::vector<value_id>, std::size_t> coarse_index;
  for (std::size_t i = 0; i < g.size(); ++i) coarse_index.emplace(std::vector<value_id>(g.key(i).begin(), g.key(i).end()), i);
  std::vector<count_t> seen(g.size(), 0);
  std::map<std::vector<value_id>, count_t> fine;  // ordered by Q-key
  for (std::size_t obj = 0; obj < table.n_objects(); ++obj) {
    auto coarse_key = project_row(table, obj, g.attributes().conditions, g.has_decision());
    auto it = coarse_index.find(coarse_key);
    if (it == coarse_index.end()) throw DomainError("object key missing from representation");
    ++seen[it->second];
    ++fine[project_row(table, obj, q.conditions, q.decision)];
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (seen[i] != g.count(i)) throw DomainError("representation counts disagree with the table");

  std::vector<std::size_t> radices;
  for (auto p : detail::table_positions(q, table.n_conditions())) radices.push_back(table.cardinality(p));
  std::vector<value_id> keys;
  std::vector<count_t> counts;
  for (const auto& [k, c] : fine) {
    keys.insert(keys.end(), k.begin(), k.end());
    counts.push_back(c);
  }
  return GranularityRepresentation(q, std::move(radices), std::move(keys), std::move(counts), table.n_objects());
}

// E_i//D for every condition class of G^(B ∪ D). Granules are key-sorted with
// the decision last, so each condition class is a contiguous run.
inline std::vector<ConditionGroup> group_by_condition(const GranularityRepresentation& g) {
  if (!g.has_decision()) throw DomainError("grouping requires the decision attribute");
  const std::size_t w = g.width(), b = w - 1;
  std::vector<ConditionGroup> groups;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = g.key(i);
    auto cond = k.first(b);
    if (groups.empty() || !std::equal(cond.begin(), cond.end(), groups.back().key.begin(), groups.back().key.end()))
      groups.push_back({{cond.begin(), cond.end()}, {}, 0});
    auto& grp = groups.back();
    grp.decision_counts.emplace_back(k[b], g.count(i));
    grp.size += g.count(i);
  }
  return groups;
}

// Text dump, one "key-tuple TAB count" line per granule in key order. Tokens
// are decoded through the table's dictionaries when a table is given.
inline void dump(std::ostream& out, const GranularityRepresentation& g, const DecisionTable* table = nullptr) {
  const auto& attrs = g.attributes();
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = g.key(i);
    out << '(';
    for (std::size_t p = 0; p < k.size(); ++p) {
      if (p) out << ',';
      if (!table) {
        out << k[p];
      } else if (p < attrs.conditions.size()) {
        out << table->condition(attrs.conditions[p]).token(k[p]);
      } else {
        out << table->decision().token(k[p]);
      }
    }
    out << ")\t" << g.count(i) << '\n';
  }
}

}  // namespace plar
