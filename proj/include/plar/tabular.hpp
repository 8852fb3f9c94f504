#pragma once

// Categorical decision tables: ingestion, dictionary encoding, projection.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>
#include <span>

namespace plar {

using value_id = std::uint32_t;
using count_t = std::uint64_t;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyUniverseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation's arguments violate its contract (attribute not
// in a subset, CCE on a one-object universe, mismatched representations...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A categorical attribute with its value dictionary. Identifiers are dense
// and assigned in order of first occurrence.
class AttributeDescriptor {
 public:
  AttributeDescriptor() = default;
  explicit AttributeDescriptor(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t cardinality() const noexcept { return values_.size(); }
  const std::string& token(value_id id) const { return values_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return values_; }

  value_id intern(std::string_view token) {
    auto it = index_.find(std::string(token));
    if (it != index_.end()) return it->second;
    auto id = static_cast<value_id>(values_.size());
    values_.emplace_back(token);
    index_.emplace(values_.back(), id);
    return id;
  }

  std::optional<value_id> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::string name_;
  std::vector<std::string> values_;
  std::unordered_map<std::string, value_id> index_;
};

// Sorted, duplicate-free set of condition-attribute indices.
class AttributeSubset {
 public:
  AttributeSubset() = default;
  AttributeSubset(std::initializer_list<std::size_t> idx) : AttributeSubset(std::vector<std::size_t>(idx)) {}
  explicit AttributeSubset(std::vector<std::size_t> idx) : idx_(std::move(idx)) {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  }

  static AttributeSubset all(std::size_t n) {
    AttributeSubset s;
    s.idx_.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.idx_[i] = i;
    return s;
  }

  std::size_t size() const noexcept { return idx_.size(); }
  bool empty() const noexcept { return idx_.empty(); }
  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }
  std::size_t operator[](std::size_t i) const { return idx_[i]; }
  const std::vector<std::size_t>& indices() const noexcept { return idx_; }

  bool contains(std::size_t a) const { return std::binary_search(idx_.begin(), idx_.end(), a); }

  bool is_subset_of(const AttributeSubset& other) const {
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
  }

  AttributeSubset with(std::size_t a) const {
    AttributeSubset s = *this;
    auto it = std::lower_bound(s.idx_.begin(), s.idx_.end(), a);
    if (it == s.idx_.end() || *it != a) s.idx_.insert(it, a);
    return s;
  }

  AttributeSubset without(std::size_t a) const {
    AttributeSubset s = *this;
    auto it = std::lower_bound(s.idx_.begin(), s.idx_.end(), a);
    if (it != s.idx_.end() && *it == a) s.idx_.erase(it);
    return s;
  }

  // Every attribute of `universe` not in this subset.
  AttributeSubset complement(std::size_t universe) const {
    AttributeSubset s;
    for (std::size_t a = 0; a < universe; ++a)
      if (!contains(a)) s.idx_.push_back(a);
    return s;
  }

  void check_bounds(std::size_t n_conditions) const {
    if (!idx_.empty() && idx_.back() >= n_conditions)
      throw DomainError("attribute index " + std::to_string(idx_.back()) + " out of range");
  }

  friend bool operator==(const AttributeSubset&, const AttributeSubset&) = default;

 private:
  std::vector<std::size_t> idx_;
};

enum class MissingPolicy { keep, drop };
enum class HeaderMode { automatic, yes, no };

struct SchemaConfig {
  char delimiter = ',';
  HeaderMode header = HeaderMode::automatic;
  // Column index (as decimal text) or header name; empty selects the last column.
  std::string decision_column;
  std::string missing_token = "?";
  MissingPolicy missing = MissingPolicy::keep;
};

// S = (U, C u D). Rows are stored row-major with the decision value last.
class DecisionTable {
 public:
  DecisionTable(std::vector<AttributeDescriptor> conditions, AttributeDescriptor decision,
                std::vector<value_id> cells, std::size_t dropped_rows = 0)
      : conditions_(std::move(conditions)),
        decision_(std::move(decision)),
        cells_(std::move(cells)),
        dropped_(dropped_rows) {
    const std::size_t w = width();
    if (cells_.empty()) throw EmptyUniverseError("decision table has no objects");
    if (cells_.size() % w != 0) throw DomainError("cell count is not a multiple of the row width");
    validate();
  }

  std::size_t n_objects() const noexcept { return cells_.size() / width(); }
  std::size_t n_conditions() const noexcept { return conditions_.size(); }
  std::size_t width() const noexcept { return conditions_.size() + 1; }
  std::size_t dropped_rows() const noexcept { return dropped_; }

  const AttributeDescriptor& condition(std::size_t a) const { return conditions_.at(a); }
  const std::vector<AttributeDescriptor>& conditions() const noexcept { return conditions_; }
  const AttributeDescriptor& decision() const noexcept { return decision_; }

  std::span<const value_id> row(std::size_t obj) const {
    return std::span<const value_id>(cells_).subspan(obj * width(), width());
  }
  value_id value(std::size_t obj, std::size_t attr) const { return cells_[obj * width() + attr]; }
  value_id decision_value(std::size_t obj) const { return cells_[obj * width() + conditions_.size()]; }

  // Cardinality of key position `pos`, where pos == n_conditions() is the decision.
  std::size_t cardinality(std::size_t pos) const {
    return pos == conditions_.size() ? decision_.cardinality() : conditions_.at(pos).cardinality();
  }

  std::optional<std::size_t> find_condition(std::string_view name) const {
    for (std::size_t a = 0; a < conditions_.size(); ++a)
      if (conditions_[a].name() == name) return a;
    return std::nullopt;
  }

 private:
  void validate() const {
    const std::size_t w = width();
    std::vector<std::vector<bool>> seen(w);
    for (std::size_t p = 0; p < w; ++p) seen[p].assign(cardinality(p), false);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const std::size_t p = i % w;
      if (cells_[i] >= seen[p].size())
        throw DomainError("value identifier out of dictionary range at column " + std::to_string(p));
      seen[p][cells_[i]] = true;
    }
    for (std::size_t p = 0; p < w; ++p)
      if (std::find(seen[p].begin(), seen[p].end(), false) != seen[p].end())
        throw DomainError("value dictionary of column " + std::to_string(p) + " is not dense");
  }

  std::vector<AttributeDescriptor> conditions_;
  AttributeDescriptor decision_;
  std::vector<value_id> cells_;
  std::size_t dropped_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// A first line is taken as a header when none of its tokens reappears in its
// column further down. Single-line inputs are always data.
inline bool looks_like_header(const std::vector<std::vector<std::string>>& lines) {
  if (lines.size() < 2) return false;
  const auto& head = lines.front();
  for (std::size_t c = 0; c < head.size(); ++c)
    for (std::size_t r = 1; r < lines.size(); ++r)
      if (c < lines[r].size() && lines[r][c] == head[c]) return false;
  return true;
}

inline std::size_t resolve_decision(const std::string& selector, const std::vector<std::string>& names) {
  if (selector.empty()) return names.size() - 1;
  for (std::size_t c = 0; c < names.size(); ++c)
    if (names[c] == selector) return c;
  if (std::all_of(selector.begin(), selector.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    std::size_t c = std::stoul(selector);
    if (c < names.size()) return c;
  }
  throw DomainError("decision column '" + selector + "' does not resolve to a column");
}

}  // namespace detail

inline DecisionTable parse_table(std::istream& in, const SchemaConfig& cfg = {}) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::size_t> line_numbers;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (detail::trim(raw).empty()) continue;
    lines.push_back(detail::split(raw, cfg.delimiter));
    line_numbers.push_back(lineno);
  }
  if (lines.empty()) throw EmptyUniverseError("input contains no rows");

  const std::size_t arity = lines.front().size();
  if (arity < 1) throw ParseError(line_numbers.front(), "no columns");
  for (std::size_t r = 0; r < lines.size(); ++r)
    if (lines[r].size() != arity)
      throw ParseError(line_numbers[r], "expected " + std::to_string(arity) + " fields, found " +
                                            std::to_string(lines[r].size()));

  bool has_header = cfg.header == HeaderMode::yes ||
                    (cfg.header == HeaderMode::automatic && detail::looks_like_header(lines));

  std::vector<std::string> names(arity);
  if (has_header) {
    names = lines.front();
  } else {
    for (std::size_t c = 0; c + 1 < arity; ++c) names[c] = "a" + std::to_string(c + 1);
    names[arity - 1] = "d";
  }
  const std::size_t dcol = detail::resolve_decision(cfg.decision_column, names);
  if (!has_header && dcol != arity - 1) {
    // renumber so that condition names stay a1..a|C| in column order
    std::size_t k = 1;
    for (std::size_t c = 0; c < arity; ++c) names[c] = (c == dcol) ? "d" : "a" + std::to_string(k++);
  }

  std::vector<AttributeDescriptor> conds;
  std::vector<std::size_t> order;  // source column of each condition attribute
  for (std::size_t c = 0; c < arity; ++c) {
    if (c == dcol) continue;
    conds.emplace_back(names[c]);
    order.push_back(c);
  }
  AttributeDescriptor dec(names[dcol]);

  std::vector<value_id> cells;
  cells.reserve((lines.size() - (has_header ? 1 : 0)) * arity);
  std::size_t dropped = 0;
  for (std::size_t r = has_header ? 1 : 0; r < lines.size(); ++r) {
    const auto& toks = lines[r];
    if (cfg.missing == MissingPolicy::drop &&
        std::find(toks.begin(), toks.end(), cfg.missing_token) != toks.end()) {
      ++dropped;
      continue;
    }
    for (std::size_t a = 0; a < conds.size(); ++a) cells.push_back(conds[a].intern(toks[order[a]]));
    cells.push_back(dec.intern(toks[dcol]));
  }
  if (cells.empty()) throw EmptyUniverseError("no rows left after dropping rows with missing values");
  return DecisionTable(std::move(conds), std::move(dec), std::move(cells), dropped);
}

inline DecisionTable parse_table(std::string_view text, const SchemaConfig& cfg = {}) {
  std::istringstream in{std::string(text)};
  return parse_table(in, cfg);
}

// Value identifiers of `obj` restricted to `attrs` (ascending), decision appended on request.
inline std::vector<value_id> project_row(const DecisionTable& table, std::size_t obj,
                                         const AttributeSubset& attrs, bool include_decision) {
  if (obj >= table.n_objects()) throw DomainError("object index out of range");
  attrs.check_bounds(table.n_conditions());
  std::vector<value_id> key;
  key.reserve(attrs.size() + (include_decision ? 1 : 0));
  for (auto a : attrs) key.push_back(table.value(obj, a));
  if (include_decision) key.push_back(table.decision_value(obj));
  return key;
}

}  // namespace plar
