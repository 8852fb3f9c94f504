#pragma once

// Seeded uniform categorical tables for tests and benchmarks.

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "plar/tabular.hpp"

namespace plar {

struct GeneratorSpec {
  std::size_t objects = 8;
  std::size_t attributes = 2;
  std::uint32_t values = 2;   // per condition attribute
  std::uint32_t classes = 2;  // decision values
  std::uint64_t seed = 0;

  void validate() const {
    if (objects < 1 || attributes < 1 || values < 1 || classes < 1)
      throw DomainError("generator counts must all be at least 1");
  }
};

// Raw draws, row-major with the decision last; cell values lie in [0, values)
// or [0, classes). The stream depends only on the seed.
inline std::vector<std::uint32_t> generate_raw(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::size_t w = spec.attributes + 1;
  std::vector<std::uint32_t> raw(spec.objects * w);
  for (std::size_t i = 0; i < spec.objects; ++i) {
    for (std::size_t a = 0; a < spec.attributes; ++a) raw[i * w + a] = static_cast<std::uint32_t>(rng() % spec.values);
    raw[i * w + spec.attributes] = static_cast<std::uint32_t>(rng() % spec.classes);
  }
  return raw;
}

// The same table that parsing write_csv's output would produce.
inline DecisionTable generate_table(const GeneratorSpec& spec) {
  const auto raw = generate_raw(spec);
  const std::size_t w = spec.attributes + 1;
  std::vector<AttributeDescriptor> attrs;
  for (std::size_t a = 0; a < spec.attributes; ++a) attrs.emplace_back("a" + std::to_string(a + 1));
  attrs.emplace_back("d");
  std::vector<std::vector<value_id>> remap(w);
  for (std::size_t a = 0; a < w; ++a) remap[a].assign(a + 1 == w ? spec.classes : spec.values, ~value_id{0});

  std::vector<value_id> cells(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const std::size_t a = k % w;
    auto& slot = remap[a][raw[k]];
    if (slot == ~value_id{0}) slot = attrs[a].intern(std::to_string(raw[k]));
    cells[k] = slot;
  }
  AttributeDescriptor decision = std::move(attrs.back());
  attrs.pop_back();
  return DecisionTable(std::move(attrs), std::move(decision), std::move(cells));
}

// Headerless CSV, decision last.
inline void write_csv(std::ostream& out, const GeneratorSpec& spec) {
  const auto raw = generate_raw(spec);
  const std::size_t w = spec.attributes + 1;
  std::string line;
  for (std::size_t i = 0; i < spec.objects; ++i) {
    line.clear();
    for (std::size_t a = 0; a < w; ++a) {
      if (a) line += ',';
      line += std::to_string(raw[i * w + a]);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace plar
