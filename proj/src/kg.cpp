// SPDX-License-Identifier: Apache-2.0

#include "report/kg.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace report {

std::vector<NamedTriple> load_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triple file: " + path.string());

  std::vector<NamedTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(path.string(), line_no,
                       "expected 3 tab-separated fields, found " +
                           std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError(path.string(), line_no, "empty field");
    }
    out.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  return out;
}

RelationVocab::RelationVocab(std::vector<std::string> sorted_unique_names)
    : names_(std::move(sorted_unique_names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i > 0 && !(names_[i - 1] < names_[i])) {
      throw std::invalid_argument("relation names must be sorted and unique");
    }
    ids_.emplace(names_[i], RelationId(static_cast<std::uint32_t>(i)));
  }
}

RelationId RelationVocab::inverse_of(RelationId r) const {
  const auto i = index_of(r);
  const auto b = names_.size();
  if (i < b) return RelationId(static_cast<std::uint32_t>(i + b));
  if (i < 2 * b) return RelationId(static_cast<std::uint32_t>(i - b));
  // Special tokens have no inverse; they map to themselves.
  return r;
}

bool RelationVocab::is_inverse(RelationId r) const {
  const auto i = index_of(r);
  return i >= names_.size() && i < 2 * names_.size();
}

RelationId RelationVocab::id(std::string_view name) const {
  if (auto r = find(name)) return *r;
  throw UnknownRelationError(std::string(name));
}

std::optional<RelationId> RelationVocab::find(std::string_view name) const {
  const auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& RelationVocab::base_name(RelationId r) const {
  const auto i = index_of(r);
  if (i >= 2 * names_.size()) throw std::out_of_range("special token has no base name");
  return names_[i % names_.size()];
}

std::string RelationVocab::display_name(RelationId r) const {
  if (r == pcls()) return "[PCLS]";
  if (r == hcls()) return "[HCLS]";
  if (r == tcls()) return "[TCLS]";
  if (!is_valid(r)) return "<invalid:" + std::to_string(index_of(r)) + ">";
  if (is_inverse(r)) return base_name(r) + "^{-1}";
  return base_name(r);
}

RelationVocab build_vocab(const std::vector<std::string>& names, const RelationVocab* reuse) {
  if (reuse != nullptr) {
    for (const auto& n : names) {
      if (!reuse->find(n)) throw UnknownRelationError(n);
    }
    return *reuse;
  }
  std::set<std::string> unique(names.begin(), names.end());
  return RelationVocab(std::vector<std::string>(unique.begin(), unique.end()));
}

EntityId EntityIndex::intern(const std::string& name) {
  const auto [it, inserted] =
      ids_.try_emplace(name, EntityId(static_cast<std::uint32_t>(names_.size())));
  if (inserted) names_.push_back(name);
  return it->second;
}

std::optional<EntityId> EntityIndex::find(std::string_view name) const {
  const auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph augment_inverse(std::span<const Triple> triples, const RelationVocab& vocab,
                               std::size_t entity_count) {
  KnowledgeGraph g;
  g.base_count_ = vocab.base_count();

  std::vector<Triple> canonical;
  canonical.reserve(triples.size());
  std::size_t n = entity_count;
  for (const Triple& t : triples) {
    if (!vocab.is_valid(t.relation) || vocab.is_special(t.relation)) {
      throw std::invalid_argument("triple relation " + std::to_string(index_of(t.relation)) +
                                  " is not a relation of the vocabulary");
    }
    canonical.push_back(vocab.is_inverse(t.relation)
                            ? Triple{t.tail, vocab.inverse_of(t.relation), t.head}
                            : t);
    n = std::max<std::size_t>(n, std::max(index_of(t.head), index_of(t.tail)) + 1);
  }
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());

  std::vector<std::size_t> degree(n, 0);
  for (const Triple& t : canonical) {
    ++degree[index_of(t.head)];
    ++degree[index_of(t.tail)];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.edges_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Triple& t : canonical) {
    g.edges_[cursor[index_of(t.head)]++] = {t.relation, t.tail};
    g.edges_[cursor[index_of(t.tail)]++] = {vocab.inverse_of(t.relation), t.head};
    g.facts_.insert(t);
    g.facts_.insert(Triple{t.tail, vocab.inverse_of(t.relation), t.head});
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.edges_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.edges_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }
  g.source_facts_ = std::move(canonical);
  return g;
}

std::size_t GraphView::edge_count() const {
  std::size_t n = graph_->edge_count();
  if (has_exclusion_ && graph_->contains(excluded_[0])) n -= 2;
  return n;
}

std::vector<std::string> collect_relation_names(const std::filesystem::path& dir) {
  std::set<std::string> names;
  for (const char* split : {"train.txt", "valid.txt", "test.txt"}) {
    const auto file = dir / split;
    if (!std::filesystem::exists(file)) continue;
    for (auto& t : load_triples(file)) names.insert(std::move(t.relation));
  }
  return {names.begin(), names.end()};
}

GraphSplits load_splits(const std::filesystem::path& dir, const RelationVocab& vocab) {
  GraphSplits out;
  const auto read = [&](const char* split, std::vector<Triple>& dest, bool required) {
    const auto file = dir / split;
    if (!std::filesystem::exists(file)) {
      if (required) throw std::runtime_error("missing split file: " + file.string());
      return;
    }
    std::unordered_set<Triple, TripleHash> seen;
    for (const auto& nt : load_triples(file)) {
      const Triple t{out.entities.intern(nt.head), vocab.id(nt.relation),
                     out.entities.intern(nt.tail)};
      if (seen.insert(t).second) {
        dest.push_back(t);
      } else {
        ++out.duplicates_dropped;
      }
    }
  };
  read("train.txt", out.train, true);
  read("valid.txt", out.valid, false);
  read("test.txt", out.test, false);
  return out;
}

}  // namespace report
