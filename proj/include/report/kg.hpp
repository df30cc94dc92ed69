// SPDX-License-Identifier: Apache-2.0
//
// Knowledge-graph data model: triples, the relation vocabulary with inverse
// pairing, and an inverse-augmented adjacency index with edge-exclusion views.

#ifndef REPORT_KG_HPP
#define REPORT_KG_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace report {

enum class EntityId : std::uint32_t {};
enum class RelationId : std::uint32_t {};

constexpr std::uint32_t index_of(EntityId e) { return static_cast<std::uint32_t>(e); }
constexpr std::uint32_t index_of(RelationId r) { return static_cast<std::uint32_t>(r); }

struct Triple {
  EntityId head{};
  RelationId relation{};
  EntityId tail{};

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (std::uint64_t{index_of(t.head)} << 32) | index_of(t.tail);
    h ^= std::uint64_t{index_of(t.relation)} * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 32;
    return static_cast<std::size_t>(h);
  }
};

/// Triple as read from disk, before any ID assignment.
struct NamedTriple {
  std::string head;
  std::string relation;
  std::string tail;

  friend bool operator==(const NamedTriple&, const NamedTriple&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownRelationError : public std::runtime_error {
 public:
  explicit UnknownRelationError(const std::string& name)
      : std::runtime_error("unknown relation '" + name +
                           "' (not present in the training vocabulary)"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Reads tab-separated `head\trelation\ttail` lines. Blank lines are skipped.
/// Throws std::runtime_error if the file cannot be opened and ParseError on a
/// line that does not have exactly three fields.
std::vector<NamedTriple> load_triples(const std::filesystem::path& path);

/// Relation IDs are laid out as [base relations | inverses | PCLS HCLS TCLS].
/// Base relations are numbered in lexicographic name order, so the same name
/// set always yields the same assignment.
class RelationVocab {
 public:
  RelationVocab() = default;
  explicit RelationVocab(std::vector<std::string> sorted_unique_names);

  std::size_t base_count() const { return names_.size(); }
  /// Base + inverse + 3 special tokens.
  std::size_t size() const { return 2 * names_.size() + 3; }

  RelationId inverse_of(RelationId r) const;
  bool is_inverse(RelationId r) const;
  bool is_special(RelationId r) const { return index_of(r) >= 2 * names_.size(); }
  bool is_valid(RelationId r) const { return index_of(r) < size(); }

  RelationId pcls() const { return RelationId(2 * names_.size()); }
  RelationId hcls() const { return RelationId(2 * names_.size() + 1); }
  RelationId tcls() const { return RelationId(2 * names_.size() + 2); }

  /// Base relation by name; throws UnknownRelationError.
  RelationId id(std::string_view name) const;
  std::optional<RelationId> find(std::string_view name) const;

  /// Base name for base relations, "name^{-1}" for inverses, "[PCLS]" etc.
  std::string display_name(RelationId r) const;
  const std::string& base_name(RelationId r) const;
  const std::vector<std::string>& base_names() const { return names_; }

  friend bool operator==(const RelationVocab& a, const RelationVocab& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, RelationId, std::less<>> ids_;
};

/// Builds a vocabulary over `names`. With `reuse`, the trained vocabulary is
/// returned unchanged after checking every name is already known.
RelationVocab build_vocab(const std::vector<std::string>& names,
                          const RelationVocab* reuse = nullptr);

/// Dense per-graph entity numbering in first-appearance order.
class EntityIndex {
 public:
  EntityId intern(const std::string& name);
  std::optional<EntityId> find(std::string_view name) const;
  const std::string& name(EntityId e) const { return names_.at(index_of(e)); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, EntityId> ids_;
};

class FactSet {
 public:
  FactSet() = default;
  explicit FactSet(std::span<const Triple> facts) { insert(facts); }

  void insert(const Triple& t) { set_.insert(t); }
  void insert(std::span<const Triple> facts) {
    for (const auto& t : facts) set_.insert(t);
  }
  bool contains(const Triple& t) const { return set_.contains(t); }
  std::size_t size() const { return set_.size(); }

 private:
  std::unordered_set<Triple, TripleHash> set_;
};

struct Edge {
  RelationId relation{};
  EntityId target{};

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable inverse-augmented multigraph. Adjacency is stored CSR-style and
/// each list is sorted by (relation, target).
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  std::size_t entity_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Distinct facts before inverse augmentation.
  std::size_t source_fact_count() const { return source_facts_.size(); }
  std::span<const Triple> source_facts() const { return source_facts_; }
  std::size_t base_relation_count() const { return base_count_; }

  std::span<const Edge> out_edges(EntityId e) const {
    if (index_of(e) >= entity_count()) return {};
    return {edges_.data() + offsets_[index_of(e)],
            edges_.data() + offsets_[index_of(e) + 1]};
  }
  bool contains(const Triple& t) const { return facts_.contains(t); }
  const FactSet& facts() const { return facts_; }

  RelationId inverse_of(RelationId r) const {
    const auto i = index_of(r);
    return RelationId(i < base_count_ ? i + base_count_ : i - base_count_);
  }
  Triple inverse(const Triple& t) const { return {t.tail, inverse_of(t.relation), t.head}; }

 private:
  friend KnowledgeGraph augment_inverse(std::span<const Triple>, const RelationVocab&,
                                        std::size_t);

  std::size_t base_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
  std::vector<Triple> source_facts_;
  FactSet facts_;
};

/// Adds (t, r^{-1}, h) for each (h, r, t). Triples may use base or inverse
/// relations; duplicates (including a fact given alongside its own inverse)
/// collapse. `entity_count` may exceed the largest ID to include isolated
/// entities.
KnowledgeGraph augment_inverse(std::span<const Triple> triples, const RelationVocab& vocab,
                               std::size_t entity_count = 0);

/// Read-only view of a graph with one fact and its inverse hidden.
class GraphView {
 public:
  explicit GraphView(const KnowledgeGraph& graph) : graph_(&graph) {}
  GraphView(const KnowledgeGraph& graph, const Triple& excluded)
      : graph_(&graph), excluded_{excluded, graph.inverse(excluded)}, has_exclusion_(true) {}

  const KnowledgeGraph& graph() const { return *graph_; }
  std::size_t entity_count() const { return graph_->entity_count(); }
  RelationId inverse_of(RelationId r) const { return graph_->inverse_of(r); }

  bool is_excluded(EntityId from, const Edge& e) const {
    if (!has_exclusion_) return false;
    const Triple t{from, e.relation, e.target};
    return t == excluded_[0] || t == excluded_[1];
  }
  bool contains(const Triple& t) const {
    if (has_exclusion_ && (t == excluded_[0] || t == excluded_[1])) return false;
    return graph_->contains(t);
  }

  template <class Fn>
  void for_each_out_edge(EntityId from, Fn&& fn) const {
    for (const Edge& e : graph_->out_edges(from)) {
      if (!is_excluded(from, e)) fn(e);
    }
  }

  std::size_t edge_count() const;

 private:
  const KnowledgeGraph* graph_;
  Triple excluded_[2]{};
  bool has_exclusion_ = false;
};

inline GraphView exclude_edge(const KnowledgeGraph& graph, const Triple& t) {
  return GraphView(graph, t);
}
inline bool contains(const KnowledgeGraph& graph, const Triple& t) { return graph.contains(t); }

/// One side of a benchmark: a graph's entity numbering plus its three splits.
struct GraphSplits {
  EntityIndex entities;
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  std::size_t duplicates_dropped = 0;
};

/// Loads train/valid/test from `dir`, mapping relation names through `vocab`.
/// Duplicate triples within a split are dropped (counted in the result).
GraphSplits load_splits(const std::filesystem::path& dir, const RelationVocab& vocab);

/// Relation names appearing in the train/valid/test files of `dir`.
std::vector<std::string> collect_relation_names(const std::filesystem::path& dir);

}  // namespace report

#endif  // REPORT_KG_HPP
