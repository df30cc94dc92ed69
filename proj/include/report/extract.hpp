// SPDX-License-Identifier: Apache-2.0
//
// Model-input extraction for one query fact: every relational path of bounded
// length between head and tail, plus the relational context of each endpoint.

#ifndef REPORT_EXTRACT_HPP
#define REPORT_EXTRACT_HPP

#include <cstddef>
#include <vector>

#include "report/kg.hpp"
#include "report/rng.hpp"

namespace report {

using RelationalPath = std::vector<RelationId>;

/// Orders paths by length first, then lexicographically by relation ID.
struct PathOrder {
  bool operator()(const RelationalPath& a, const RelationalPath& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

struct PathSet {
  std::vector<RelationalPath> paths;  // distinct, in PathOrder
  bool truncated = false;
  /// Number of entity-level paths found before deduplication by relation
  /// sequence.
  std::size_t realized_paths = 0;
};

struct RelationalContext {
  std::vector<RelationId> relations;  // strictly ascending
  bool truncated = false;
};

struct ModelInput {
  RelationId query_relation{};
  RelationalContext head_context;
  RelationalContext tail_context;
  PathSet paths;
};

struct ExtractConfig {
  std::size_t max_path_len = 4;
  std::size_t path_cap = 300;
  std::size_t context_cap = 64;
};

/// Relation sequences of all entity-simple paths head -> tail with 1..k hops.
/// Uses a bidirectional depth-limited search joined on the meeting entity.
/// head == tail, or an entity outside the graph, gives an empty set.
PathSet enumerate_paths(const GraphView& view, EntityId head, EntityId tail,
                        std::size_t max_len);

/// Uniform sample without replacement down to `cap` paths; the kept paths
/// stay in PathOrder.
PathSet sample_paths(PathSet paths, std::size_t cap, Rng& rng);

/// Distinct relations on the outgoing edges of `e` in the view (incoming
/// facts appear through their inverse relations).
RelationalContext extract_context(const GraphView& view, EntityId e, std::size_t cap,
                                  Rng& rng);

/// Extraction with the query edge and its inverse hidden from the graph.
ModelInput extract_example(const KnowledgeGraph& graph, const Triple& query,
                           const ExtractConfig& config, Rng& rng);

}  // namespace report

#endif  // REPORT_EXTRACT_HPP
