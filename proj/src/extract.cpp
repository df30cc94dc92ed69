// SPDX-License-Identifier: Apache-2.0

#include "report/extract.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace report {
namespace {

// Half-paths grown from one endpoint. Entities include the start entity.
struct HalfPaths {
  std::vector<EntityId> entities;  // flattened, stride = depth + 1
  std::vector<RelationId> relations;  // flattened, stride = depth
  std::vector<std::size_t> entity_offset;
  std::vector<std::size_t> relation_offset;
  std::vector<std::size_t> length;

  std::size_t size() const { return length.size(); }
  EntityId end(std::size_t i) const { return entities[entity_offset[i] + length[i]]; }
  std::span<const EntityId> entities_of(std::size_t i) const {
    return {entities.data() + entity_offset[i], length[i] + 1};
  }
  std::span<const RelationId> relations_of(std::size_t i) const {
    return {relations.data() + relation_offset[i], length[i]};
  }
};

// Depth-limited DFS recording every simple half-path of length 1..depth.
// Half-paths are not extended through `stop`.
void grow(const GraphView& view, EntityId start, EntityId stop, std::size_t depth,
          HalfPaths& out) {
  std::vector<EntityId> ents{start};
  std::vector<RelationId> rels;

  const auto record = [&] {
    out.entity_offset.push_back(out.entities.size());
    out.relation_offset.push_back(out.relations.size());
    out.length.push_back(rels.size());
    out.entities.insert(out.entities.end(), ents.begin(), ents.end());
    out.relations.insert(out.relations.end(), rels.begin(), rels.end());
  };

  const auto dfs = [&](auto&& self) -> void {
    if (rels.size() == depth) return;
    view.for_each_out_edge(ents.back(), [&](const Edge& e) {
      if (std::find(ents.begin(), ents.end(), e.target) != ents.end()) return;
      ents.push_back(e.target);
      rels.push_back(e.relation);
      record();
      if (e.target != stop) self(self);
      ents.pop_back();
      rels.pop_back();
    });
  };
  dfs(dfs);
}

bool disjoint_except_last(std::span<const EntityId> a, std::span<const EntityId> b) {
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      if (a[i] == b[j]) return false;
    }
  }
  return true;
}

// `k` of the indices 0..n-1, uniformly without replacement, ascending.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

PathSet enumerate_paths(const GraphView& view, EntityId head, EntityId tail,
                        std::size_t max_len) {
  PathSet result;
  const auto n = view.entity_count();
  if (max_len == 0 || head == tail || index_of(head) >= n || index_of(tail) >= n) {
    return result;
  }

  const std::size_t forward_depth = (max_len + 1) / 2;
  const std::size_t backward_depth = max_len - forward_depth;

  HalfPaths forward;
  HalfPaths backward;
  grow(view, head, tail, forward_depth, forward);
  if (backward_depth > 0) grow(view, tail, head, backward_depth, backward);

  std::unordered_map<std::uint32_t, std::vector<std::size_t>> backward_by_end;
  for (std::size_t i = 0; i < backward.size(); ++i) {
    if (backward.end(i) != head) backward_by_end[index_of(backward.end(i))].push_back(i);
  }

  std::set<RelationalPath, PathOrder> unique;
  RelationalPath seq;
  for (std::size_t f = 0; f < forward.size(); ++f) {
    const EntityId meet = forward.end(f);
    const auto frels = forward.relations_of(f);
    if (meet == tail) {
      // Every path of length <= forward_depth is found here exactly once.
      unique.emplace(frels.begin(), frels.end());
      ++result.realized_paths;
      continue;
    }
    // Longer paths split at exactly forward_depth hops.
    if (forward.length[f] != forward_depth) continue;
    const auto it = backward_by_end.find(index_of(meet));
    if (it == backward_by_end.end()) continue;
    for (const std::size_t b : it->second) {
      if (!disjoint_except_last(forward.entities_of(f), backward.entities_of(b))) continue;
      const auto brels = backward.relations_of(b);
      seq.assign(frels.begin(), frels.end());
      for (auto r = brels.rbegin(); r != brels.rend(); ++r) seq.push_back(view.inverse_of(*r));
      unique.insert(seq);
      ++result.realized_paths;
    }
  }
  result.paths.assign(unique.begin(), unique.end());
  return result;
}

PathSet sample_paths(PathSet paths, std::size_t cap, Rng& rng) {
  if (cap == 0) throw std::invalid_argument("path cap must be at least 1");
  if (paths.paths.size() <= cap) {
    paths.truncated = false;
    return paths;
  }
  PathSet out;
  out.realized_paths = paths.realized_paths;
  out.truncated = true;
  out.paths.reserve(cap);
  for (const auto i : sample_indices(paths.paths.size(), cap, rng)) {
    out.paths.push_back(std::move(paths.paths[i]));
  }
  return out;
}

RelationalContext extract_context(const GraphView& view, EntityId e, std::size_t cap,
                                  Rng& rng) {
  if (cap == 0) throw std::invalid_argument("context cap must be at least 1");
  RelationalContext ctx;
  view.for_each_out_edge(e, [&](const Edge& edge) { ctx.relations.push_back(edge.relation); });
  std::sort(ctx.relations.begin(), ctx.relations.end());
  ctx.relations.erase(std::unique(ctx.relations.begin(), ctx.relations.end()),
                      ctx.relations.end());
  if (ctx.relations.size() > cap) {
    std::vector<RelationId> kept;
    kept.reserve(cap);
    for (const auto i : sample_indices(ctx.relations.size(), cap, rng)) {
      kept.push_back(ctx.relations[i]);
    }
    ctx.relations = std::move(kept);
    ctx.truncated = true;
  }
  return ctx;
}

ModelInput extract_example(const KnowledgeGraph& graph, const Triple& query,
                           const ExtractConfig& config, Rng& rng) {
  const GraphView view = exclude_edge(graph, query);
  ModelInput input;
  input.query_relation = query.relation;
  input.paths = sample_paths(enumerate_paths(view, query.head, query.tail, config.max_path_len),
                             config.path_cap, rng);
  input.head_context = extract_context(view, query.head, config.context_cap, rng);
  input.tail_context = extract_context(view, query.tail, config.context_cap, rng);
  return input;
}

}  // namespace report
