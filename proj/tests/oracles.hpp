// SPDX-License-Identifier: Apache-2.0
// Brute-force reference implementations used by unit and acceptance tests.

#ifndef REPORT_TESTS_ORACLES_HPP
#define REPORT_TESTS_ORACLES_HPP

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "report/extract.hpp"
#include "report/kg.hpp"

namespace report::testing {

// Every entity-simple path head -> tail of 1..k hops, as a set of relation
// sequences.
inline std::set<RelationalPath> dfs_paths(const GraphView& view, EntityId head, EntityId tail,
                                          std::size_t k) {
  std::set<RelationalPath> out;
  if (head == tail) return out;
  std::vector<EntityId> visited{head};
  RelationalPath seq;
  const auto go = [&](auto&& self, EntityId at) -> void {
    if (at == tail) {
      out.insert(seq);
      return;
    }
    if (seq.size() == k) return;
    view.for_each_out_edge(at, [&](const Edge& e) {
      if (std::find(visited.begin(), visited.end(), e.target) != visited.end()) return;
      visited.push_back(e.target);
      seq.push_back(e.relation);
      self(self, e.target);
      seq.pop_back();
      visited.pop_back();
    });
  };
  go(go, head);
  return out;
}

// Graph with each (h, r, t) present with probability `p`; self-loops and
// parallel edges allowed.
inline std::vector<Triple> random_graph(std::mt19937_64& rng, std::size_t entities,
                                        std::size_t relations, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Triple> out;
  for (std::uint32_t h = 0; h < entities; ++h) {
    for (std::uint32_t r = 0; r < relations; ++r) {
      for (std::uint32_t t = 0; t < entities; ++t) {
        if (coin(rng)) out.push_back({EntityId(h), RelationId(r), EntityId(t)});
      }
    }
  }
  return out;
}

inline std::vector<std::string> relation_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("r" + std::to_string(i));
  return names;
}

// Runs the enumeration oracle comparison on `graphs` random graphs and
// returns the number of (graph, pair, k) cases that disagreed.
inline std::size_t path_oracle_mismatches(std::uint64_t seed, std::size_t graphs,
                                          std::size_t* cases = nullptr) {
  std::mt19937_64 rng(seed);
  std::size_t bad = 0;
  std::size_t checked = 0;
  for (std::size_t g = 0; g < graphs; ++g) {
    const std::size_t n = 2 + rng() % 7;  // 2..8 entities
    const std::size_t b = 1 + rng() % 4;  // 1..4 base relations
    const auto vocab = build_vocab(relation_names(b));
    const auto triples = random_graph(rng, n, b, 0.3 / static_cast<double>(b));
    const auto graph = augment_inverse(triples, vocab, n);
    // Half the graphs also hide one edge, as extraction does.
    const bool exclude = !triples.empty() && rng() % 2 == 0;
    const GraphView view = exclude ? exclude_edge(graph, triples[rng() % triples.size()])
                                   : GraphView(graph);
    for (std::uint32_t h = 0; h < n; ++h) {
      for (std::uint32_t t = 0; t < n; ++t) {
        for (std::size_t k = 1; k <= 4; ++k) {
          const auto got = enumerate_paths(view, EntityId(h), EntityId(t), k);
          const auto want = dfs_paths(view, EntityId(h), EntityId(t), k);
          ++checked;
          const std::set<RelationalPath> got_set(got.paths.begin(), got.paths.end());
          if (got_set != want || got_set.size() != got.paths.size()) ++bad;
        }
      }
    }
  }
  if (cases != nullptr) *cases = checked;
  return bad;
}

}  // namespace report::testing

#endif  // REPORT_TESTS_ORACLES_HPP
