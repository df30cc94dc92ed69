// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "report/kg.hpp"
#include "support.hpp"

using namespace report;
using report::testing::Fixture;
using report::testing::scratch_dir;
using report::testing::write_file;

TEST_CASE("load_triples splits tab-separated fields") {
  const auto dir = scratch_dir("kg_load");
  write_file(dir / "a.txt", "S.Curry\tplays_at\tWarriors\n\nK.Thompson\tplays_at\tWarriors\r\n");
  const auto t = load_triples(dir / "a.txt");
  REQUIRE(t.size() == 2);
  CHECK(t[0] == NamedTriple{"S.Curry", "plays_at", "Warriors"});
  CHECK(t[1].tail == "Warriors");

  write_file(dir / "empty.txt", "");
  CHECK(load_triples(dir / "empty.txt").empty());

  write_file(dir / "bad.txt", "a\tr\tb\nx\ty\n");
  try {
    load_triples(dir / "bad.txt");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS(load_triples(dir / "missing.txt"));
}

TEST_CASE("vocabulary layout, inverses and special tokens") {
  const auto v = build_vocab({"b", "a", "a"});
  CHECK(v.base_count() == 2);
  CHECK(v.size() == 7);
  CHECK(index_of(v.id("a")) == 0);
  CHECK(index_of(v.id("b")) == 1);
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    const RelationId r{i};
    CHECK(v.inverse_of(v.inverse_of(r)) == r);
    if (!v.is_special(r)) CHECK(v.inverse_of(r) != r);
  }
  const std::set<RelationId> specials{v.pcls(), v.hcls(), v.tcls()};
  CHECK(specials.size() == 3);
  for (auto s : specials) {
    CHECK(v.is_special(s));
    CHECK(index_of(s) >= 4);
  }
  CHECK(v.display_name(v.inverse_of(v.id("a"))) == "a^{-1}");
  CHECK(v.display_name(v.pcls()) == "[PCLS]");

  const auto empty = build_vocab({});
  CHECK(empty.size() == 3);
  CHECK(empty.base_count() == 0);

  CHECK(build_vocab({"a"}, &v) == v);
  CHECK(index_of(build_vocab({"a"}, &v).id("a")) == 0);
  try {
    build_vocab({"a", "zzz"}, &v);
    FAIL("expected unknown relation");
  } catch (const UnknownRelationError& e) {
    CHECK(std::string(e.what()).find("zzz") != std::string::npos);
  }
  CHECK(build_vocab({"x", "y", "z"}) == build_vocab({"z", "y", "x"}));
}

TEST_CASE("augment_inverse adds one inverse edge per fact") {
  Fixture f({{"A", "plays_at", "W"}});
  CHECK(f.graph.edge_count() == 2);
  CHECK(f.graph.source_fact_count() == 1);
  CHECK(contains(f.graph, f.triple("A", "plays_at", "W")));
  CHECK(contains(f.graph, {f.e("W"), f.inv("plays_at"), f.e("A")}));
  CHECK_FALSE(contains(f.graph, f.triple("A", "plays_at", "A")));

  const auto empty = augment_inverse({}, f.vocab);
  CHECK(empty.edge_count() == 0);
  CHECK(empty.entity_count() == 0);

  // A fact and its own inverse collapse to the same two edges.
  const std::vector<Triple> both{{f.e("A"), f.r("plays_at"), f.e("W")},
                                 {f.e("W"), f.inv("plays_at"), f.e("A")}};
  const auto g = augment_inverse(both, f.vocab);
  CHECK(g.edge_count() == 2);
  CHECK(g.source_fact_count() == 1);
}

TEST_CASE("contains and exclusion views") {
  Fixture f({{"A", "r", "B"}});
  CHECK(contains(f.graph, f.triple("A", "r", "B")));
  CHECK_FALSE(contains(f.graph, {f.e("A"), f.r("r"), f.e("C")}));

  const auto view = exclude_edge(f.graph, f.triple("A", "r", "B"));
  CHECK(view.edge_count() == 0);
  CHECK_FALSE(view.contains({f.e("B"), f.inv("r"), f.e("A")}));
  CHECK(contains(f.graph, f.triple("A", "r", "B")));  // underlying graph untouched

  const auto noop = exclude_edge(f.graph, {f.e("B"), f.r("r"), f.e("A")});
  CHECK(noop.edge_count() == f.graph.edge_count());
  CHECK(noop.contains(f.triple("A", "r", "B")));
}

namespace {

std::vector<Triple> random_triples(std::mt19937_64& rng, std::size_t entities,
                                   std::size_t relations, std::size_t count) {
  std::vector<Triple> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({EntityId(static_cast<std::uint32_t>(rng() % entities)),
                   RelationId(static_cast<std::uint32_t>(rng() % (2 * relations))),
                   EntityId(static_cast<std::uint32_t>(rng() % entities))});
  }
  return out;
}

}  // namespace

TEST_CASE("augmented graphs are closed under inversion and sorted") {
  std::mt19937_64 rng(11);
  const auto vocab = build_vocab({"p", "q", "r"});
  for (int trial = 0; trial < 200; ++trial) {
    const auto triples = random_triples(rng, 7, 3, rng() % 20);
    const auto g = augment_inverse(triples, vocab, 7);
    CHECK(g.edge_count() == 2 * g.source_fact_count());
    for (std::uint32_t e = 0; e < g.entity_count(); ++e) {
      const auto edges = g.out_edges(EntityId(e));
      CHECK(std::is_sorted(edges.begin(), edges.end()));
      for (const auto& edge : edges) {
        const Triple t{EntityId(e), edge.relation, edge.target};
        CHECK(g.contains(t));
        CHECK(g.contains(g.inverse(t)));
      }
    }
  }
}

TEST_CASE("exclusion view equals rebuilding the graph without the edge") {
  std::mt19937_64 rng(5);
  const auto vocab = build_vocab({"p", "q"});
  for (int trial = 0; trial < 300; ++trial) {
    const auto triples = random_triples(rng, 6, 2, 1 + rng() % 20);
    const auto g = augment_inverse(triples, vocab, 6);
    const Triple drop = triples[rng() % triples.size()];
    const auto view = exclude_edge(g, drop);

    std::vector<Triple> kept;
    for (const auto& t : g.source_facts()) {
      if (t != drop && g.inverse(t) != drop) kept.push_back(t);
    }
    const auto rebuilt = augment_inverse(kept, vocab, 6);
    CHECK(view.edge_count() == rebuilt.edge_count());
    for (std::uint32_t h = 0; h < 6; ++h) {
      std::vector<Edge> seen;
      view.for_each_out_edge(EntityId(h), [&](const Edge& e) { seen.push_back(e); });
      const auto expect = rebuilt.out_edges(EntityId(h));
      CHECK(std::equal(seen.begin(), seen.end(), expect.begin(), expect.end()));
      for (std::uint32_t r = 0; r < 4; ++r) {
        for (std::uint32_t t = 0; t < 6; ++t) {
          const Triple q{EntityId(h), RelationId(r), EntityId(t)};
          CHECK(view.contains(q) == rebuilt.contains(q));
        }
      }
    }
  }
}

TEST_CASE("load_splits interns entities and drops duplicates") {
  const auto dir = scratch_dir("kg_splits");
  write_file(dir / "train.txt", "a\tr\tb\nb\ts\tc\na\tr\tb\n");
  write_file(dir / "test.txt", "a\ts\tc\n");
  const auto names = collect_relation_names(dir);
  CHECK(std::set<std::string>(names.begin(), names.end()) == std::set<std::string>{"r", "s"});
  const auto vocab = build_vocab(names);
  const auto splits = load_splits(dir, vocab);
  CHECK(splits.train.size() == 2);
  CHECK(splits.valid.empty());
  CHECK(splits.test.size() == 1);
  CHECK(splits.duplicates_dropped == 1);
  CHECK(splits.entities.size() == 3);
  CHECK(splits.entities.name(splits.test[0].tail) == "c");

  write_file(dir / "test.txt", "a\tunknown\tc\n");
  CHECK_THROWS_AS(load_splits(dir, vocab), UnknownRelationError);
}
