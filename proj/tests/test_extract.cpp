// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "report/extract.hpp"
#include "support.hpp"

using namespace report;
using report::testing::Fixture;

namespace {

RelationalPath seq(std::initializer_list<RelationId> rs) { return RelationalPath(rs); }

Fixture fig1() {
  return Fixture({{"S.Curry", "plays_at", "Warriors"},
                  {"A.Iguodala", "plays_at", "Warriors"},
                  {"K.Thompson", "plays_at", "Warriors"},
                  {"S.Curry", "teammate", "K.Thompson"},
                  {"Warriors", "located_in", "California"},
                  {"A.Iguodala", "lives_in", "California"},
                  {"A.Iguodala", "nationality", "USA"},
                  {"A.Iguodala", "drafted_by", "76ers"},
                  {"S.Curry", "born_in", "Ohio"}});
}

}  // namespace

TEST_CASE("the running example's length-2 rule path is found") {
  auto f = fig1();
  const auto paths = enumerate_paths(GraphView(f.graph), f.e("S.Curry"), f.e("A.Iguodala"), 2);
  CHECK(std::find(paths.paths.begin(), paths.paths.end(),
                  seq({f.r("plays_at"), f.inv("plays_at")})) != paths.paths.end());
  CHECK(f.vocab.base_count() == 7);
}

TEST_CASE("single edge gives the one-hop path") {
  Fixture f({{"A", "r", "B"}});
  const auto paths = enumerate_paths(GraphView(f.graph), f.e("A"), f.e("B"), 4);
  REQUIRE(paths.paths.size() == 1);
  CHECK(paths.paths[0] == seq({f.r("r")}));
  CHECK(enumerate_paths(GraphView(f.graph), f.e("A"), f.e("A"), 4).paths.empty());
  CHECK(enumerate_paths(GraphView(f.graph), f.e("A"), EntityId(99), 4).paths.empty());
}

TEST_CASE("paths are sorted by length then relation IDs and deduplicated") {
  // Two entity paths with the same relation sequence collapse.
  Fixture f({{"A", "p", "X"}, {"X", "q", "C"}, {"A", "p", "Y"}, {"Y", "q", "C"}, {"A", "s", "C"}});
  const auto ps = enumerate_paths(GraphView(f.graph), f.e("A"), f.e("C"), 3);
  CHECK(ps.realized_paths == 3);
  REQUIRE(ps.paths.size() == 2);
  CHECK(ps.paths[0] == seq({f.r("s")}));
  CHECK(ps.paths[1] == seq({f.r("p"), f.r("q")}));
  CHECK(std::is_sorted(ps.paths.begin(), ps.paths.end(), PathOrder{}));
}

TEST_CASE("enumeration matches the brute-force DFS oracle") {
  std::size_t cases = 0;
  CHECK(report::testing::path_oracle_mismatches(2024, 300, &cases) == 0);
  CHECK(cases > 0);
}

TEST_CASE("path sets grow monotonically with the length bound") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto vocab = build_vocab(report::testing::relation_names(3));
    const auto triples = report::testing::random_graph(rng, 7, 3, 0.08);
    const auto g = augment_inverse(triples, vocab, 7);
    for (std::size_t k = 1; k < 5; ++k) {
      const auto a = enumerate_paths(GraphView(g), EntityId(0), EntityId(1), k);
      const auto b = enumerate_paths(GraphView(g), EntityId(0), EntityId(1), k + 1);
      const std::set<RelationalPath> bs(b.paths.begin(), b.paths.end());
      for (const auto& p : a.paths) CHECK(bs.contains(p));
    }
  }
}

TEST_CASE("sample_paths caps uniformly and reproducibly") {
  Rng rng = make_rng(1, "test");
  PathSet five;
  for (std::uint32_t i = 0; i < 5; ++i) five.paths.push_back({RelationId(i)});
  const auto same = sample_paths(five, 300, rng);
  CHECK(same.paths == five.paths);
  CHECK_FALSE(same.truncated);
  CHECK(sample_paths(PathSet{}, 300, rng).paths.empty());
  CHECK_THROWS(sample_paths(five, 0, rng));

  PathSet many;
  for (std::uint32_t i = 0; i < 500; ++i) many.paths.push_back({RelationId(i / 20), RelationId(i % 20)});
  Rng r1 = make_rng(9, "sample");
  Rng r2 = make_rng(9, "sample");
  const auto a = sample_paths(many, 300, r1);
  const auto b = sample_paths(many, 300, r2);
  CHECK(a.truncated);
  CHECK(a.paths.size() == 300);
  CHECK(std::set<RelationalPath>(a.paths.begin(), a.paths.end()).size() == 300);
  CHECK(a.paths == b.paths);
  CHECK(std::is_sorted(a.paths.begin(), a.paths.end(), PathOrder{}));
}

TEST_CASE("relational context is the set of outgoing relation types") {
  Fixture f({{"A", "r", "B"}, {"C", "r1", "D"}, {"C", "r1", "E"}, {"C", "r2", "D"}},
            {"unused"});
  Rng rng(0);
  const auto b = extract_context(GraphView(f.graph), f.e("B"), 64, rng);
  CHECK(b.relations == std::vector<RelationId>{f.inv("r")});
  const auto c = extract_context(GraphView(f.graph), f.e("C"), 64, rng);
  CHECK(c.relations == std::vector<RelationId>{f.r("r1"), f.r("r2")});
  CHECK_FALSE(c.truncated);
  const EntityId isolated = f.e("Z");
  CHECK(extract_context(GraphView(f.graph), isolated, 64, rng).relations.empty());

  const auto capped = extract_context(GraphView(f.graph), f.e("C"), 1, rng);
  CHECK(capped.truncated);
  CHECK(capped.relations.size() == 1);
}

TEST_CASE("context does not depend on input edge order") {
  const std::vector<NamedTriple> edges{{"C", "r2", "D"}, {"C", "r1", "E"}, {"F", "r3", "C"}};
  std::vector<NamedTriple> reversed(edges.rbegin(), edges.rend());
  Fixture a(edges), b(reversed);
  Rng rng(0);
  const auto ca = extract_context(GraphView(a.graph), a.e("C"), 64, rng);
  const auto cb = extract_context(GraphView(b.graph), b.e("C"), 64, rng);
  std::vector<std::string> na, nb;
  for (auto r : ca.relations) na.push_back(a.vocab.display_name(r));
  for (auto r : cb.relations) nb.push_back(b.vocab.display_name(r));
  CHECK(na == nb);
  CHECK(std::is_sorted(ca.relations.begin(), ca.relations.end()));
}

TEST_CASE("extract_example hides the query edge") {
  Rng rng(0);
  Fixture lone({{"A", "r", "B"}});
  const auto in = extract_example(lone.graph, lone.triple("A", "r", "B"), {}, rng);
  CHECK(in.paths.paths.empty());
  CHECK(in.head_context.relations.empty());
  CHECK(in.tail_context.relations.empty());
  CHECK(in.query_relation == lone.r("r"));

  Fixture f({{"A", "r", "B"}, {"A", "p", "X"}, {"X", "q", "C"}});
  const auto q = f.triple("A", "r", "C");
  const auto ex = extract_example(f.graph, q, {}, rng);
  REQUIRE(ex.paths.paths.size() == 1);
  CHECK(ex.paths.paths[0] == seq({f.r("p"), f.r("q")}));
  CHECK(ex.head_context.relations == std::vector<RelationId>{f.r("p"), f.r("r")});
  CHECK(ex.tail_context.relations == std::vector<RelationId>{f.inv("q")});
}

TEST_CASE("no leakage unless a parallel edge supports the query relation") {
  Rng rng(0);
  Fixture single({{"A", "r", "B"}, {"A", "s", "B"}});
  const auto a = extract_example(single.graph, single.triple("A", "r", "B"), {}, rng);
  for (const auto& p : a.paths.paths) CHECK(p != seq({single.r("r")}));
  CHECK(std::find(a.head_context.relations.begin(), a.head_context.relations.end(),
                  single.r("r")) == a.head_context.relations.end());

  // A second r edge out of A keeps r in the head context, but not as a path.
  Fixture parallel({{"A", "r", "B"}, {"A", "r", "C"}});
  const auto b = extract_example(parallel.graph, parallel.triple("A", "r", "B"), {}, rng);
  CHECK(b.paths.paths.empty());
  CHECK(b.head_context.relations == std::vector<RelationId>{parallel.r("r")});
}
