// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "report/synthetic.hpp"

using namespace report;

namespace {

using NamePair = std::pair<std::string, std::string>;

std::map<std::string, std::set<NamePair>> by_relation(const PlantedGraph& g) {
  std::map<std::string, std::set<NamePair>> out;
  for (const auto* part : {&g.background, &g.held_out}) {
    for (const auto& t : *part) out[t.relation].insert({t.head, t.tail});
  }
  return out;
}

}  // namespace

TEST_CASE("relation names") {
  CHECK(planted_relation_names(2) == std::vector<std::string>{"r1", "r2", "rt", "d1", "d2"});
}

TEST_CASE("the planted rule holds exactly") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlantedConfig cfg;
    cfg.entities = 60;
    cfg.seed = seed;
    const auto g = generate_planted(cfg);
    auto rel = by_relation(g);

    std::map<std::string, std::size_t> r1_out, r2_out;
    for (const auto& [h, t] : rel["r1"]) ++r1_out[h];
    for (const auto& [h, t] : rel["r2"]) ++r2_out[h];
    CHECK(r1_out.size() == 60);
    for (const auto& [e, n] : r1_out) CHECK(n == 2);
    for (const auto& [e, n] : r2_out) CHECK(n == 2);

    std::set<NamePair> want;
    for (const auto& [x, y] : rel["r1"]) {
      for (const auto& [y2, z] : rel["r2"]) {
        if (y2 == y && x != z) want.insert({x, z});
      }
    }
    CHECK(rel["rt"] == want);

    for (const auto& name : {"d1", "d2", "d3"}) {
      CHECK(!rel[name].empty());
      for (const auto& [h, t] : rel[name]) CHECK(h != t);
    }
    for (const auto& t : g.held_out) CHECK(t.relation == "rt");
    const double frac = static_cast<double>(g.held_out.size()) / static_cast<double>(want.size());
    CHECK(frac == doctest::Approx(0.15).epsilon(0.05));

    std::set<std::tuple<std::string, std::string, std::string>> bg;
    for (const auto& t : g.background) CHECK(bg.insert({t.head, t.relation, t.tail}).second);
    for (const auto& t : g.held_out) CHECK_FALSE(bg.contains({t.head, t.relation, t.tail}));
  }
}

TEST_CASE("generation is seeded") {
  PlantedConfig cfg;
  cfg.entities = 30;
  cfg.seed = 4;
  const auto a = generate_planted(cfg), b = generate_planted(cfg);
  CHECK(a.background.size() == b.background.size());
  for (std::size_t i = 0; i < a.background.size(); ++i) {
    CHECK(a.background[i].head == b.background[i].head);
    CHECK(a.background[i].tail == b.background[i].tail);
  }
  cfg.seed = 5;
  CHECK(by_relation(generate_planted(cfg))["r1"] != by_relation(a)["r1"]);
  cfg.entities = 2;
  CHECK_THROWS_AS(generate_planted(cfg), std::invalid_argument);
}

TEST_CASE("benchmark sides share no entities") {
  const auto bench = make_planted_benchmark(1, 50, 30);
  CHECK(bench.vocab.base_count() == 6);
  CHECK(bench.train.entities.size() == 50);
  CHECK(bench.inference.entities.size() == 30);
  CHECK(bench.train.test.empty());
  CHECK(bench.inference.valid.empty());
  CHECK(!bench.train.valid.empty());
  CHECK(!bench.inference.test.empty());
  std::set<std::string> a;
  for (std::uint32_t i = 0; i < bench.train.entities.size(); ++i) {
    a.insert(bench.train.entities.name(EntityId{i}));
  }
  for (std::uint32_t i = 0; i < bench.inference.entities.size(); ++i) {
    CHECK_FALSE(a.contains(bench.inference.entities.name(EntityId{i})));
  }
}
