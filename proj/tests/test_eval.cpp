// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "report/eval.hpp"
#include "support.hpp"

using namespace report;

namespace {

// Position of the true score among all candidates sorted descending,
// averaged over its tie group.
double sorted_rank(double truth, std::vector<double> negatives) {
  negatives.push_back(truth);
  std::sort(negatives.begin(), negatives.end(), std::greater<>());
  double first = 0.0, last = 0.0;
  bool seen = false;
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    if (negatives[i] == truth) {
      if (!seen) first = static_cast<double>(i + 1);
      seen = true;
      last = static_cast<double>(i + 1);
    }
  }
  return (first + last) / 2.0;
}

// Chain graph e0 -r-> e1 -r-> ... with 30 entities.
struct Chain {
  RelationVocab vocab = build_vocab({"r", "s"});
  std::vector<Triple> facts;
  Chain() {
    for (std::uint32_t i = 0; i + 1 < 30; ++i) {
      facts.push_back({EntityId{i}, vocab.id(i % 3 ? "r" : "s"), EntityId{i + 1}});
    }
  }
};

}  // namespace

TEST_CASE("rank examples") {
  const std::vector<double> lows(50, 0.1);
  CHECK(rank(0.9, lows) == 1.0);
  CHECK(rank(0.5, std::vector<double>{0.5, 0.5, 0.1}) == 2.0);
  CHECK(rank(0.5, std::vector<double>{}) == 1.0);
  const std::vector<double> ties(50, 0.5);
  CHECK(rank(0.5, ties) == 26.0);
}

TEST_CASE("rank agrees with a sort-based oracle") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = rng() % 60;
    std::vector<double> negs(n);
    // Few distinct values so ties are common.
    for (auto& s : negs) s = static_cast<double>(rng() % 7) / 6.0;
    const double truth = static_cast<double>(rng() % 7) / 6.0;
    CHECK(rank(truth, negs) == sorted_rank(truth, negs));
  }
}

TEST_CASE("metric closed forms") {
  const auto m = compute_metrics(std::vector<double>{1, 2, 4});
  CHECK(std::abs(m.mrr - 0.58333333333333333) < 1e-9);
  CHECK(m.hits10 == 1.0);
  CHECK(m.hits1 == doctest::Approx(1.0 / 3.0));
  CHECK(m.hits3 == doctest::Approx(2.0 / 3.0));

  const auto worst = compute_metrics(std::vector<double>{51});
  CHECK(worst.mrr == doctest::Approx(1.0 / 51.0));
  CHECK(worst.hits10 == 0.0);

  const auto best = compute_metrics(std::vector<double>(7, 1.0));
  CHECK(best.mrr == 1.0);
  CHECK(best.hits10 == 1.0);

  CHECK_THROWS_AS(compute_metrics(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("tie-aware hits reduce to plain hits without ties") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RankingResult> results;
  std::vector<double> ranks;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> scores(1 + rng() % 40);
    for (auto& s : scores) s = u(rng);
    results.emplace_back(Triple{}, scores);
    ranks.push_back(results.back().rank);
  }
  const auto a = compute_metrics(results);
  const auto b = compute_metrics(ranks);
  CHECK(a.mrr == doctest::Approx(b.mrr));
  CHECK(a.hits1 == doctest::Approx(b.hits1));
  CHECK(a.hits10 == doctest::Approx(b.hits10));
}

TEST_CASE("metrics are invariant under monotone score transforms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> scores(51);
    for (auto& s : scores) s = std::round(u(rng) * 4.0) / 4.0;
    std::vector<double> squashed;
    for (double s : scores) squashed.push_back(1.0 / (1.0 + std::exp(-s)));
    CHECK(RankingResult(Triple{}, scores).rank == RankingResult(Triple{}, squashed).rank);
  }
}

TEST_CASE("metrics of concatenated query sets are size-weighted means") {
  std::mt19937_64 rng(4);
  std::vector<double> a(1 + rng() % 30), b(1 + rng() % 30);
  for (auto& r : a) r = 1.0 + static_cast<double>(rng() % 40) / 2.0;
  for (auto& r : b) r = 1.0 + static_cast<double>(rng() % 40) / 2.0;
  std::vector<double> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto ma = compute_metrics(a), mb = compute_metrics(b), mab = compute_metrics(ab);
  const double wa = static_cast<double>(a.size()), wb = static_cast<double>(b.size());
  CHECK(mab.mrr == doctest::Approx((wa * ma.mrr + wb * mb.mrr) / (wa + wb)));
  CHECK(mab.hits10 == doctest::Approx((wa * ma.hits10 + wb * mb.hits10) / (wa + wb)));
}

TEST_CASE("evaluation negatives") {
  const Chain c;
  const FactSet known(c.facts);
  const Triple fact = c.facts[4];
  Rng r1 = negative_rng(fact, 7), r2 = negative_rng(fact, 7);
  const auto a = sample_eval_negatives(fact, known, 30, 50, r1);
  const auto b = sample_eval_negatives(fact, known, 30, 50, r2);
  CHECK(a.negatives == b.negatives);
  CHECK(a.negatives.size() == 50);
  CHECK(a.shortfall == 0);
  std::set<Triple> distinct;
  for (const auto& n : a.negatives) {
    CHECK_FALSE(known.contains(n));
    CHECK(n != fact);
    CHECK((n.head == fact.head || n.tail == fact.tail));
    CHECK(n.relation == fact.relation);
    distinct.insert(n);
  }
  CHECK(distinct.size() == 50);

  Rng r3 = negative_rng(fact, 8);
  CHECK(sample_eval_negatives(fact, known, 30, 50, r3).negatives != a.negatives);

  // Three entities leave at most four corruptions.
  const Triple tiny{EntityId{0}, c.vocab.id("r"), EntityId{1}};
  Rng r4 = negative_rng(tiny, 1);
  const auto few = sample_eval_negatives(tiny, FactSet(std::vector<Triple>{tiny}), 3, 50, r4);
  CHECK(few.negatives.size() == 4);
  CHECK(few.shortfall == 46);
}

TEST_CASE("stub scorers") {
  const Chain c;
  const FactSet known(c.facts);
  const std::vector<Triple> test(c.facts.begin(), c.facts.begin() + 10);

  const CandidateScorer constant = [](std::span<const Triple> cand) {
    return std::vector<double>(cand.size(), 0.5);
  };
  const auto flat = evaluate(constant, known, 30, test, {});
  CHECK(flat.per_seed.size() == 5);
  CHECK(flat.mean.mrr == doctest::Approx(1.0 / 26.0));
  CHECK(flat.mean.hits10 == doctest::Approx(10.0 / 51.0));
  CHECK(flat.shortfall_queries == 0);

  const CandidateScorer oracle = [&](std::span<const Triple> cand) {
    std::vector<double> s;
    for (const auto& t : cand) s.push_back(known.contains(t) ? 1.0 : 0.0);
    return s;
  };
  const auto perfect = evaluate(oracle, known, 30, test, {.keep_rankings = true});
  CHECK(perfect.mean.mrr == 1.0);
  CHECK(perfect.mean.hits1 == 1.0);
  CHECK(perfect.stddev.mrr == 0.0);
  CHECK(perfect.rankings.size() == 5);
  CHECK(perfect.rankings[0].size() == test.size());

  const CandidateScorer broken = [](std::span<const Triple>) { return std::vector<double>{}; };
  CHECK_THROWS_AS(evaluate(broken, known, 30, test, {}), std::runtime_error);
  CHECK_THROWS_AS(evaluate(oracle, known, 30, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(oracle, known, 30, test, {.seeds = {}}), std::invalid_argument);
}

TEST_CASE("evaluation repeats exactly") {
  const Chain c;
  const FactSet known(c.facts);
  std::mt19937_64 rng(5);
  const CandidateScorer hashy = [](std::span<const Triple> cand) {
    std::vector<double> s;
    for (const auto& t : cand) s.push_back(static_cast<double>(TripleHash{}(t) % 1000));
    return s;
  };
  const auto a = evaluate(hashy, known, 30, c.facts, {});
  const auto b = evaluate(hashy, known, 30, c.facts, {});
  CHECK(a.mean.mrr == b.mean.mrr);
  CHECK(a.mean.hits10 == b.mean.hits10);
}
