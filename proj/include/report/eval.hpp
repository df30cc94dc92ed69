// SPDX-License-Identifier: Apache-2.0
//
// Fully-inductive ranking evaluation: each query fact is ranked against
// corrupted candidates sampled by replacing its head or tail.

#ifndef REPORT_EVAL_HPP
#define REPORT_EVAL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "report/extract.hpp"
#include "report/kg.hpp"
#include "report/model.hpp"

namespace report {

struct NegativeSample {
  std::vector<Triple> negatives;
  /// Requested minus obtained; nonzero when the graph is too small.
  std::size_t shortfall = 0;
};

/// `count` distinct corruptions of `fact`, none of them in `known`. Each
/// negative flips a coin for the corrupted side.
NegativeSample sample_eval_negatives(const Triple& fact, const FactSet& known,
                                     std::size_t entity_count, std::size_t count, Rng& rng);

/// Stream used for the negatives of `fact` under `seed`.
Rng negative_rng(const Triple& fact, std::uint64_t seed);

/// 1 + #{greater} + #{equal} / 2.
double rank(double true_score, std::span<const double> negative_scores);

struct RankingResult {
  Triple query;
  double rank = 1.0;
  std::size_t greater = 0;
  std::size_t ties = 0;
  std::size_t candidates = 0;  // negatives actually ranked against
  std::vector<double> scores;  // true fact first

  RankingResult() = default;
  RankingResult(const Triple& q, std::span<const double> candidate_scores);
};

struct Metrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t n_queries = 0;
  std::uint64_t seed = 0;
};

/// MRR = mean(1 / rank); Hits@k = mean(rank <= k). Throws on empty input.
Metrics compute_metrics(std::span<const double> ranks);

/// As above, except Hits@k is the expected hit rate when ties with the true
/// fact are broken uniformly at random. Equal to the plain form without ties.
Metrics compute_metrics(std::span<const RankingResult> results);

/// Scores candidate triples; higher means more plausible.
using CandidateScorer = std::function<std::vector<double>(std::span<const Triple>)>;

/// Extracts each candidate's model input from `background` and scores it.
/// Path sampling uses one fixed stream per candidate, so scores do not
/// depend on entity numbering or on batch composition.
CandidateScorer model_scorer(const Model& model, const KnowledgeGraph& background,
                             std::uint64_t seed);

struct EvalConfig {
  std::size_t negatives = 50;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool keep_rankings = false;
};

struct EvalReport {
  std::vector<Metrics> per_seed;
  Metrics mean;
  Metrics stddev;
  std::size_t shortfall_queries = 0;  // summed over seeds
  std::vector<std::vector<RankingResult>> rankings;  // per seed, if kept
};

/// Ranks every test fact against fresh negatives for each seed. Negatives are
/// filtered against `known`, which should hold every fact of the inference
/// graph (background and test).
EvalReport evaluate(const CandidateScorer& scorer, const FactSet& known,
                    std::size_t entity_count, std::span<const Triple> test_facts,
                    const EvalConfig& config);

}  // namespace report

#endif  // REPORT_EVAL_HPP
