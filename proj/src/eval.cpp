// SPDX-License-Identifier: Apache-2.0

#include "report/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace report {

Rng negative_rng(const Triple& fact, std::uint64_t seed) {
  return make_rng(seed, "eval.negatives", TripleHash{}(fact));
}

NegativeSample sample_eval_negatives(const Triple& fact, const FactSet& known,
                                     std::size_t entity_count, std::size_t count, Rng& rng) {
  NegativeSample out;
  if (entity_count < 2 || count == 0) {
    out.shortfall = count;
    return out;
  }
  std::unordered_set<Triple, TripleHash> seen;
  const std::size_t max_attempts = 1000 * count;
  for (std::size_t attempt = 0; attempt < max_attempts && out.negatives.size() < count;
       ++attempt) {
    Triple c = fact;
    const EntityId e{static_cast<std::uint32_t>(uniform_index(rng, entity_count))};
    if (coin_flip(rng)) {
      c.head = e;
    } else {
      c.tail = e;
    }
    if (c == fact || known.contains(c) || !seen.insert(c).second) continue;
    out.negatives.push_back(c);
  }
  out.shortfall = count - out.negatives.size();
  return out;
}

double rank(double true_score, std::span<const double> negative_scores) {
  std::size_t greater = 0;
  std::size_t equal = 0;
  for (double s : negative_scores) {
    if (s > true_score) {
      ++greater;
    } else if (s == true_score) {
      ++equal;
    }
  }
  return 1.0 + static_cast<double>(greater) + static_cast<double>(equal) / 2.0;
}

RankingResult::RankingResult(const Triple& q, std::span<const double> candidate_scores)
    : query(q), scores(candidate_scores.begin(), candidate_scores.end()) {
  if (candidate_scores.empty()) throw std::invalid_argument("no score for the true fact");
  const double s = candidate_scores[0];
  const auto negs = candidate_scores.subspan(1);
  candidates = negs.size();
  for (double x : negs) {
    if (x > s) {
      ++greater;
    } else if (x == s) {
      ++ties;
    }
  }
  rank = report::rank(s, negs);
}

namespace {

void finish(Metrics& m, std::size_t n) {
  const double d = static_cast<double>(n);
  m.mrr /= d;
  m.hits1 /= d;
  m.hits3 /= d;
  m.hits10 /= d;
  m.n_queries = n;
}

// P(rank <= k) when the true fact lands uniformly among its tie group.
double expected_hit(const RankingResult& r, double k) {
  const double lowest = static_cast<double>(r.greater) + 1.0;
  const double group = static_cast<double>(r.ties) + 1.0;
  return std::clamp((k - lowest + 1.0) / group, 0.0, 1.0);
}

}  // namespace

Metrics compute_metrics(std::span<const double> ranks) {
  if (ranks.empty()) throw std::invalid_argument("compute_metrics: no ranks");
  Metrics m;
  for (double r : ranks) {
    if (!(r >= 1.0)) throw std::invalid_argument("compute_metrics: rank below 1");
    m.mrr += 1.0 / r;
    m.hits1 += r <= 1.0 ? 1.0 : 0.0;
    m.hits3 += r <= 3.0 ? 1.0 : 0.0;
    m.hits10 += r <= 10.0 ? 1.0 : 0.0;
  }
  finish(m, ranks.size());
  return m;
}

Metrics compute_metrics(std::span<const RankingResult> results) {
  if (results.empty()) throw std::invalid_argument("compute_metrics: no ranks");
  Metrics m;
  for (const auto& r : results) {
    m.mrr += 1.0 / r.rank;
    m.hits1 += expected_hit(r, 1.0);
    m.hits3 += expected_hit(r, 3.0);
    m.hits10 += expected_hit(r, 10.0);
  }
  finish(m, results.size());
  return m;
}

CandidateScorer model_scorer(const Model& model, const KnowledgeGraph& background,
                             std::uint64_t seed) {
  return [&model, &background, seed](std::span<const Triple> candidates) {
    const auto cfg = model.config().extract_config();
    std::vector<ModelInput> inputs;
    inputs.reserve(candidates.size());
    for (const auto& c : candidates) {
      Rng rng = make_rng(seed, "eval.extract");
      inputs.push_back(extract_example(background, c, cfg, rng));
    }
    return model.score(inputs);
  };
}

EvalReport evaluate(const CandidateScorer& scorer, const FactSet& known,
                    std::size_t entity_count, std::span<const Triple> test_facts,
                    const EvalConfig& config) {
  if (test_facts.empty()) throw std::invalid_argument("evaluate: no test facts");
  if (config.seeds.empty()) throw std::invalid_argument("evaluate: no seeds");
  EvalReport report;
  std::vector<Triple> candidates;
  for (const std::uint64_t seed : config.seeds) {
    std::vector<RankingResult> results;
    results.reserve(test_facts.size());
    for (const Triple& fact : test_facts) {
      Rng rng = negative_rng(fact, seed);
      auto sample = sample_eval_negatives(fact, known, entity_count, config.negatives, rng);
      if (sample.shortfall > 0) ++report.shortfall_queries;
      candidates.assign(1, fact);
      candidates.insert(candidates.end(), sample.negatives.begin(), sample.negatives.end());
      const auto scores = scorer(candidates);
      if (scores.size() != candidates.size()) {
        throw std::runtime_error("scorer returned " + std::to_string(scores.size()) +
                                 " scores for " + std::to_string(candidates.size()) +
                                 " candidates");
      }
      results.emplace_back(fact, scores);
    }
    Metrics m = compute_metrics(results);
    m.seed = seed;
    report.per_seed.push_back(m);
    if (config.keep_rankings) report.rankings.push_back(std::move(results));
  }

  const double n = static_cast<double>(report.per_seed.size());
  const auto field_stats = [&](double Metrics::*f) {
    double mean = 0.0;
    for (const auto& m : report.per_seed) mean += m.*f;
    mean /= n;
    double var = 0.0;
    for (const auto& m : report.per_seed) var += (m.*f - mean) * (m.*f - mean);
    report.mean.*f = mean;
    report.stddev.*f = std::sqrt(var / n);
  };
  field_stats(&Metrics::mrr);
  field_stats(&Metrics::hits1);
  field_stats(&Metrics::hits3);
  field_stats(&Metrics::hits10);
  report.mean.n_queries = test_facts.size();
  return report;
}

}  // namespace report
