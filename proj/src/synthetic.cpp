// SPDX-License-Identifier: Apache-2.0

#include "report/synthetic.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "report/rng.hpp"

namespace report {

std::vector<std::string> planted_relation_names(std::size_t distractors) {
  std::vector<std::string> names{"r1", "r2", "rt"};
  for (std::size_t i = 1; i <= distractors; ++i) names.push_back("d" + std::to_string(i));
  return names;
}

PlantedGraph generate_planted(const PlantedConfig& config) {
  const std::size_t n = config.entities;
  if (n < 3) throw std::invalid_argument("planted graph needs at least 3 entities");
  if (config.r1_out >= n || config.r2_out >= n) {
    throw std::invalid_argument("rule-relation out-degree must be below the entity count");
  }
  Rng rng = make_rng(config.seed, "planted." + config.prefix);
  using Edge3 = std::tuple<std::size_t, std::string, std::size_t>;
  std::set<Edge3> facts;

  // Distinct out-neighbours, never the entity itself.
  const auto random_targets = [&](std::size_t x, std::size_t k) {
    std::set<std::size_t> out;
    while (out.size() < k) {
      const auto y = uniform_index(rng, n);
      if (y != x) out.insert(y);
    }
    return out;
  };
  std::vector<std::set<std::size_t>> r1(n), r2(n);
  for (std::size_t x = 0; x < n; ++x) {
    r1[x] = random_targets(x, config.r1_out);
    r2[x] = random_targets(x, config.r2_out);
    for (auto y : r1[x]) facts.emplace(x, "r1", y);
    for (auto y : r2[x]) facts.emplace(x, "r2", y);
  }
  std::vector<Edge3> rule;
  for (std::size_t x = 0; x < n; ++x) {
    for (auto y : r1[x]) {
      for (auto z : r2[y]) {
        if (z != x && facts.emplace(x, "rt", z).second) rule.emplace_back(x, "rt", z);
      }
    }
  }
  const auto per_distractor =
      static_cast<std::size_t>(config.distractor_density * static_cast<double>(n) + 0.5);
  for (std::size_t d = 1; d <= config.distractors; ++d) {
    const std::string name = "d" + std::to_string(d);
    std::size_t added = 0;
    while (added < per_distractor) {
      const auto h = uniform_index(rng, n);
      const auto t = uniform_index(rng, n);
      if (h != t && facts.emplace(h, name, t).second) ++added;
    }
  }

  shuffle(rule.begin(), rule.end(), rng);
  const auto held = static_cast<std::size_t>(config.holdout * static_cast<double>(rule.size()) + 0.5);
  std::set<Edge3> held_set(rule.begin(), rule.begin() + static_cast<std::ptrdiff_t>(held));

  const auto name = [&](std::size_t i) { return config.prefix + std::to_string(i); };
  PlantedGraph out;
  for (const auto& [h, r, t] : facts) {
    NamedTriple nt{name(h), r, name(t)};
    (held_set.contains({h, r, t}) ? out.held_out : out.background).push_back(std::move(nt));
  }
  return out;
}

namespace {

std::vector<Triple> intern(EntityIndex& entities, const RelationVocab& vocab,
                           const std::vector<NamedTriple>& named) {
  std::vector<Triple> out;
  out.reserve(named.size());
  for (const auto& t : named) {
    out.push_back({entities.intern(t.head), vocab.id(t.relation), entities.intern(t.tail)});
  }
  return out;
}

}  // namespace

PlantedBenchmark make_planted_benchmark(std::uint64_t seed, std::size_t train_entities,
                                        std::size_t inference_entities) {
  PlantedConfig a;
  a.entities = train_entities;
  a.prefix = "a";
  a.seed = seed;
  a.holdout = 0.15;
  PlantedConfig b = a;
  b.entities = inference_entities;
  b.prefix = "b";
  b.holdout = 0.30;
  const PlantedGraph ga = generate_planted(a);
  const PlantedGraph gb = generate_planted(b);

  PlantedBenchmark bench{build_vocab(planted_relation_names(a.distractors)), {}, {}};
  bench.train.train = intern(bench.train.entities, bench.vocab, ga.background);
  bench.train.valid = intern(bench.train.entities, bench.vocab, ga.held_out);
  bench.inference.train = intern(bench.inference.entities, bench.vocab, gb.background);
  bench.inference.test = intern(bench.inference.entities, bench.vocab, gb.held_out);
  return bench;
}

void write_split_files(const std::filesystem::path& dir, const std::vector<NamedTriple>& train,
                       const std::vector<NamedTriple>& valid,
                       const std::vector<NamedTriple>& test) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const char* file, const std::vector<NamedTriple>& facts) {
    std::ofstream out(dir / file);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
    for (const auto& t : facts) out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  };
  write("train.txt", train);
  write("valid.txt", valid);
  write("test.txt", test);
}

}  // namespace report
