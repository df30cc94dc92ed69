// SPDX-License-Identifier: Apache-2.0
//
// Planted-rule benchmark: rt(x, z) holds iff x -r1-> y -r2-> z for some y
// (x != z), on a random graph with distractor relations d1..dn. Training and
// inference graphs use disjoint entity names.

#ifndef REPORT_SYNTHETIC_HPP
#define REPORT_SYNTHETIC_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "report/kg.hpp"

namespace report {

struct PlantedConfig {
  std::size_t entities = 200;
  std::size_t r1_out = 2;  // r1 edges leaving each entity
  std::size_t r2_out = 2;
  std::size_t distractors = 3;
  double distractor_density = 0.25;  // edges per entity, per distractor
  double holdout = 0.15;  // fraction of rt facts moved out of the background
  std::string prefix = "e";
  std::uint64_t seed = 0;
};

struct PlantedGraph {
  std::vector<NamedTriple> background;
  std::vector<NamedTriple> held_out;  // rt facts only
};

std::vector<std::string> planted_relation_names(std::size_t distractors);

PlantedGraph generate_planted(const PlantedConfig& config);

struct PlantedBenchmark {
  RelationVocab vocab;
  GraphSplits train;  // valid = held-out rt facts
  GraphSplits inference;  // test = held-out rt facts
};

/// Training graph of `train_entities` (prefix "a") holding out 15% of rt,
/// inference graph of `inference_entities` (prefix "b") holding out 30%.
PlantedBenchmark make_planted_benchmark(std::uint64_t seed, std::size_t train_entities = 200,
                                        std::size_t inference_entities = 100);

/// Writes train.txt / valid.txt / test.txt (tab-separated) under `dir`.
void write_split_files(const std::filesystem::path& dir, const std::vector<NamedTriple>& train,
                       const std::vector<NamedTriple>& valid,
                       const std::vector<NamedTriple>& test);

}  // namespace report

#endif  // REPORT_SYNTHETIC_HPP
