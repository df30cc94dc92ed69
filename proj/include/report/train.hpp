// SPDX-License-Identifier: Apache-2.0
//
// Training: negative sampling, summed binary cross-entropy, Adam, early
// stopping on validation Hits@10, and (learning rate x dropout) grid search.

#ifndef REPORT_TRAIN_HPP
#define REPORT_TRAIN_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "report/eval.hpp"
#include "report/kg.hpp"
#include "report/model.hpp"

namespace report {

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 128;
  double lr = 1e-3;
  std::vector<double> lr_grid{5e-5, 1e-4, 5e-4, 1e-3, 5e-3};
  std::vector<double> dropout_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::size_t patience = 5;
  std::uint64_t seed = 42;
  std::size_t negatives_per_positive = 1;
  std::size_t validation_negatives = 50;

  void validate() const;
};

struct LabeledFact {
  Triple triple;
  int label = 0;
};

/// Corrupts the head or tail (coin flip) with a uniform random entity until
/// the result is not in `positives`; after 100 rejected draws the other side
/// is tried. Throws SamplingError if both sides are exhausted.
Triple sample_negative(const Triple& fact, const FactSet& positives, std::size_t entity_count,
                       Rng& rng);

/// -sum(y log s + (1 - y) log(1 - s)) with s clamped to [1e-7, 1 - 1e-7].
double bce_loss(std::span<const double> scores, std::span<const int> labels);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // summed over all labeled facts of the epoch
  std::size_t train_examples = 0;
  double valid_hits10 = 0.0;
  double valid_mrr = 0.0;
  bool improved = false;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_hits10 = 0.0;
  double best_mrr = 0.0;
  std::optional<std::filesystem::path> best_checkpoint;
  bool stopped_early = false;
};

struct FitOptions {
  /// Best-so-far model is written here when set (requires `vocab`).
  std::optional<std::filesystem::path> checkpoint;
  const RelationVocab* vocab = nullptr;
  /// Called after every epoch.
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Trains `model` on `train_facts` over the background `train_graph`, which
/// must contain them. Each epoch pairs every shuffled positive with fresh
/// corruptions, extracts inputs with the query edge hidden, and takes one
/// Adam step per batch. Validation ranks `valid_facts` against negatives
/// sampled once up front; the best epoch (Hits@10, then MRR) is restored
/// into `model` before returning.
TrainReport fit(const KnowledgeGraph& train_graph, std::span<const Triple> train_facts,
                std::span<const Triple> valid_facts, Model& model, const TrainConfig& config,
                const FitOptions& options = {});

struct GridCell {
  double lr = 0.0;
  double dropout = 0.0;
  TrainReport report;
};

struct GridResult {
  std::vector<GridCell> cells;  // lr-major order
  std::size_t best = 0;
};

/// Trains one fresh model per (lr, dropout) cell and picks the best
/// validation Hits@10; ties go to the lower lr, then the lower dropout.
GridResult grid_search(const KnowledgeGraph& train_graph, std::span<const Triple> train_facts,
                       std::span<const Triple> valid_facts, const ModelConfig& model_config,
                       std::size_t base_relations, const TrainConfig& config,
                       const std::function<void(const GridCell&)>& on_cell = {});

/// Index of the winning cell under the grid-search selection rule.
std::size_t select_best_cell(std::span<const GridCell> cells);

}  // namespace report

#endif  // REPORT_TRAIN_HPP
