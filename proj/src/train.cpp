// SPDX-License-Identifier: Apache-2.0

#include "report/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "report/checkpoint.hpp"
#include "report/numerics/adam.hpp"

namespace report {

void TrainConfig::validate() const {
  if (epochs == 0) throw std::invalid_argument("epochs must be at least 1");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be at least 1");
  if (patience == 0) throw std::invalid_argument("patience must be at least 1");
  if (lr_grid.empty() || dropout_grid.empty()) throw std::invalid_argument("empty search grid");
  if (negatives_per_positive == 0) {
    throw std::invalid_argument("negatives_per_positive must be at least 1");
  }
  if (!(lr >= 0.0)) throw std::invalid_argument("lr must be non-negative");
}

Triple sample_negative(const Triple& fact, const FactSet& positives, std::size_t entity_count,
                       Rng& rng) {
  if (entity_count < 2) throw SamplingError("negative sampling needs at least 2 entities");
  constexpr int kAttemptsPerSide = 100;
  const bool head_first = coin_flip(rng);
  for (int side = 0; side < 2; ++side) {
    const bool corrupt_head = (side == 0) == head_first;
    for (int attempt = 0; attempt < kAttemptsPerSide; ++attempt) {
      Triple c = fact;
      const EntityId e{static_cast<std::uint32_t>(uniform_index(rng, entity_count))};
      (corrupt_head ? c.head : c.tail) = e;
      if (c != fact && !positives.contains(c)) return c;
    }
  }
  throw SamplingError("no valid corruption found for fact after " +
                      std::to_string(2 * kAttemptsPerSide) + " draws");
}

double bce_loss(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("bce_loss: " + std::to_string(scores.size()) + " scores vs " +
                                std::to_string(labels.size()) + " labels");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], 1e-7, 1.0 - 1e-7);
    loss -= labels[i] != 0 ? std::log(s) : std::log(1.0 - s);
  }
  return loss;
}

namespace {

struct ValidationSet {
  std::vector<std::vector<ModelInput>> inputs;  // true fact first
  std::vector<Triple> facts;
};

ValidationSet prepare_validation(const KnowledgeGraph& graph, std::span<const Triple> train,
                                 std::span<const Triple> valid, const ExtractConfig& ecfg,
                                 const TrainConfig& config) {
  ValidationSet vs;
  if (valid.empty()) return vs;
  FactSet known(train);
  known.insert(valid);
  for (const Triple& fact : valid) {
    Rng rng = make_rng(config.seed, "valid.negatives", TripleHash{}(fact));
    const auto sample = sample_eval_negatives(fact, known, graph.entity_count(),
                                              config.validation_negatives, rng);
    std::vector<ModelInput> group;
    group.reserve(sample.negatives.size() + 1);
    Rng xrng = make_rng(config.seed, "valid.extract");
    group.push_back(extract_example(graph, fact, ecfg, xrng));
    for (const Triple& n : sample.negatives) {
      Rng nrng = make_rng(config.seed, "valid.extract");
      group.push_back(extract_example(graph, n, ecfg, nrng));
    }
    vs.inputs.push_back(std::move(group));
    vs.facts.push_back(fact);
  }
  return vs;
}

Metrics validate(const Model& model, const ValidationSet& vs) {
  std::vector<RankingResult> results;
  results.reserve(vs.facts.size());
  for (std::size_t i = 0; i < vs.facts.size(); ++i) {
    results.emplace_back(vs.facts[i], model.score(vs.inputs[i]));
  }
  return compute_metrics(results);
}

std::vector<numerics::Tensor<float>> snapshot(const Model& model) {
  std::vector<numerics::Tensor<float>> out;
  for (std::size_t i = 0; i < model.params().size(); ++i) out.push_back(model.params()[i].value);
  return out;
}

void restore(Model& model, const std::vector<numerics::Tensor<float>>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) model.params()[i].value = values[i];
}

}  // namespace

TrainReport fit(const KnowledgeGraph& train_graph, std::span<const Triple> train_facts,
                std::span<const Triple> valid_facts, Model& model, const TrainConfig& config,
                const FitOptions& options) {
  config.validate();
  if (train_facts.empty()) throw std::invalid_argument("fit: empty training set");
  if (options.checkpoint && options.vocab == nullptr) {
    throw std::invalid_argument("fit: checkpointing needs the relation vocabulary");
  }
  const ExtractConfig ecfg = model.config().extract_config();
  const FactSet positives(train_facts);
  const std::size_t n_entities = train_graph.entity_count();
  const ValidationSet validation =
      prepare_validation(train_graph, train_facts, valid_facts, ecfg, config);

  numerics::AdamState<float> adam(model.params(), {.lr = config.lr});
  model.params().zero_grad();

  // Positive inputs only change between epochs when path sampling kicks in.
  std::vector<std::optional<ModelInput>> positive_cache(train_facts.size());

  TrainReport report;
  std::vector<numerics::Tensor<float>> best = snapshot(model);
  bool have_best = false;
  std::size_t stale = 0;
  const std::size_t group = 1 + config.negatives_per_positive;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(train_facts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = make_rng(config.seed, "train.shuffle", epoch);
    shuffle(order.begin(), order.end(), shuffle_rng);

    Rng neg_rng = make_rng(config.seed, "train.negatives", epoch);
    std::vector<LabeledFact> labeled;
    std::vector<std::size_t> source;  // positive index, or npos for negatives
    labeled.reserve(order.size() * group);
    for (const std::size_t i : order) {
      labeled.push_back({train_facts[i], 1});
      source.push_back(i);
      for (std::size_t k = 0; k < config.negatives_per_positive; ++k) {
        labeled.push_back({sample_negative(train_facts[i], positives, n_entities, neg_rng), 0});
        source.push_back(static_cast<std::size_t>(-1));
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    std::vector<ModelInput> inputs;
    std::vector<int> labels;
    for (std::size_t start = 0, batch_no = 0; start < labeled.size();
         start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(labeled.size(), start + config.batch_size);
      inputs.clear();
      labels.clear();
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t src = source[j];
        if (src != static_cast<std::size_t>(-1) && positive_cache[src]) {
          inputs.push_back(*positive_cache[src]);
        } else {
          Rng xrng = make_rng(config.seed, "train.extract", epoch, j);
          inputs.push_back(extract_example(train_graph, labeled[j].triple, ecfg, xrng));
          if (src != static_cast<std::size_t>(-1) && !inputs.back().paths.truncated &&
              !inputs.back().head_context.truncated && !inputs.back().tail_context.truncated) {
            positive_cache[src] = inputs.back();
          }
        }
        labels.push_back(labeled[j].label);
      }

      numerics::Tape<float> tape;
      Rng dropout_rng = make_rng(config.seed, "train.dropout", epoch, batch_no);
      const auto fwd = model.forward(tape, inputs, true, &dropout_rng);
      const auto loss = tape.bce(fwd.scores, labels);
      rec.train_loss += static_cast<double>(tape.value(loss).data[0]);
      tape.backward(loss);
      numerics::adam_step(model.params(), adam);
      model.params().zero_grad();
    }
    rec.train_examples = labeled.size();

    if (!validation.facts.empty()) {
      const Metrics m = validate(model, validation);
      rec.valid_hits10 = m.hits10;
      rec.valid_mrr = m.mrr;
      rec.improved = !have_best || m.hits10 > report.best_hits10 ||
                     (m.hits10 == report.best_hits10 && m.mrr > report.best_mrr);
    } else {
      rec.improved = true;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (rec.improved) {
      have_best = true;
      stale = 0;
      report.best_epoch = epoch;
      report.best_hits10 = rec.valid_hits10;
      report.best_mrr = rec.valid_mrr;
      best = snapshot(model);
      if (options.checkpoint) {
        save_checkpoint(*options.checkpoint, model, *options.vocab);
        report.best_checkpoint = options.checkpoint;
      }
    } else {
      ++stale;
    }
    report.epochs.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (stale >= config.patience) {
      report.stopped_early = epoch < config.epochs;
      break;
    }
  }
  restore(model, best);
  return report;
}

std::size_t select_best_cell(std::span<const GridCell> cells) {
  if (cells.empty()) throw std::invalid_argument("select_best_cell: no cells");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& a = cells[i];
    const auto& b = cells[best];
    const double ha = a.report.best_hits10;
    const double hb = b.report.best_hits10;
    if (ha > hb || (ha == hb && (a.lr < b.lr || (a.lr == b.lr && a.dropout < b.dropout)))) {
      best = i;
    }
  }
  return best;
}

GridResult grid_search(const KnowledgeGraph& train_graph, std::span<const Triple> train_facts,
                       std::span<const Triple> valid_facts, const ModelConfig& model_config,
                       std::size_t base_relations, const TrainConfig& config,
                       const std::function<void(const GridCell&)>& on_cell) {
  config.validate();
  GridResult result;
  for (const double lr : config.lr_grid) {
    for (const double dropout : config.dropout_grid) {
      ModelConfig mc = model_config;
      mc.dropout = dropout;
      Model model(mc, base_relations, config.seed);
      TrainConfig tc = config;
      tc.lr = lr;
      GridCell cell{lr, dropout, fit(train_graph, train_facts, valid_facts, model, tc)};
      if (on_cell) on_cell(cell);
      result.cells.push_back(std::move(cell));
    }
  }
  result.best = select_best_cell(result.cells);
  return result;
}

}  // namespace report
