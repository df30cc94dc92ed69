// SPDX-License-Identifier: Apache-2.0
//
// Hierarchical Transformer scorer for query facts.
//
// Three encoder stacks share one relation-embedding table:
//   * the path stack encodes each relational path as [PCLS] r1 .. rk with
//     learned positional embeddings added, keeping the [PCLS] output;
//   * the context stack encodes each endpoint's relation set behind [HCLS]
//     or [TCLS], without positions;
//   * the fusion stack attends over [query relation, c(h), c(t), p1 .. pn],
//     without positions, and its query-token output feeds the prediction
//     head sigmoid(W2 gelu(W1 x + b1) + b2).
//
// A batch of inputs is packed into one matrix per stack; see tape.hpp.

#ifndef REPORT_MODEL_HPP
#define REPORT_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "report/extract.hpp"
#include "report/numerics/tape.hpp"

namespace report {

enum class Ablation { full, no_context, no_path };

std::string to_string(Ablation a);
Ablation parse_ablation(std::string_view s);

struct ModelConfig {
  std::size_t d_model = 64;
  std::size_t d_ffn = 128;
  std::size_t heads = 4;
  std::size_t path_layers = 2;
  std::size_t context_layers = 2;
  std::size_t fusion_layers = 2;
  std::size_t max_path_len = 4;
  std::size_t path_cap = 300;
  std::size_t context_cap = 64;
  double dropout = 0.1;
  Ablation ablation = Ablation::full;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  ExtractConfig extract_config() const { return {max_path_len, path_cap, context_cap}; }
};

enum class ContextRole { head, tail };

/// Shapes and positions needed to read per-example fusion attention back out
/// of a batched forward pass.
template <class T>
struct ForwardResult {
  numerics::Var scores;  // [batch x 1]
  numerics::Var fusion_attention;  // last fusion layer's attention node
  std::vector<numerics::Segment> fusion_segments;  // one per input
  bool has_context = true;
  bool has_paths = true;
};

template <class T>
class TransformerLayer {
 public:
  TransformerLayer(numerics::ParameterStore<T>& store, const std::string& prefix,
                   std::size_t d_model, std::size_t d_ffn, std::size_t heads);

  template <class Bind>
  numerics::Var forward(numerics::Tape<T>& tape, const Bind& bind, numerics::Var x,
                        std::span<const numerics::Segment> segments, double dropout,
                        bool training, Rng* rng, numerics::Var* attention_out) const;

  /// Same layer with its parameters bound as differentiable leaves.
  numerics::Var forward(numerics::Tape<T>& tape, numerics::Var x,
                        std::span<const numerics::Segment> segments, double dropout = 0.0,
                        bool training = false, Rng* rng = nullptr);

 private:
  std::size_t heads_;
  numerics::Parameter<T>* wq_;
  numerics::Parameter<T>* bq_;
  numerics::Parameter<T>* wk_;
  numerics::Parameter<T>* bk_;
  numerics::Parameter<T>* wv_;
  numerics::Parameter<T>* bv_;
  numerics::Parameter<T>* wo_;
  numerics::Parameter<T>* bo_;
  numerics::Parameter<T>* ln1_gamma_;
  numerics::Parameter<T>* ln1_beta_;
  numerics::Parameter<T>* ffn_w1_;
  numerics::Parameter<T>* ffn_b1_;
  numerics::Parameter<T>* ffn_w2_;
  numerics::Parameter<T>* ffn_b2_;
  numerics::Parameter<T>* ln2_gamma_;
  numerics::Parameter<T>* ln2_beta_;
};

template <class T>
class ReportModel {
 public:
  /// `base_relations` is RelationVocab::base_count(); the embedding table has
  /// 2 * base_relations + 3 rows. Parameters are initialized from `seed`.
  ReportModel(const ModelConfig& config, std::size_t base_relations, std::uint64_t seed);

  ReportModel(const ReportModel&) = delete;
  ReportModel& operator=(const ReportModel&) = delete;
  ReportModel(ReportModel&&) noexcept = default;
  ReportModel& operator=(ReportModel&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  std::size_t base_relations() const { return base_relations_; }
  numerics::ParameterStore<T>& params() { return *params_; }
  const numerics::ParameterStore<T>& params() const { return *params_; }
  void set_ablation(Ablation a) { config_.ablation = a; }
  void set_dropout(double p) { config_.dropout = p; }

  /// Records the batched forward pass on `tape`. With `trainable` the
  /// parameters are bound as differentiable leaves (backward() fills their
  /// gradients); otherwise they enter the tape as constants.
  ForwardResult<T> forward(numerics::Tape<T>& tape, std::span<const ModelInput> batch,
                           bool training, Rng* rng, bool trainable = true);
  ForwardResult<T> forward_frozen(numerics::Tape<T>& tape,
                                  std::span<const ModelInput> batch) const;

  /// Inference-mode scores in (0, 1).
  std::vector<double> score(std::span<const ModelInput> batch) const;
  double score(const ModelInput& input) const;

  std::vector<T> encode_path(const RelationalPath& path) const;
  std::vector<T> encode_context(const RelationalContext& ctx, ContextRole role) const;
  /// Fusion-stack output at the query-relation position.
  std::vector<T> fuse(RelationId query_relation, std::span<const T> head_context,
                      std::span<const T> tail_context,
                      std::span<const std::vector<T>> path_vectors, Ablation ablation) const;
  double predict(std::span<const T> fused) const;

  /// Copy with parameters converted to another precision.
  template <class U>
  ReportModel<U> converted() const {
    ReportModel<U> out(config_, base_relations_, 0);
    for (std::size_t i = 0; i < params_->size(); ++i) {
      out.params()[i].value = (*params_)[i].value.template cast<U>();
    }
    return out;
  }

 private:
  struct Binder;
  ForwardResult<T> run(numerics::Tape<T>& tape, const Binder& bind,
                       std::span<const ModelInput> batch, bool training, Rng* rng) const;
  void check_relation(RelationId r) const;
  std::uint32_t pcls() const { return static_cast<std::uint32_t>(2 * base_relations_); }
  std::uint32_t hcls() const { return pcls() + 1; }
  std::uint32_t tcls() const { return pcls() + 2; }

  ModelConfig config_;
  std::size_t base_relations_;
  std::unique_ptr<numerics::ParameterStore<T>> params_;
  numerics::Parameter<T>* relation_embedding_;
  numerics::Parameter<T>* position_embedding_;
  std::vector<TransformerLayer<T>> path_stack_;
  std::vector<TransformerLayer<T>> context_stack_;
  std::vector<TransformerLayer<T>> fusion_stack_;
  numerics::Parameter<T>* head_w1_;
  numerics::Parameter<T>* head_b1_;
  numerics::Parameter<T>* head_w2_;
  numerics::Parameter<T>* head_b2_;
};

extern template class ReportModel<float>;
extern template class ReportModel<double>;

using Model = ReportModel<float>;

}  // namespace report

#endif  // REPORT_MODEL_HPP
