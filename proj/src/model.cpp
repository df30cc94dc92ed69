// SPDX-License-Identifier: Apache-2.0

#include "report/model.hpp"

#include <cmath>
#include <stdexcept>

namespace report {

using numerics::Parameter;
using numerics::ParameterStore;
using numerics::RowRef;
using numerics::Segment;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_context: return "no_context";
    case Ablation::no_path: return "no_path";
  }
  return "full";
}

Ablation parse_ablation(std::string_view s) {
  if (s == "full") return Ablation::full;
  if (s == "no_context") return Ablation::no_context;
  if (s == "no_path") return Ablation::no_path;
  throw std::invalid_argument("unknown ablation mode '" + std::string(s) +
                              "' (expected full, no_context or no_path)");
}

void ModelConfig::validate() const {
  const auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (d_model == 0 || heads == 0 || d_model % heads != 0) {
    fail("d_model (" + std::to_string(d_model) + ") must be a positive multiple of heads (" +
         std::to_string(heads) + ")");
  }
  if (d_ffn == 0) fail("d_ffn must be positive");
  if (path_layers == 0 || context_layers == 0 || fusion_layers == 0) {
    fail("every stack needs at least one layer");
  }
  if (max_path_len == 0) fail("max_path_len must be at least 1");
  if (path_cap == 0 || context_cap == 0) fail("path_cap and context_cap must be at least 1");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
}

namespace {

template <class T>
void xavier_uniform(Tensor<T>& w, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
  for (auto& x : w.data) x = static_cast<T>((2.0 * uniform_real(rng) - 1.0) * a);
}

template <class T>
void normal_init(Tensor<T>& w, double stddev, Rng& rng) {
  constexpr double two_pi = 6.283185307179586;
  for (auto& x : w.data) {
    const double u1 = 1.0 - uniform_real(rng);
    const double u2 = uniform_real(rng);
    x = static_cast<T>(stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2));
  }
}

template <class T>
Parameter<T>* matrix(ParameterStore<T>& s, const std::string& name, std::size_t r, std::size_t c) {
  return &s.add(name, r, c);
}

template <class T>
Parameter<T>* ones(ParameterStore<T>& s, const std::string& name, std::size_t n) {
  auto& p = s.add(name, 1, n);
  p.value.fill(T(1));
  return &p;
}

}  // namespace

template <class T>
TransformerLayer<T>::TransformerLayer(ParameterStore<T>& s, const std::string& prefix,
                                      std::size_t d, std::size_t f, std::size_t heads)
    : heads_(heads),
      wq_(matrix(s, prefix + ".attn.wq", d, d)),
      bq_(matrix(s, prefix + ".attn.bq", 1, d)),
      wk_(matrix(s, prefix + ".attn.wk", d, d)),
      bk_(matrix(s, prefix + ".attn.bk", 1, d)),
      wv_(matrix(s, prefix + ".attn.wv", d, d)),
      bv_(matrix(s, prefix + ".attn.bv", 1, d)),
      wo_(matrix(s, prefix + ".attn.wo", d, d)),
      bo_(matrix(s, prefix + ".attn.bo", 1, d)),
      ln1_gamma_(ones(s, prefix + ".norm1.gamma", d)),
      ln1_beta_(matrix(s, prefix + ".norm1.beta", 1, d)),
      ffn_w1_(matrix(s, prefix + ".ffn.w1", d, f)),
      ffn_b1_(matrix(s, prefix + ".ffn.b1", 1, f)),
      ffn_w2_(matrix(s, prefix + ".ffn.w2", f, d)),
      ffn_b2_(matrix(s, prefix + ".ffn.b2", 1, d)),
      ln2_gamma_(ones(s, prefix + ".norm2.gamma", d)),
      ln2_beta_(matrix(s, prefix + ".norm2.beta", 1, d)) {}

template <class T>
template <class Bind>
Var TransformerLayer<T>::forward(Tape<T>& tape, const Bind& bind, Var x,
                                 std::span<const Segment> segments, double dropout,
                                 bool training, Rng* rng, Var* attention_out) const {
  const Var q = tape.linear(x, bind(*wq_), bind(*bq_));
  const Var k = tape.linear(x, bind(*wk_), bind(*bk_));
  const Var v = tape.linear(x, bind(*wv_), bind(*bv_));
  const Var att = tape.attention(q, k, v, segments, heads_);
  if (attention_out != nullptr) *attention_out = att;
  Var o = tape.linear(att, bind(*wo_), bind(*bo_));
  o = tape.dropout(o, dropout, training, rng);
  const Var x1 = tape.layer_norm(tape.add(x, o), bind(*ln1_gamma_), bind(*ln1_beta_));
  Var f = tape.gelu(tape.linear(x1, bind(*ffn_w1_), bind(*ffn_b1_)));
  f = tape.linear(f, bind(*ffn_w2_), bind(*ffn_b2_));
  f = tape.dropout(f, dropout, training, rng);
  return tape.layer_norm(tape.add(x1, f), bind(*ln2_gamma_), bind(*ln2_beta_));
}

template <class T>
Var TransformerLayer<T>::forward(Tape<T>& tape, Var x, std::span<const Segment> segments,
                                 double dropout, bool training, Rng* rng) {
  const auto bind = [&tape](Parameter<T>& p) { return tape.param(p); };
  return forward(tape, bind, x, segments, dropout, training, rng, nullptr);
}

template <class T>
struct ReportModel<T>::Binder {
  Tape<T>* tape;
  bool trainable;
  Var operator()(const Parameter<T>& p) const {
    // Only the non-const forward() sets trainable, so the parameter is
    // mutable from the caller's point of view.
    return trainable ? tape->param(const_cast<Parameter<T>&>(p)) : tape->constant(p.value);
  }
};

template <class T>
ReportModel<T>::ReportModel(const ModelConfig& config, std::size_t base_relations,
                            std::uint64_t seed)
    : config_(config),
      base_relations_(base_relations),
      params_(std::make_unique<ParameterStore<T>>()) {
  config_.validate();
  auto& s = *params_;
  const auto d = config_.d_model;
  const auto f = config_.d_ffn;
  relation_embedding_ = matrix(s, "embedding.relations", 2 * base_relations + 3, d);
  position_embedding_ = matrix(s, "embedding.positions", config_.max_path_len + 1, d);
  for (std::size_t l = 0; l < config_.path_layers; ++l) {
    path_stack_.emplace_back(s, "path.layer" + std::to_string(l), d, f, config_.heads);
  }
  for (std::size_t l = 0; l < config_.context_layers; ++l) {
    context_stack_.emplace_back(s, "context.layer" + std::to_string(l), d, f, config_.heads);
  }
  for (std::size_t l = 0; l < config_.fusion_layers; ++l) {
    fusion_stack_.emplace_back(s, "fusion.layer" + std::to_string(l), d, f, config_.heads);
  }
  head_w1_ = matrix(s, "head.w1", d, f);
  head_b1_ = matrix(s, "head.b1", 1, f);
  head_w2_ = matrix(s, "head.w2", f, 1);
  head_b2_ = matrix(s, "head.b2", 1, 1);

  Rng rng = make_rng(seed, "model.init");
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto& p = s[i];
    if (&p == relation_embedding_ || &p == position_embedding_) {
      normal_init(p.value, 0.02, rng);
    } else if (p.value.rows > 1) {
      xavier_uniform(p.value, rng);
    }
  }
}

template <class T>
void ReportModel<T>::check_relation(RelationId r) const {
  if (index_of(r) >= 2 * base_relations_) {
    throw UnknownRelationError("#" + std::to_string(index_of(r)));
  }
}

template <class T>
ForwardResult<T> ReportModel<T>::forward(Tape<T>& tape, std::span<const ModelInput> batch,
                                         bool training, Rng* rng, bool trainable) {
  return run(tape, Binder{&tape, trainable}, batch, training, rng);
}

template <class T>
ForwardResult<T> ReportModel<T>::forward_frozen(Tape<T>& tape,
                                                std::span<const ModelInput> batch) const {
  return run(tape, Binder{&tape, false}, batch, false, nullptr);
}

template <class T>
ForwardResult<T> ReportModel<T>::run(Tape<T>& tape, const Binder& bind,
                                     std::span<const ModelInput> batch, bool training,
                                     Rng* rng) const {
  if (batch.empty()) throw std::invalid_argument("forward: empty batch");
  ForwardResult<T> result;
  result.has_paths = config_.ablation != Ablation::no_path;
  result.has_context = config_.ablation != Ablation::no_context;
  const double p = config_.dropout;

  const Var table = bind(*relation_embedding_);

  // Path stack: one segment per path, [PCLS] r1 .. rk with positions 0 .. k.
  Var path_cls{};
  std::vector<std::size_t> first_path(batch.size() + 1, 0);
  if (result.has_paths) {
    std::vector<std::uint32_t> ids;
    std::vector<std::uint32_t> pos;
    std::vector<Segment> segs;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      for (const auto& path : batch[b].paths.paths) {
        if (path.empty() || path.size() > config_.max_path_len) {
          throw std::invalid_argument("path length " + std::to_string(path.size()) +
                                      " outside [1, " + std::to_string(config_.max_path_len) +
                                      "]");
        }
        segs.push_back({ids.size(), path.size() + 1});
        ids.push_back(pcls());
        pos.push_back(0);
        for (std::size_t j = 0; j < path.size(); ++j) {
          check_relation(path[j]);
          ids.push_back(index_of(path[j]));
          pos.push_back(static_cast<std::uint32_t>(j + 1));
        }
      }
      first_path[b + 1] = segs.size();
    }
    if (!segs.empty()) {
      Var x = tape.add(tape.embedding_lookup(table, ids),
                       tape.embedding_lookup(bind(*position_embedding_), pos));
      for (const auto& layer : path_stack_) x = layer.forward(tape, bind, x, segs, p, training, rng, nullptr);
      std::vector<RowRef> cls;
      cls.reserve(segs.size());
      for (const auto& s : segs) cls.push_back({x, s.offset});
      path_cls = tape.gather(cls);
    }
  }

  // Context stack: two segments per input, [HCLS] C(h) and [TCLS] C(t).
  Var context_cls{};
  if (result.has_context) {
    std::vector<std::uint32_t> ids;
    std::vector<Segment> segs;
    for (const auto& in : batch) {
      for (const auto* ctx : {&in.head_context, &in.tail_context}) {
        segs.push_back({ids.size(), ctx->relations.size() + 1});
        ids.push_back(ctx == &in.head_context ? hcls() : tcls());
        for (RelationId r : ctx->relations) {
          check_relation(r);
          ids.push_back(index_of(r));
        }
      }
    }
    Var x = tape.embedding_lookup(table, ids);
    for (const auto& layer : context_stack_) x = layer.forward(tape, bind, x, segs, p, training, rng, nullptr);
    std::vector<RowRef> cls;
    cls.reserve(segs.size());
    for (const auto& s : segs) cls.push_back({x, s.offset});
    context_cls = tape.gather(cls);
  }

  // Fusion stack: [r, c(h), c(t), p1 .. pn] per input, minus ablated parts.
  std::vector<RowRef> rows;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    check_relation(batch[b].query_relation);
    const std::size_t start = rows.size();
    rows.push_back({table, index_of(batch[b].query_relation)});
    if (result.has_context) {
      rows.push_back({context_cls, 2 * b});
      rows.push_back({context_cls, 2 * b + 1});
    }
    if (result.has_paths) {
      for (std::size_t i = first_path[b]; i < first_path[b + 1]; ++i) rows.push_back({path_cls, i});
    }
    result.fusion_segments.push_back({start, rows.size() - start});
  }
  Var h = tape.gather(rows);
  for (const auto& layer : fusion_stack_) {
    h = layer.forward(tape, bind, h, result.fusion_segments, p, training, rng,
                      &result.fusion_attention);
  }
  std::vector<RowRef> query_rows;
  query_rows.reserve(batch.size());
  for (const auto& s : result.fusion_segments) query_rows.push_back({h, s.offset});
  const Var fused = tape.gather(query_rows);

  const Var hidden = tape.gelu(tape.linear(fused, bind(*head_w1_), bind(*head_b1_)));
  result.scores = tape.sigmoid(tape.linear(hidden, bind(*head_w2_), bind(*head_b2_)));
  return result;
}

template <class T>
std::vector<double> ReportModel<T>::score(std::span<const ModelInput> batch) const {
  std::vector<double> out;
  out.reserve(batch.size());
  constexpr std::size_t chunk = 256;
  for (std::size_t i = 0; i < batch.size(); i += chunk) {
    Tape<T> tape;
    const auto part = batch.subspan(i, std::min(chunk, batch.size() - i));
    const auto r = forward_frozen(tape, part);
    for (T s : tape.value(r.scores).data) out.push_back(static_cast<double>(s));
  }
  return out;
}

template <class T>
double ReportModel<T>::score(const ModelInput& input) const {
  return score(std::span<const ModelInput>(&input, 1)).front();
}

template <class T>
std::vector<T> ReportModel<T>::encode_path(const RelationalPath& path) const {
  if (path.empty() || path.size() > config_.max_path_len) {
    throw std::invalid_argument("path length " + std::to_string(path.size()) + " outside [1, " +
                                std::to_string(config_.max_path_len) + "]");
  }
  Tape<T> tape;
  const Binder bind{&tape, false};
  std::vector<std::uint32_t> ids{pcls()};
  std::vector<std::uint32_t> pos{0};
  for (std::size_t j = 0; j < path.size(); ++j) {
    check_relation(path[j]);
    ids.push_back(index_of(path[j]));
    pos.push_back(static_cast<std::uint32_t>(j + 1));
  }
  const Segment seg{0, ids.size()};
  Var x = tape.add(tape.embedding_lookup(bind(*relation_embedding_), ids),
                   tape.embedding_lookup(bind(*position_embedding_), pos));
  for (const auto& layer : path_stack_) x = layer.forward(tape, bind, x, {&seg, 1}, 0.0, false, nullptr, nullptr);
  const auto r = tape.value(x).row(0);
  return {r.begin(), r.end()};
}

template <class T>
std::vector<T> ReportModel<T>::encode_context(const RelationalContext& ctx,
                                              ContextRole role) const {
  Tape<T> tape;
  const Binder bind{&tape, false};
  std::vector<std::uint32_t> ids{role == ContextRole::head ? hcls() : tcls()};
  for (RelationId r : ctx.relations) {
    check_relation(r);
    ids.push_back(index_of(r));
  }
  const Segment seg{0, ids.size()};
  Var x = tape.embedding_lookup(bind(*relation_embedding_), ids);
  for (const auto& layer : context_stack_) x = layer.forward(tape, bind, x, {&seg, 1}, 0.0, false, nullptr, nullptr);
  const auto r = tape.value(x).row(0);
  return {r.begin(), r.end()};
}

template <class T>
std::vector<T> ReportModel<T>::fuse(RelationId query_relation, std::span<const T> head_context,
                                    std::span<const T> tail_context,
                                    std::span<const std::vector<T>> path_vectors,
                                    Ablation ablation) const {
  check_relation(query_relation);
  const auto d = config_.d_model;
  std::vector<T> rows;
  const auto append = [&](std::span<const T> v) {
    if (v.size() != d) {
      throw numerics::DimensionError("fuse: vector of width " + std::to_string(v.size()) +
                                     ", expected " + std::to_string(d));
    }
    rows.insert(rows.end(), v.begin(), v.end());
  };
  append(relation_embedding_->value.row(index_of(query_relation)));
  if (ablation != Ablation::no_context) {
    append(head_context);
    append(tail_context);
  }
  if (ablation != Ablation::no_path) {
    for (const auto& p : path_vectors) append(p);
  }
  Tape<T> tape;
  const Binder bind{&tape, false};
  const std::size_t n = rows.size() / d;
  const Segment seg{0, n};
  Var x = tape.constant(Tensor<T>(n, d, std::move(rows)));
  for (const auto& layer : fusion_stack_) x = layer.forward(tape, bind, x, {&seg, 1}, 0.0, false, nullptr, nullptr);
  const auto r = tape.value(x).row(0);
  return {r.begin(), r.end()};
}

template <class T>
double ReportModel<T>::predict(std::span<const T> fused) const {
  if (fused.size() != config_.d_model) {
    throw numerics::DimensionError("predict: expected width " + std::to_string(config_.d_model));
  }
  Tape<T> tape;
  const Binder bind{&tape, false};
  const Var x = tape.constant(Tensor<T>(1, fused.size(), std::vector<T>(fused.begin(), fused.end())));
  const Var hidden = tape.gelu(tape.linear(x, bind(*head_w1_), bind(*head_b1_)));
  const Var s = tape.sigmoid(tape.linear(hidden, bind(*head_w2_), bind(*head_b2_)));
  return static_cast<double>(tape.value(s).data[0]);
}

template class TransformerLayer<float>;
template class TransformerLayer<double>;
template class ReportModel<float>;
template class ReportModel<double>;

}  // namespace report
