// SPDX-License-Identifier: Apache-2.0

#include "report/explain.hpp"

#include <algorithm>
#include <cstdio>

namespace report {

ContributionReport contributions(const Model& model, const ModelInput& input,
                                 const Triple& query) {
  if (model.config().ablation != Ablation::full) {
    throw UnsupportedModeError("explanations need the full model, not " +
                               to_string(model.config().ablation));
  }
  numerics::Tape<float> tape;
  const auto fwd = model.forward_frozen(tape, {&input, 1});
  const auto& record = tape.attention_record(fwd.fusion_attention);
  const std::size_t n = fwd.fusion_segments.front().length;

  ContributionReport report;
  report.query = query;
  report.score = static_cast<double>(tape.value(fwd.scores).data[0]);
  report.raw_weights.assign(n, 0.0);
  for (std::size_t h = 0; h < record.heads; ++h) {
    const auto w = record.weights(0, h);
    for (std::size_t j = 0; j < n; ++j) report.raw_weights[j] += static_cast<double>(w[j]);
  }
  for (double& w : report.raw_weights) w /= static_cast<double>(record.heads);

  double rest = 0.0;
  for (std::size_t j = 1; j < n; ++j) rest += report.raw_weights[j];
  for (std::size_t j = 1; j < n; ++j) {
    ContributionEntry e;
    if (j == 1) {
      e.kind = ElementKind::head_context;
      e.relations = input.head_context.relations;
    } else if (j == 2) {
      e.kind = ElementKind::tail_context;
      e.relations = input.tail_context.relations;
    } else {
      e.kind = ElementKind::path;
      e.relations = input.paths.paths[j - 3];
    }
    e.contribution = rest > 0.0 ? report.raw_weights[j] / rest : 1.0 / static_cast<double>(n - 1);
    report.entries.push_back(std::move(e));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const ContributionEntry& a, const ContributionEntry& b) {
                     return a.contribution > b.contribution;
                   });
  return report;
}

namespace {

std::string join(const std::vector<RelationId>& rels, const RelationVocab& vocab) {
  std::string s;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    if (i) s += ", ";
    s += vocab.display_name(rels[i]);
  }
  return s;
}

std::string describe(const ContributionEntry& e, const RelationVocab& vocab) {
  switch (e.kind) {
    case ElementKind::query_relation: return "query:" + join(e.relations, vocab);
    case ElementKind::head_context: return "head:{" + join(e.relations, vocab) + "}";
    case ElementKind::tail_context: return "tail:{" + join(e.relations, vocab) + "}";
    case ElementKind::path: return "[" + join(e.relations, vocab) + "]";
  }
  return {};
}

const char* kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::query_relation: return "query";
    case ElementKind::head_context: return "head_context";
    case ElementKind::tail_context: return "tail_context";
    case ElementKind::path: return "path";
  }
  return "?";
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_report(const ContributionReport& report, const RelationVocab& vocab,
                          std::size_t top_k) {
  if (report.entries.empty()) return "no evidence elements\n";
  const std::size_t n = top_k == 0 ? report.entries.size() : std::min(top_k, report.entries.size());
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    out += fixed3(report.entries[i].contribution) + "  " + describe(report.entries[i], vocab) + "\n";
  }
  return out;
}

std::string report_records(const ContributionReport& report, const RelationVocab& vocab) {
  std::string out;
  for (const auto& e : report.entries) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", e.contribution);
    out += std::string(kind_name(e.kind)) + "\t" + buf + "\t" + join(e.relations, vocab) + "\n";
  }
  return out;
}

}  // namespace report
