// SPDX-License-Identifier: Apache-2.0
//
// Per-element contributions read from the fusion stack's last attention
// layer: the query-relation token's weights, averaged over heads, with the
// self weight dropped and the rest renormalized to sum to 1.

#ifndef REPORT_EXPLAIN_HPP
#define REPORT_EXPLAIN_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "report/extract.hpp"
#include "report/kg.hpp"
#include "report/model.hpp"

namespace report {

class UnsupportedModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ElementKind { query_relation, head_context, tail_context, path };

struct ContributionEntry {
  ElementKind kind = ElementKind::path;
  /// Context relations or path relation sequence; the query relation for
  /// kind == query_relation.
  std::vector<RelationId> relations;
  double contribution = 0.0;
};

struct ContributionReport {
  Triple query;
  double score = 0.0;
  std::vector<ContributionEntry> entries;  // descending contribution
  /// Head-averaged weights of the query token over every fusion position,
  /// self weight included, before renormalization.
  std::vector<double> raw_weights;
};

ContributionReport contributions(const Model& model, const ModelInput& input,
                                 const Triple& query);

/// One line per element, highest first; `top_k` == 0 prints all.
std::string render_report(const ContributionReport& report, const RelationVocab& vocab,
                          std::size_t top_k = 0);

/// Tab-separated `kind  contribution  relations` records, one per element.
std::string report_records(const ContributionReport& report, const RelationVocab& vocab);

}  // namespace report

#endif  // REPORT_EXPLAIN_HPP
