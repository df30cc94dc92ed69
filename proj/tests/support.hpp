// SPDX-License-Identifier: Apache-2.0
// Small graph builders shared by the test binaries.

#ifndef REPORT_TESTS_SUPPORT_HPP
#define REPORT_TESTS_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "report/kg.hpp"

namespace report::testing {

// Named triples over a vocabulary built from their relation names.
struct Fixture {
  RelationVocab vocab;
  EntityIndex entities;
  std::vector<Triple> facts;
  KnowledgeGraph graph;

  explicit Fixture(const std::vector<NamedTriple>& named, std::vector<std::string> extra = {}) {
    for (const auto& t : named) extra.push_back(t.relation);
    vocab = build_vocab(extra);
    for (const auto& t : named) facts.push_back(triple(t.head, t.relation, t.tail));
    graph = augment_inverse(facts, vocab, entities.size());
  }

  EntityId e(const std::string& name) { return entities.intern(name); }
  RelationId r(const std::string& name) const { return vocab.id(name); }
  RelationId inv(const std::string& name) const { return vocab.inverse_of(vocab.id(name)); }
  Triple triple(const std::string& h, const std::string& rel, const std::string& t) {
    return {e(h), r(rel), e(t)};
  }
};

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("report_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace report::testing

#endif  // REPORT_TESTS_SUPPORT_HPP
