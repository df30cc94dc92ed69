// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint layout (all integers little-endian):
//
//   "REPORTCK"                      8-byte magic
//   u32 version                     currently 1
//   u32 n, n bytes                  model config as `key = value` text
//   u32 count, then count x (u32 n, n bytes)   base relation names by ID
//   u32 count, then count x record             parameters
//     record: u32 n, n bytes name; u32 rows; u32 cols; rows*cols f32 values

#ifndef REPORT_CHECKPOINT_HPP
#define REPORT_CHECKPOINT_HPP

#include <filesystem>
#include <stdexcept>

#include "report/kg.hpp"
#include "report/model.hpp"

namespace report {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[8] = {'R', 'E', 'P', 'O', 'R', 'T', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const RelationVocab& vocab);

struct LoadedCheckpoint {
  RelationVocab vocab;
  Model model;
};

/// Rebuilds the model from the stored config and checks every stored
/// parameter name and shape against it.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace report

#endif  // REPORT_CHECKPOINT_HPP
