// SPDX-License-Identifier: Apache-2.0
//
// `key = value` text configuration for model and training settings. Lines
// starting with '#' are comments. List values are comma-separated.

#ifndef REPORT_CONFIG_HPP
#define REPORT_CONFIG_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "report/model.hpp"
#include "report/train.hpp"

namespace report {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text, std::string_view origin = "<config>");
KeyValues read_config_file(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

KeyValues to_key_values(const ModelConfig& c);
KeyValues to_key_values(const TrainConfig& c);

/// Return false if `key` is not a field of the config; throw ConfigError on a
/// malformed value.
bool apply_key(ModelConfig& c, const std::string& key, const std::string& value);
bool apply_key(TrainConfig& c, const std::string& key, const std::string& value);

}  // namespace report

#endif  // REPORT_CONFIG_HPP
