// SPDX-License-Identifier: Apache-2.0

#include "report/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace report {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects an unsigned integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, std::string(trim(item))));
  if (out.empty()) throw ConfigError("'" + key + "' expects a non-empty list");
  return out;
}

std::string num(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

}  // namespace

KeyValues parse_key_values(std::string_view text, std::string_view origin) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path.string());
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

KeyValues to_key_values(const ModelConfig& c) {
  return {{"d_model", std::to_string(c.d_model)},
          {"d_ffn", std::to_string(c.d_ffn)},
          {"heads", std::to_string(c.heads)},
          {"path_layers", std::to_string(c.path_layers)},
          {"context_layers", std::to_string(c.context_layers)},
          {"fusion_layers", std::to_string(c.fusion_layers)},
          {"max_path_len", std::to_string(c.max_path_len)},
          {"path_cap", std::to_string(c.path_cap)},
          {"context_cap", std::to_string(c.context_cap)},
          {"dropout", num(c.dropout)},
          {"ablation", to_string(c.ablation)}};
}

KeyValues to_key_values(const TrainConfig& c) {
  return {{"epochs", std::to_string(c.epochs)},
          {"batch_size", std::to_string(c.batch_size)},
          {"lr", num(c.lr)},
          {"lr_grid", list(c.lr_grid)},
          {"dropout_grid", list(c.dropout_grid)},
          {"patience", std::to_string(c.patience)},
          {"seed", std::to_string(c.seed)},
          {"negatives_per_positive", std::to_string(c.negatives_per_positive)},
          {"validation_negatives", std::to_string(c.validation_negatives)}};
}

bool apply_key(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "d_model") c.d_model = to_size(key, value);
  else if (key == "d_ffn") c.d_ffn = to_size(key, value);
  else if (key == "heads") c.heads = to_size(key, value);
  else if (key == "path_layers") c.path_layers = to_size(key, value);
  else if (key == "context_layers") c.context_layers = to_size(key, value);
  else if (key == "fusion_layers") c.fusion_layers = to_size(key, value);
  else if (key == "max_path_len") c.max_path_len = to_size(key, value);
  else if (key == "path_cap") c.path_cap = to_size(key, value);
  else if (key == "context_cap") c.context_cap = to_size(key, value);
  else if (key == "dropout") c.dropout = to_double(key, value);
  else if (key == "ablation") {
    try {
      c.ablation = parse_ablation(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    return false;
  }
  return true;
}

bool apply_key(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "epochs") c.epochs = to_size(key, value);
  else if (key == "batch_size") c.batch_size = to_size(key, value);
  else if (key == "lr") c.lr = to_double(key, value);
  else if (key == "lr_grid") c.lr_grid = to_list(key, value);
  else if (key == "dropout_grid") c.dropout_grid = to_list(key, value);
  else if (key == "patience") c.patience = to_size(key, value);
  else if (key == "seed") c.seed = to_u64(key, value);
  else if (key == "negatives_per_positive") c.negatives_per_positive = to_size(key, value);
  else if (key == "validation_negatives") c.validation_negatives = to_size(key, value);
  else return false;
  return true;
}

}  // namespace report
