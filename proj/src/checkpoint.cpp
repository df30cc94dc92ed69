// SPDX-License-Identifier: Apache-2.0

#include "report/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>

#include "report/config.hpp"

namespace report {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  Reader(std::string data, std::string origin) : data_(std::move(data)), origin_(std::move(origin)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t{static_cast<unsigned char>(data_[pos_ + i])} << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string string() {
    const auto n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw CheckpointError(origin_ + ": " + what);
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated checkpoint");
  }

  std::string data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const RelationVocab& vocab) {
  if (vocab.base_count() != model.base_relations()) {
    throw CheckpointError("vocabulary has " + std::to_string(vocab.base_count()) +
                          " relations but the model was built for " +
                          std::to_string(model.base_relations()));
  }
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_string(out, format_key_values(to_key_values(model.config())));
  put_u32(out, static_cast<std::uint32_t>(vocab.base_count()));
  for (const auto& name : vocab.base_names()) put_string(out, name);

  const auto& params = model.params();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    put_string(out, p.name);
    put_u32(out, static_cast<std::uint32_t>(p.value.rows));
    put_u32(out, static_cast<std::uint32_t>(p.value.cols));
    for (float v : p.value.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot write checkpoint: " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw CheckpointError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(std::move(data), path.string());

  if (r.bytes(sizeof(kCheckpointMagic)) !=
      std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    r.fail("not a checkpoint (bad magic)");
  }
  if (const auto v = r.u32(); v != kCheckpointVersion) {
    r.fail("unsupported checkpoint version " + std::to_string(v));
  }

  ModelConfig config;
  for (const auto& [k, v] : parse_key_values(r.string(), path.string())) {
    if (!apply_key(config, k, v)) r.fail("unknown config key '" + k + "'");
  }

  std::vector<std::string> names(r.u32());
  for (auto& n : names) n = r.string();
  RelationVocab vocab;
  try {
    vocab = RelationVocab(names);
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }

  Model model(config, vocab.base_count(), 0);
  auto& params = model.params();
  const auto count = r.u32();
  if (count != params.size()) {
    r.fail("checkpoint holds " + std::to_string(count) + " parameters, model expects " +
           std::to_string(params.size()));
  }
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name = r.string();
    auto* p = params.find(name);
    if (p == nullptr) r.fail("unexpected parameter '" + name + "'");
    if (!seen.insert(name).second) r.fail("duplicate parameter '" + name + "'");
    const auto rows = r.u32();
    const auto cols = r.u32();
    if (rows != p->value.rows || cols != p->value.cols) {
      r.fail("parameter '" + name + "' has shape " + numerics::Tensor<float>::shape_of(rows, cols) +
             ", model expects " + p->value.shape());
    }
    for (auto& v : p->value.data) v = std::bit_cast<float>(r.u32());
  }
  if (!r.at_end()) r.fail("trailing bytes after parameter records");
  return {std::move(vocab), std::move(model)};
}

}  // namespace report
