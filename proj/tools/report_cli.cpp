// SPDX-License-Identifier: Apache-2.0
//
// report: command-line driver.
//
//   report prepare  --data DIR
//   report extract  --data DIR [--split test] [--limit N]
//   report train    --train-dir DIR --out DIR
//   report evaluate --checkpoint FILE --inference-dir DIR
//   report explain  --checkpoint FILE --graph-dir DIR --head H --relation R --tail T
//   report sweep    --train-dir DIR --out DIR
//   report synth    --out DIR
//
// Settings resolve as defaults < --config file < flags. Every command writes
// resolved_config.txt into its output directory.
//
// Exit codes: 0 ok, 2 configuration error, 3 data error, 4 runtime error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "report/checkpoint.hpp"
#include "report/config.hpp"
#include "report/eval.hpp"
#include "report/explain.hpp"
#include "report/extract.hpp"
#include "report/kg.hpp"
#include "report/synthetic.hpp"
#include "report/train.hpp"

namespace fs = std::filesystem;
using namespace report;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Settings shared by all commands.
struct Run {
  std::string config_file;
  std::map<std::string, std::string> flags;  // key -> value, only if given
  std::string out = "out";
  std::size_t workers = 1;

  ModelConfig model;
  TrainConfig train;
  KeyValues extra;  // paths and command-specific settings for the snapshot
};

void add_setting_flags(CLI::App* cmd, Run& run) {
  cmd->add_option("--config", run.config_file, "key = value settings file");
  cmd->add_option("--out", run.out, "output directory");
  cmd->add_option("--workers", run.workers, "worker cap (runs single-threaded)")
      ->check(CLI::PositiveNumber);
  for (const auto& kv : to_key_values(ModelConfig{})) {
    cmd->add_option_function<std::string>(
        "--" + kv.first, [&run, key = kv.first](const std::string& v) { run.flags[key] = v; },
        "model setting (default " + kv.second + ")");
  }
  for (const auto& kv : to_key_values(TrainConfig{})) {
    cmd->add_option_function<std::string>(
        "--" + kv.first, [&run, key = kv.first](const std::string& v) { run.flags[key] = v; },
        "training setting (default " + kv.second + ")");
  }
}

void apply(Run& run, const std::string& key, const std::string& value) {
  if (!apply_key(run.model, key, value) && !apply_key(run.train, key, value)) {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

void resolve(Run& run) {
  if (!run.config_file.empty()) {
    for (const auto& [k, v] : read_config_file(run.config_file)) apply(run, k, v);
  }
  for (const auto& [k, v] : run.flags) apply(run, k, v);
  try {
    run.model.validate();
    run.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_snapshot(const Run& run, const std::string& command) {
  KeyValues kv{{"command", command}, {"workers", std::to_string(run.workers)}};
  kv.insert(kv.end(), run.extra.begin(), run.extra.end());
  const auto m = to_key_values(run.model);
  const auto t = to_key_values(run.train);
  kv.insert(kv.end(), m.begin(), m.end());
  kv.insert(kv.end(), t.begin(), t.end());
  write_text(fs::path(run.out) / "resolved_config.txt", format_key_values(kv));
}

void require_dir(const std::string& dir, const char* what) {
  if (dir.empty()) throw ConfigError(std::string(what) + " is required");
  if (!fs::is_directory(dir)) throw DataError(std::string(what) + " not found: " + dir);
  if (!fs::exists(fs::path(dir) / "train.txt")) throw DataError("missing " + dir + "/train.txt");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string metrics_line(const std::string& label, const Metrics& m, bool counts = true) {
  std::string s = label + " mrr=" + fmt(m.mrr) + " hits1=" + fmt(m.hits1) +
                  " hits3=" + fmt(m.hits3) + " hits10=" + fmt(m.hits10);
  if (counts) s += " queries=" + std::to_string(m.n_queries);
  return s;
}

std::string path_text(const RelationalPath& p, const RelationVocab& vocab) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + vocab.display_name(p[i]);
  return s + "]";
}

std::string context_text(const RelationalContext& c, const RelationVocab& vocab) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.relations.size(); ++i) {
    s += (i ? ", " : "") + vocab.display_name(c.relations[i]);
  }
  return s + "}";
}

std::vector<Triple> only_relation(std::span<const Triple> facts, std::optional<RelationId> r) {
  std::vector<Triple> out;
  for (const auto& t : facts) {
    if (!r || t.relation == *r) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
  std::string data;
  std::size_t sample = 200;
};

int cmd_prepare(Run& run, const PrepareArgs& a) {
  require_dir(a.data, "--data");
  resolve(run);
  run.extra = {{"data", a.data}, {"sample", std::to_string(a.sample)}};
  const auto vocab = build_vocab(collect_relation_names(a.data));
  const auto splits = load_splits(a.data, vocab);
  if (splits.train.empty()) throw DataError(a.data + "/train.txt holds no facts");
  const auto graph = augment_inverse(splits.train, vocab, splits.entities.size());

  std::map<std::size_t, std::size_t> histogram;
  const auto ecfg = run.model.extract_config();
  const std::size_t n = std::min(a.sample, splits.train.size());
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(run.train.seed, "prepare.extract", i);
    histogram[extract_example(graph, splits.train[i], ecfg, rng).paths.paths.size()]++;
  }

  std::ostringstream os;
  os << "entities=" << splits.entities.size() << "\n"
     << "relations=" << vocab.base_count() << "\n"
     << "train_facts=" << splits.train.size() << "\n"
     << "valid_facts=" << splits.valid.size() << "\n"
     << "test_facts=" << splits.test.size() << "\n"
     << "duplicates_dropped=" << splits.duplicates_dropped << "\n"
     << "augmented_edges=" << graph.edge_count() << "\n"
     << "seed=" << run.train.seed << "\n";
  for (const auto& [paths, count] : histogram) {
    os << "path_count " << paths << " " << count << "\n";
  }
  std::cout << os.str();
  std::string names;
  for (const auto& name : vocab.base_names()) names += name + "\n";
  write_text(fs::path(run.out) / "vocab.txt", names);
  write_text(fs::path(run.out) / "stats.txt", os.str());
  write_snapshot(run, "prepare");
  return 0;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string data;
  std::string split = "test";
  std::size_t limit = 0;
};

int cmd_extract(Run& run, const ExtractArgs& a) {
  require_dir(a.data, "--data");
  resolve(run);
  run.extra = {{"data", a.data}, {"split", a.split}, {"limit", std::to_string(a.limit)}};
  const auto vocab = build_vocab(collect_relation_names(a.data));
  const auto splits = load_splits(a.data, vocab);
  const auto graph = augment_inverse(splits.train, vocab, splits.entities.size());
  const std::vector<Triple>* facts = nullptr;
  if (a.split == "train") facts = &splits.train;
  else if (a.split == "valid") facts = &splits.valid;
  else if (a.split == "test") facts = &splits.test;
  else throw ConfigError("--split must be train, valid or test");

  const auto ecfg = run.model.extract_config();
  std::ostringstream os;
  const std::size_t n = a.limit == 0 ? facts->size() : std::min(a.limit, facts->size());
  for (std::size_t i = 0; i < n; ++i) {
    const Triple& q = (*facts)[i];
    Rng rng = make_rng(run.train.seed, "eval.extract");
    const auto in = extract_example(graph, q, ecfg, rng);
    os << "query=" << splits.entities.name(q.head) << "," << vocab.display_name(q.relation) << ","
       << splits.entities.name(q.tail) << "\thead_context=" << context_text(in.head_context, vocab)
       << "\ttail_context=" << context_text(in.tail_context, vocab) << "\tpaths=";
    for (std::size_t p = 0; p < in.paths.paths.size(); ++p) {
      os << (p ? ";" : "") << path_text(in.paths.paths[p], vocab);
    }
    os << "\ttruncated=" << (in.paths.truncated ? 1 : 0) << "\n";
  }
  std::cout << os.str();
  write_text(fs::path(run.out) / ("extract_" + a.split + ".txt"), os.str());
  write_snapshot(run, "extract");
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string train_dir;
  std::string target;
};

struct TrainData {
  RelationVocab vocab;
  GraphSplits splits;
  KnowledgeGraph graph;
  std::vector<Triple> positives;
  std::vector<Triple> valid;
};

TrainData load_training(const TrainArgs& a) {
  require_dir(a.train_dir, "--train-dir");
  TrainData d;
  d.vocab = build_vocab(collect_relation_names(a.train_dir));
  d.splits = load_splits(a.train_dir, d.vocab);
  if (d.splits.train.empty()) throw DataError(a.train_dir + "/train.txt holds no facts");
  d.graph = augment_inverse(d.splits.train, d.vocab, d.splits.entities.size());
  std::optional<RelationId> target;
  if (!a.target.empty()) target = d.vocab.id(a.target);
  d.positives = only_relation(d.splits.train, target);
  d.valid = only_relation(d.splits.valid, target);
  if (d.positives.empty()) throw DataError("no training facts for the target relation");
  return d;
}

int cmd_train(Run& run, const TrainArgs& a) {
  resolve(run);
  run.extra = {{"train_dir", a.train_dir}, {"target_relation", a.target}};
  const auto data = load_training(a);
  write_snapshot(run, "train");

  const fs::path out(run.out);
  Model model(run.model, data.vocab.base_count(), run.train.seed);
  std::ofstream log(out / "train_log.txt");
  FitOptions opts;
  opts.checkpoint = out / "model.ckpt";
  opts.vocab = &data.vocab;
  opts.on_epoch = [&](const EpochRecord& r) {
    const std::string line = "epoch=" + std::to_string(r.epoch) + " loss=" + fmt(r.train_loss) +
                             " examples=" + std::to_string(r.train_examples) +
                             " valid_hits10=" + fmt(r.valid_hits10) + " valid_mrr=" +
                             fmt(r.valid_mrr) + " improved=" + (r.improved ? "1" : "0") +
                             " seconds=" + fmt(r.seconds) + " seed=" +
                             std::to_string(run.train.seed);
    log << line << "\n" << std::flush;
    std::cout << line << "\n" << std::flush;
  };
  const auto report = fit(data.graph, data.positives, data.valid, model, run.train, opts);
  const std::string summary =
      "best_epoch=" + std::to_string(report.best_epoch) + " best_valid_hits10=" +
      fmt(report.best_hits10) + " best_valid_mrr=" + fmt(report.best_mrr) +
      " epochs_run=" + std::to_string(report.epochs.size()) +
      " stopped_early=" + (report.stopped_early ? "1" : "0") +
      " ablation=" + to_string(run.model.ablation) + " seed=" + std::to_string(run.train.seed) +
      "\n";
  std::cout << summary;
  write_text(out / "train_summary.txt", summary);
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string checkpoint;
  std::string inference_dir;
  std::string stub;
  std::string target;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t negatives = 50;
  bool dump_ranks = false;
};

int cmd_evaluate(Run& run, const EvaluateArgs& a) {
  require_dir(a.inference_dir, "--inference-dir");
  if (a.stub.empty() && a.checkpoint.empty()) {
    throw ConfigError("--checkpoint is required unless --stub is given");
  }
  if (!a.stub.empty() && a.stub != "oracle" && a.stub != "constant") {
    throw ConfigError("--stub must be oracle or constant");
  }
  resolve(run);
  std::string seeds;
  for (auto s : a.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  run.extra = {{"checkpoint", a.checkpoint}, {"inference_dir", a.inference_dir},
               {"stub", a.stub}, {"target_relation", a.target},
               {"eval_seeds", seeds}, {"negatives", std::to_string(a.negatives)}};

  std::optional<LoadedCheckpoint> ckpt;
  RelationVocab vocab;
  if (a.stub.empty()) {
    ckpt.emplace(load_checkpoint(a.checkpoint));
    run.model = ckpt->model.config();
    vocab = ckpt->vocab;
    vocab = build_vocab(collect_relation_names(a.inference_dir), &vocab);
  } else {
    vocab = build_vocab(collect_relation_names(a.inference_dir));
  }
  write_snapshot(run, "evaluate");

  const auto splits = load_splits(a.inference_dir, vocab);
  if (splits.test.empty()) throw DataError(a.inference_dir + "/test.txt holds no facts");
  const auto graph = augment_inverse(splits.train, vocab, splits.entities.size());
  FactSet known(splits.train);
  known.insert(splits.test);
  std::optional<RelationId> target;
  if (!a.target.empty()) target = vocab.id(a.target);
  const auto queries = only_relation(splits.test, target);

  CandidateScorer scorer;
  if (a.stub == "constant") {
    scorer = [](std::span<const Triple> c) { return std::vector<double>(c.size(), 0.5); };
  } else if (a.stub == "oracle") {
    const FactSet truth(splits.test);
    scorer = [truth](std::span<const Triple> c) {
      std::vector<double> s;
      for (const auto& t : c) s.push_back(truth.contains(t) ? 1.0 : 0.0);
      return s;
    };
  } else {
    scorer = model_scorer(ckpt->model, graph, run.train.seed);
  }

  EvalConfig cfg;
  cfg.negatives = a.negatives;
  cfg.seeds = a.seeds;
  cfg.keep_rankings = a.dump_ranks;
  const auto report = evaluate(scorer, known, splits.entities.size(), queries, cfg);

  std::string text;
  for (const auto& m : report.per_seed) text += metrics_line("seed=" + std::to_string(m.seed), m) + "\n";
  text += metrics_line("mean", report.mean) + "\n";
  text += metrics_line("stddev", report.stddev, false) + "\n";
  text += "shortfall_queries=" + std::to_string(report.shortfall_queries) + "\n";
  std::cout << text;
  const fs::path out(run.out);
  write_text(out / "metrics.txt", text);
  if (a.dump_ranks) {
    std::string ranks;
    for (std::size_t s = 0; s < report.rankings.size(); ++s) {
      for (const auto& r : report.rankings[s]) {
        ranks += "seed=" + std::to_string(a.seeds[s]) + "\thead=" + splits.entities.name(r.query.head) +
                 "\trelation=" + vocab.display_name(r.query.relation) +
                 "\ttail=" + splits.entities.name(r.query.tail) + "\trank=" + fmt(r.rank) +
                 "\tcandidates=" + std::to_string(r.candidates) + "\n";
      }
    }
    write_text(out / "ranks.txt", ranks);
  }
  return 0;
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string checkpoint;
  std::string graph_dir;
  std::string head, relation, tail;
  std::size_t top_k = 0;
  bool records = false;
};

int cmd_explain(Run& run, const ExplainArgs& a) {
  require_dir(a.graph_dir, "--graph-dir");
  resolve(run);
  run.extra = {{"checkpoint", a.checkpoint}, {"graph_dir", a.graph_dir}, {"head", a.head},
               {"relation", a.relation}, {"tail", a.tail}};
  auto ckpt = load_checkpoint(a.checkpoint);
  run.model = ckpt.model.config();
  const auto vocab = build_vocab(collect_relation_names(a.graph_dir), &ckpt.vocab);
  write_snapshot(run, "explain");

  const auto splits = load_splits(a.graph_dir, vocab);
  const auto graph = augment_inverse(splits.train, vocab, splits.entities.size());
  const auto h = splits.entities.find(a.head);
  const auto t = splits.entities.find(a.tail);
  if (!h) throw DataError("unknown entity '" + a.head + "'");
  if (!t) throw DataError("unknown entity '" + a.tail + "'");
  const Triple q{*h, vocab.id(a.relation), *t};

  Rng rng = make_rng(run.train.seed, "eval.extract");
  const auto input = extract_example(graph, q, run.model.extract_config(), rng);
  const auto report = contributions(ckpt.model, input, q);
  std::string text = "query=" + a.head + "," + a.relation + "," + a.tail +
                     " score=" + fmt(report.score) + "\n" + render_report(report, vocab, a.top_k);
  std::cout << text;
  write_text(fs::path(run.out) / "explanation.txt", text);
  if (a.records) write_text(fs::path(run.out) / "explanation_records.txt", report_records(report, vocab));
  return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(Run& run, const TrainArgs& a) {
  resolve(run);
  run.extra = {{"train_dir", a.train_dir}, {"target_relation", a.target}};
  const auto data = load_training(a);
  write_snapshot(run, "sweep");

  std::ofstream table(fs::path(run.out) / "sweep.txt");
  const auto row = [](const GridCell& c) {
    return "lr=" + fmt(c.lr) + " dropout=" + fmt(c.dropout) + " best_epoch=" +
           std::to_string(c.report.best_epoch) + " valid_hits10=" + fmt(c.report.best_hits10) +
           " valid_mrr=" + fmt(c.report.best_mrr);
  };
  const auto result = grid_search(data.graph, data.positives, data.valid, run.model,
                                  data.vocab.base_count(), run.train, [&](const GridCell& c) {
                                    std::cout << row(c) << "\n" << std::flush;
                                  });
  std::string text;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    text += row(result.cells[i]) + (i == result.best ? " best=1" : " best=0") + "\n";
  }
  table << text;
  const auto& best = result.cells[result.best];
  std::cout << "best " << row(best) << "\n";

  ModelConfig m = run.model;
  m.dropout = best.dropout;
  TrainConfig t = run.train;
  t.lr = best.lr;
  auto kv = to_key_values(m);
  const auto tk = to_key_values(t);
  kv.insert(kv.end(), tk.begin(), tk.end());
  write_text(fs::path(run.out) / "best_config.txt", format_key_values(kv));
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::uint64_t seed = 0;
  std::size_t train_entities = 200;
  std::size_t inference_entities = 100;
};

int cmd_synth(Run& run, const SynthArgs& a) {
  resolve(run);
  run.extra = {{"synth_seed", std::to_string(a.seed)},
               {"train_entities", std::to_string(a.train_entities)},
               {"inference_entities", std::to_string(a.inference_entities)}};
  PlantedConfig ca;
  ca.entities = a.train_entities;
  ca.prefix = "a";
  ca.seed = a.seed;
  ca.holdout = 0.15;
  PlantedConfig cb = ca;
  cb.entities = a.inference_entities;
  cb.prefix = "b";
  cb.holdout = 0.30;
  const auto ga = generate_planted(ca);
  const auto gb = generate_planted(cb);
  const fs::path out(run.out);
  write_split_files(out / "train_graph", ga.background, ga.held_out, {});
  write_split_files(out / "inference_graph", gb.background, {}, gb.held_out);
  write_snapshot(run, "synth");
  std::cout << "train_graph facts=" << ga.background.size() << " valid=" << ga.held_out.size()
            << "\ninference_graph facts=" << gb.background.size()
            << " test=" << gb.held_out.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inductive relation prediction over relational paths and contexts"};
  app.require_subcommand(1);

  Run run;
  PrepareArgs prepare;
  ExtractArgs extract;
  TrainArgs train;
  EvaluateArgs evaluate;
  ExplainArgs explain;
  TrainArgs sweep;
  SynthArgs synth;

  auto* c_prepare = app.add_subcommand("prepare", "build the vocabulary and report dataset stats");
  add_setting_flags(c_prepare, run);
  c_prepare->add_option("--data", prepare.data, "dataset directory")->required();
  c_prepare->add_option("--sample", prepare.sample, "facts sampled for the path histogram");

  auto* c_extract = app.add_subcommand("extract", "dump model inputs as text records");
  add_setting_flags(c_extract, run);
  c_extract->add_option("--data", extract.data, "dataset directory")->required();
  c_extract->add_option("--split", extract.split, "train, valid or test");
  c_extract->add_option("--limit", extract.limit, "maximum records (0 = all)");

  auto* c_train = app.add_subcommand("train", "train a model with early stopping");
  add_setting_flags(c_train, run);
  c_train->add_option("--train-dir", train.train_dir, "training graph directory")->required();
  c_train->add_option("--target-relation", train.target, "train on this relation only");

  auto* c_eval = app.add_subcommand("evaluate", "rank test facts against sampled negatives");
  add_setting_flags(c_eval, run);
  c_eval->add_option("--checkpoint", evaluate.checkpoint, "model checkpoint");
  c_eval->add_option("--inference-dir", evaluate.inference_dir, "inference graph directory")
      ->required();
  c_eval->add_option("--stub", evaluate.stub, "oracle or constant scorer instead of a model");
  c_eval->add_option("--target-relation", evaluate.target, "evaluate this relation only");
  c_eval->add_option("--eval-seeds", evaluate.seeds, "negative-sampling seeds")->delimiter(',');
  c_eval->add_option("--negatives", evaluate.negatives, "negatives per query");
  c_eval->add_flag("--dump-ranks", evaluate.dump_ranks, "write per-query ranks");

  auto* c_explain = app.add_subcommand("explain", "per-element contributions for one triple");
  add_setting_flags(c_explain, run);
  c_explain->add_option("--checkpoint", explain.checkpoint, "model checkpoint")->required();
  c_explain->add_option("--graph-dir", explain.graph_dir, "graph whose train.txt is the background")
      ->required();
  c_explain->add_option("--head", explain.head)->required();
  c_explain->add_option("--relation", explain.relation)->required();
  c_explain->add_option("--tail", explain.tail)->required();
  c_explain->add_option("--top-k", explain.top_k, "lines to print (0 = all)");
  c_explain->add_flag("--records", explain.records, "also write tab-separated records");

  auto* c_sweep = app.add_subcommand("sweep", "grid search over learning rate and dropout");
  add_setting_flags(c_sweep, run);
  c_sweep->add_option("--train-dir", sweep.train_dir, "training graph directory")->required();
  c_sweep->add_option("--target-relation", sweep.target, "train on this relation only");

  auto* c_synth = app.add_subcommand("synth", "write the planted-rule benchmark");
  add_setting_flags(c_synth, run);
  c_synth->add_option("--synth-seed", synth.seed, "generator seed");
  c_synth->add_option("--train-entities", synth.train_entities);
  c_synth->add_option("--inference-entities", synth.inference_entities);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (c_prepare->parsed()) return cmd_prepare(run, prepare);
    if (c_extract->parsed()) return cmd_extract(run, extract);
    if (c_train->parsed()) return cmd_train(run, train);
    if (c_eval->parsed()) return cmd_evaluate(run, evaluate);
    if (c_explain->parsed()) return cmd_explain(run, explain);
    if (c_sweep->parsed()) return cmd_sweep(run, sweep);
    if (c_synth->parsed()) return cmd_synth(run, synth);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const UnknownRelationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const CheckpointError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
