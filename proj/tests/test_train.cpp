// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "report/checkpoint.hpp"
#include "report/synthetic.hpp"
#include "report/train.hpp"
#include "support.hpp"

using namespace report;

namespace {

ModelConfig tiny_model() {
  ModelConfig c;
  c.d_model = 16;
  c.d_ffn = 32;
  c.heads = 2;
  c.path_layers = 1;
  c.context_layers = 1;
  c.fusion_layers = 1;
  c.max_path_len = 3;
  c.dropout = 0.1;
  return c;
}

struct Small {
  PlantedBenchmark bench = make_planted_benchmark(3, 40, 20);
  KnowledgeGraph graph = augment_inverse(bench.train.train, bench.vocab,
                                         bench.train.entities.size());
  std::vector<Triple> positives;
  Small() {
    const auto rt = bench.vocab.id("rt");
    for (const auto& t : bench.train.train) {
      if (t.relation == rt) positives.push_back(t);
    }
  }
};

TrainConfig quick(std::size_t epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 16;
  t.lr = 1e-3;
  t.validation_negatives = 10;
  t.seed = 5;
  return t;
}

}  // namespace

TEST_CASE("binary cross-entropy") {
  CHECK(bce_loss(std::vector<double>{0.5}, std::vector<int>{1}) == doctest::Approx(std::log(2.0)));
  CHECK(bce_loss(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) ==
        doctest::Approx(0.2107).epsilon(1e-3));
  CHECK(std::isfinite(bce_loss(std::vector<double>{0.0, 1.0}, std::vector<int>{1, 0})));
  CHECK_THROWS_AS(bce_loss(std::vector<double>{0.5}, std::vector<int>{}), std::invalid_argument);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(1 + rng() % 20);
    std::vector<int> y(s.size());
    double want = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = u(rng);
      y[i] = static_cast<int>(rng() % 2);
      want += y[i] ? -std::log(s[i]) : -std::log(1.0 - s[i]);
    }
    CHECK(std::abs(bce_loss(s, y) - want) < 1e-6);

    // The differentiable version agrees.
    numerics::Tape<double> tape;
    numerics::Tensor<double> col(s.size(), 1, s);
    CHECK(std::abs(tape.value(tape.bce(tape.constant(col), y)).data[0] - want) < 1e-6);
  }
}

TEST_CASE("training negatives") {
  const auto vocab = build_vocab({"r"});
  const RelationId r = vocab.id("r");
  const Triple ab{EntityId{0}, r, EntityId{1}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto n = sample_negative(ab, FactSet(std::vector<Triple>{ab}), 2, rng);
    CHECK(((n == Triple{EntityId{1}, r, EntityId{1}}) || (n == Triple{EntityId{0}, r, EntityId{0}})));
  }
  // Head side exhausted: only the tail can move.
  const std::vector<Triple> blocked{ab, {EntityId{1}, r, EntityId{1}}};
  Rng rng(1);
  CHECK(sample_negative(ab, FactSet(blocked), 2, rng) == Triple{EntityId{0}, r, EntityId{0}});
  const std::vector<Triple> all{ab, {EntityId{1}, r, EntityId{1}}, {EntityId{0}, r, EntityId{0}}};
  CHECK_THROWS_AS(sample_negative(ab, FactSet(all), 2, rng), SamplingError);
  CHECK_THROWS_AS(sample_negative(ab, FactSet(), 1, rng), SamplingError);

  std::mt19937_64 g(2);
  std::vector<Triple> facts;
  for (std::uint32_t h = 0; h < 10; ++h) {
    for (std::uint32_t t = 0; t < 10; ++t) {
      if (g() % 3 == 0) facts.push_back({EntityId{h}, r, EntityId{t}});
    }
  }
  const FactSet known(facts);
  Rng s1(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(known.contains(sample_negative(facts[i % facts.size()], known, 10, s1)));
  }
  Rng a(4), b(4);
  CHECK(sample_negative(facts[0], known, 10, a) == sample_negative(facts[0], known, 10, b));
}

TEST_CASE("config validation") {
  TrainConfig t;
  CHECK_NOTHROW(t.validate());
  t.patience = 0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {};
  t.lr_grid.clear();
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("loss decreases over the first epochs on a planted graph") {
  const Small s;
  REQUIRE(s.positives.size() > 20);
  Model model(tiny_model(), s.bench.vocab.base_count(), 1);
  const auto rep = fit(s.graph, s.positives, {}, model, quick(3));
  REQUIRE(rep.epochs.size() == 3);
  CHECK(rep.epochs[1].train_loss < rep.epochs[0].train_loss);
  CHECK(rep.epochs[2].train_loss < rep.epochs[1].train_loss);
  CHECK(rep.epochs[0].train_examples == 2 * s.positives.size());
  CHECK(rep.best_epoch == 3);
}

TEST_CASE("frozen model stops after patience runs out") {
  const Small s;
  Model model(tiny_model(), s.bench.vocab.base_count(), 2);
  TrainConfig t = quick(10);
  t.lr = 0.0;
  t.patience = 1;
  std::size_t calls = 0;
  const auto rep = fit(s.graph, s.positives, s.bench.train.valid, model, t,
                       {.on_epoch = [&](const EpochRecord&) { ++calls; }});
  CHECK(rep.epochs.size() == 2);
  CHECK(calls == 2);
  CHECK(rep.stopped_early);
  CHECK(rep.best_epoch == 1);
  CHECK(rep.epochs[0].valid_hits10 == rep.epochs[1].valid_hits10);
}

TEST_CASE("training is deterministic and restores the best epoch") {
  const Small s;
  const auto dir = testing::scratch_dir("train_det");
  TrainConfig t = quick(3);
  t.patience = 3;
  Model a(tiny_model(), s.bench.vocab.base_count(), 3);
  Model b(tiny_model(), s.bench.vocab.base_count(), 3);
  const auto ra = fit(s.graph, s.positives, s.bench.train.valid, a, t,
                      {.checkpoint = dir / "best.ckpt", .vocab = &s.bench.vocab});
  const auto rb = fit(s.graph, s.positives, s.bench.train.valid, b, t);
  REQUIRE(ra.epochs.size() == rb.epochs.size());
  for (std::size_t i = 0; i < ra.epochs.size(); ++i) {
    CHECK(std::abs(ra.epochs[i].train_loss - rb.epochs[i].train_loss) <= 1e-6);
    CHECK(ra.epochs[i].valid_mrr == rb.epochs[i].valid_mrr);
  }
  REQUIRE(ra.best_checkpoint.has_value());
  const auto loaded = load_checkpoint(*ra.best_checkpoint);
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    CHECK(loaded.model.params()[i].value.data == a.params()[i].value.data);
  }
  CHECK_THROWS_AS(fit(s.graph, s.positives, {}, a, t, {.checkpoint = dir / "x.ckpt"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit(s.graph, {}, {}, a, t), std::invalid_argument);
}

TEST_CASE("grid selection") {
  auto cell = [](double lr, double dropout, double h10) {
    GridCell c{lr, dropout, {}};
    c.report.best_hits10 = h10;
    return c;
  };
  const std::vector<GridCell> one{cell(1e-3, 0.1, 0.2)};
  CHECK(select_best_cell(one) == 0);
  const std::vector<GridCell> tied{cell(1e-3, 0.3, 0.9), cell(5e-4, 0.5, 0.9), cell(5e-4, 0.2, 0.9),
                                   cell(5e-3, 0.1, 0.8)};
  CHECK(select_best_cell(tied) == 2);
  std::vector<GridCell> reversed(tied.rbegin(), tied.rend());
  CHECK(reversed[select_best_cell(reversed)].dropout == 0.2);
  CHECK_THROWS_AS(select_best_cell(std::vector<GridCell>{}), std::invalid_argument);
}

TEST_CASE("grid search trains one model per cell") {
  const Small s;
  TrainConfig t = quick(1);
  t.lr_grid = {1e-3};
  t.dropout_grid = {0.1};
  const auto single = grid_search(s.graph, s.positives, s.bench.train.valid, tiny_model(),
                                  s.bench.vocab.base_count(), t);
  CHECK(single.cells.size() == 1);
  CHECK(single.best == 0);

  t.lr_grid = {5e-4, 1e-3};
  t.dropout_grid = {0.1, 0.2, 0.3};
  std::size_t seen = 0;
  const auto grid = grid_search(s.graph, s.positives, s.bench.train.valid, tiny_model(),
                                s.bench.vocab.base_count(), t,
                                [&](const GridCell&) { ++seen; });
  CHECK(grid.cells.size() == 6);
  CHECK(seen == 6);
  CHECK(grid.cells[0].lr == 5e-4);
  CHECK(grid.cells[2].dropout == 0.3);
  const auto again = grid_search(s.graph, s.positives, s.bench.train.valid, tiny_model(),
                                 s.bench.vocab.base_count(), t);
  CHECK(again.best == grid.best);
}
