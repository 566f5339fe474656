#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "hedge/dataset_io.hpp"
#include "hedge/metrics.hpp"
#include "hedge/rng.hpp"

using namespace hedge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

IncidenceMatrix parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_incidence(in, "<test>", {.allow_isolated_nodes = true, .allow_empty_hyperedges = false});
}

}  // namespace

TEST_CASE("incidence files round trip") {
  TempDir dir("hedge_test_io_roundtrip");
  rng::Stream stream(rng::derive(9101, "io/roundtrip"));
  for (int round = 0; round < 5; ++round) {
    const IncidenceMatrix h = testutil::random_incidence(7, 5, 0.4, stream);
    const fs::path path = dir.path / "h.txt";
    save_incidence(h, path);
    const IncidenceMatrix back = load_incidence(path);
    CHECK((back.entries() - h.entries()).norm() == 0.0);
  }
}

TEST_CASE("malformed incidence text is rejected with location info") {
  CHECK_THROWS_AS(parse_text("2\n0 0\n"), std::runtime_error);             // header too short
  CHECK_THROWS_AS(parse_text("2 2\n0 0\n5 1\n"), std::runtime_error);      // row out of range
  CHECK_THROWS_AS(parse_text("2 2\n0 0\n0 3\n"), std::runtime_error);      // col out of range
  CHECK_THROWS_AS(parse_text("2 2\n0 0\n0 0\n0 1\n"), std::runtime_error); // duplicate pair
  CHECK_THROWS_AS(parse_text("2 2\n0 0 7\n0 1\n"), std::runtime_error);    // trailing token
  CHECK_THROWS_AS(parse_text("2 2\nx y\n"), std::runtime_error);           // not numbers
  CHECK_THROWS_AS(parse_text("0 2\n"), std::runtime_error);                // degenerate shape
  CHECK_THROWS_AS(parse_text("2 2\n0 0\n1 0\n"), std::runtime_error);      // column 1 empty

  try {
    parse_text("2 2\n0 0\n5 1\n");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("<test>:3") != std::string::npos);
  }
}

TEST_CASE("default loading permits isolated nodes but not empty hyperedges") {
  // Node 1 untouched, both columns populated.
  const IncidenceMatrix h = parse_text("3 2\n0 0\n2 1\n");
  CHECK(h.nodes() == 3);
  CHECK(h.edges() == 2);
  CHECK(h.nnz() == 2);
}

TEST_CASE("batch directories round trip with their manifest") {
  TempDir dir("hedge_test_io_batch");
  rng::Stream stream(rng::derive(9102, "io/batch"));
  std::vector<IncidenceMatrix> batch;
  for (int i = 0; i < 7; ++i) batch.push_back(testutil::random_incidence(6, 4, 0.4, stream));

  BatchManifest manifest;
  manifest.kind = "unit_test";
  manifest.seed = 424242;
  manifest.config_hash = "deadbeefdeadbeef";
  manifest.extra = nlohmann::json{{"note", "round trip"}};
  save_batch(batch, dir.path, manifest);

  const LoadedBatch back = load_batch(dir.path);
  REQUIRE(back.samples.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK((back.samples[i].entries() - batch[i].entries()).norm() == 0.0);
  CHECK(back.manifest.at("kind") == "unit_test");
  CHECK(back.manifest.at("seed") == 424242);
  CHECK(back.manifest.at("count") == 7);
  CHECK(back.manifest.at("nodes") == 6);
  CHECK(back.manifest.at("edges") == 4);
  CHECK(back.manifest.at("config_hash") == "deadbeefdeadbeef");
  CHECK(back.manifest.at("note") == "round trip");
  CHECK(back.manifest.contains("tool_version"));
}

TEST_CASE("batch loading keeps name order and survives a missing manifest") {
  TempDir dir("hedge_test_io_order");
  std::vector<IncidenceMatrix> batch;
  // Sample i has node degree pattern identifying its index via nnz = i + 1.
  for (int i = 0; i < 4; ++i) {
    mat_t e = mat_t::Zero(5, 1);
    for (int r = 0; r <= i; ++r) e(r, 0) = 1.0;
    batch.push_back(IncidenceMatrix(e, {.allow_isolated_nodes = true}));
  }
  save_batch(batch, dir.path, BatchManifest{"order", 0, "", {}});
  fs::remove(dir.path / "manifest.json");

  const LoadedBatch back = load_batch(dir.path);
  REQUIRE(back.samples.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(back.samples[i].nnz() == i + 1);
  CHECK(back.manifest.is_object());
  CHECK(back.manifest.empty());
}

TEST_CASE("batch saving and loading reject malformed input") {
  TempDir dir("hedge_test_io_bad");
  CHECK_THROWS_AS(save_batch({}, dir.path / "x", BatchManifest{}), std::invalid_argument);
  std::vector<IncidenceMatrix> mixed{testutil::inc({{1, 1}, {1, 0}}),
                                     testutil::inc({{1, 1}, {1, 0}, {0, 1}})};
  CHECK_THROWS_AS(save_batch(mixed, dir.path / "x", BatchManifest{}), std::invalid_argument);
  CHECK_THROWS_AS(load_batch(dir.path / "missing"), std::runtime_error);
  fs::create_directories(dir.path / "empty");
  CHECK_THROWS_AS(load_batch(dir.path / "empty"), std::runtime_error);
}

TEST_CASE("subsampling yields fixed shapes with no empty hyperedges") {
  rng::Stream stream(rng::derive(9103, "io/subsample"));
  const IncidenceMatrix full = testutil::random_incidence(40, 30, 0.15, stream);

  SubsampleConfig cfg;
  cfg.n_sub = 12;
  cfg.m_sub = 9;
  cfg.count = 10;
  cfg.seed = rng::derive(9103, "io/subsample/run");
  const auto batch = sample_subhypergraphs(full, cfg);
  REQUIRE(batch.size() == 10);
  for (const auto& h : batch) {
    CHECK(h.nodes() == 12);
    CHECK(h.edges() == 9);
    for (int j = 0; j < h.edges(); ++j) CHECK(h.entries().col(j).sum() > 0.0);
  }

  const auto again = sample_subhypergraphs(full, cfg);
  for (std::size_t i = 0; i < batch.size(); ++i)
    CHECK((batch[i].entries() - again[i].entries()).norm() == 0.0);
}

TEST_CASE("subsampled columns are genuine hyperedge restrictions") {
  // Perfect matching source: column j = {2j, 2j+1}, every hyperedge size 2.
  mat_t match = mat_t::Zero(10, 5);
  for (int j = 0; j < 5; ++j) {
    match(2 * j, j) = 1.0;
    match(2 * j + 1, j) = 1.0;
  }
  const IncidenceMatrix full(match);

  // Drawing every node restricts nothing: sizes must stay exactly 2.
  SubsampleConfig all_nodes;
  all_nodes.n_sub = 10;
  all_nodes.m_sub = 3;
  all_nodes.count = 8;
  all_nodes.seed = 5;
  for (const auto& h : sample_subhypergraphs(full, all_nodes))
    for (int j = 0; j < h.edges(); ++j) CHECK(h.entries().col(j).sum() == 2.0);

  // Three drawn matching edges touch 6 nodes; keeping 4 of them can only
  // shrink hyperedges, never grow or empty them.
  SubsampleConfig some_nodes = all_nodes;
  some_nodes.n_sub = 4;
  for (const auto& h : sample_subhypergraphs(full, some_nodes))
    for (int j = 0; j < h.edges(); ++j) {
      CHECK(h.entries().col(j).sum() >= 1.0);
      CHECK(h.entries().col(j).sum() <= 2.0);
    }
}

TEST_CASE("subsampling validates its configuration and hopeless inputs") {
  rng::Stream stream(rng::derive(9105, "io/subsample-bad"));
  const IncidenceMatrix full = testutil::random_incidence(10, 8, 0.4, stream);
  SubsampleConfig cfg;
  cfg.n_sub = 20;  // more nodes than available
  CHECK_THROWS_AS(sample_subhypergraphs(full, cfg), std::invalid_argument);
  cfg.n_sub = 4;
  cfg.m_sub = 1;  // below the metric-suite minimum
  CHECK_THROWS_AS(sample_subhypergraphs(full, cfg), std::invalid_argument);
  cfg.m_sub = 9;  // more hyperedges than available
  CHECK_THROWS_AS(sample_subhypergraphs(full, cfg), std::invalid_argument);

  // Two hubs splitting the hyperedges between them: no single row covers all
  // four columns, so every 1-row draw leaves an empty column and retries
  // exhaust deterministically.
  mat_t star = mat_t::Zero(6, 4);
  star(0, 0) = star(0, 1) = 1.0;
  star(1, 2) = star(1, 3) = 1.0;
  const IncidenceMatrix hopeless(star, {.allow_isolated_nodes = true});
  SubsampleConfig tight;
  tight.n_sub = 1;
  tight.m_sub = 4;
  tight.count = 4;
  tight.max_retries = 8;
  tight.seed = 11;
  CHECK_THROWS_AS(sample_subhypergraphs(hopeless, tight), std::runtime_error);
}

TEST_CASE("regime names round trip") {
  for (const auto regime : {SynthRegime::configuration, SynthRegime::overlapping_blocks,
                            SynthRegime::committee, SynthRegime::sparse_tail_overlap})
    CHECK(regime_from_name(regime_name(regime)) == regime);
  CHECK_THROWS_AS(regime_from_name("erdos"), std::invalid_argument);
}

TEST_CASE("synthetic regimes have their defining shapes") {
  SynthConfig cfg;
  cfg.n = 24;
  cfg.m = 20;
  cfg.count = 6;
  cfg.seed = rng::derive(9106, "io/synth");

  cfg.regime = SynthRegime::configuration;
  for (const auto& h : synth_batch(cfg)) {
    CHECK(h.nodes() == 24);
    CHECK(h.edges() == 20);
    for (int j = 0; j < h.edges(); ++j) CHECK(h.entries().col(j).sum() >= 2.0);
  }

  cfg.regime = SynthRegime::committee;
  for (const auto& h : synth_batch(cfg)) {
    const int lo = std::max(1, (24 + 4) / 5), hi = std::max(lo, 3 * 24 / 5);
    for (int j = 0; j < h.edges(); ++j) {
      const double size = h.entries().col(j).sum();
      CHECK(size >= lo);
      CHECK(size <= hi);
    }
  }
}

TEST_CASE("block regime separates in-block from out-of-block incidence") {
  SynthConfig cfg;
  cfg.regime = SynthRegime::overlapping_blocks;
  cfg.n = 32;
  cfg.m = 32;
  cfg.count = 12;
  cfg.blocks = 4;
  cfg.p_in = 0.6;
  cfg.p_out = 0.02;
  cfg.seed = rng::derive(9107, "io/blocks");

  double in_hits = 0.0, in_cells = 0.0, out_hits = 0.0, out_cells = 0.0;
  for (const auto& h : synth_batch(cfg)) {
    for (int j = 0; j < 32; ++j) {
      const int block = j * 4 / 32;
      for (int i = 0; i < 32; ++i) {
        const bool inside = i * 4 / 32 == block;
        (inside ? in_cells : out_cells) += 1.0;
        (inside ? in_hits : out_hits) += h.entries()(i, j);
      }
    }
  }
  CHECK(in_hits / in_cells > 0.45);
  CHECK(out_hits / out_cells < 0.12);  // forced members leak a little over p_out
}

TEST_CASE("sparse tail regime plants its overlap fraction exactly") {
  SynthConfig cfg;
  cfg.regime = SynthRegime::sparse_tail_overlap;
  cfg.n = 32;
  cfg.m = 32;
  cfg.count = 8;
  cfg.plant_fraction = 0.02;
  cfg.seed = rng::derive(9108, "io/tail");

  const int pairs = 32 * 31 / 2;
  const int planted = static_cast<int>(std::lround(cfg.plant_fraction * pairs));
  for (const auto& h : synth_batch(cfg))
    CHECK(intersection_tail_fraction(h) ==
          doctest::Approx(static_cast<double>(planted) / pairs).epsilon(1e-12));
}

TEST_CASE("synthetic generation validates its configuration") {
  SynthConfig cfg;
  cfg.n = 1;
  CHECK_THROWS_AS(synth_batch(cfg), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.count = 0;
  CHECK_THROWS_AS(synth_batch(cfg), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.blocks = 0;
  CHECK_THROWS_AS(synth_batch(cfg), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.p_in = 1.5;
  CHECK_THROWS_AS(synth_batch(cfg), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.regime = SynthRegime::sparse_tail_overlap;
  cfg.plant_fraction = -0.1;
  CHECK_THROWS_AS(synth_batch(cfg), std::invalid_argument);
  cfg.plant_fraction = 0.9;  // needs far more than m/2 disjoint planted pairs
  CHECK_THROWS_AS(synth_batch(cfg), std::invalid_argument);
}
