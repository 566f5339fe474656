#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hedge/incidence.hpp"

namespace hedge {

/// Text format: header "n m", then one 0-indexed "row col" pair per incidence.
/// Duplicate pairs, out-of-range indices, and malformed lines are errors.
void save_incidence(const IncidenceMatrix& h, const std::filesystem::path& path);
IncidenceMatrix load_incidence(const std::filesystem::path& path,
                               const IncidenceMatrix::Options& opts = {.allow_isolated_nodes = true,
                                                                       .allow_empty_hyperedges = false});
IncidenceMatrix parse_incidence(std::istream& in, const std::string& label,
                                const IncidenceMatrix::Options& opts);
void write_incidence(const IncidenceMatrix& h, std::ostream& out);

struct BatchManifest {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_hash;
  nlohmann::json extra;  // flat keys merged into the manifest
};

/// Batch directory layout: sample_00000.txt ... plus manifest.json recording
/// kind, seed, shape, config hash and tool version.
void save_batch(const std::vector<IncidenceMatrix>& batch, const std::filesystem::path& dir,
                const BatchManifest& manifest);

struct LoadedBatch {
  std::vector<IncidenceMatrix> samples;
  nlohmann::json manifest;  // empty object when the directory has none
};

/// Loads every sample_*.txt in name order. Samples are loaded permissively
/// (empty rows and columns allowed) so that generated batches round-trip.
LoadedBatch load_batch(const std::filesystem::path& dir);

struct SubsampleConfig {
  int n_sub = 16;
  int m_sub = 16;
  int count = 16;
  int max_retries = 200;
  std::uint64_t seed = 0;
};

/// Fixed-shape subhypergraphs: draw m_sub hyperedges without replacement,
/// then resolve the node side to exactly n_sub rows (uniform subset when over,
/// uniform padding from the remaining nodes when under). Rows and columns
/// appear in drawn order. Retries until no column is empty; throws once
/// max_retries draws fail.
std::vector<IncidenceMatrix> sample_subhypergraphs(const IncidenceMatrix& full,
                                                   const SubsampleConfig& cfg);

enum class SynthRegime { configuration, overlapping_blocks, committee, sparse_tail_overlap };

std::string regime_name(SynthRegime regime);
SynthRegime regime_from_name(const std::string& name);

struct SynthConfig {
  SynthRegime regime = SynthRegime::overlapping_blocks;
  int n = 32;
  int m = 32;
  int count = 16;
  // overlapping_blocks
  int blocks = 4;
  double p_in = 0.5;
  double p_out = 0.02;
  // sparse_tail_overlap: target fraction of hyperedge pairs sharing >= 2 nodes
  double plant_fraction = 0.02;
  std::uint64_t seed = 0;
};

/// Four structurally distinct generators used for ablations; defaults are
/// tuned so the regimes are far apart in feature space.
std::vector<IncidenceMatrix> synth_batch(const SynthConfig& cfg);

}  // namespace hedge
