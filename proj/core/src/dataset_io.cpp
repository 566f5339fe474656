#include "hedge/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hedge/baselines.hpp"
#include "hedge/rng.hpp"
#include "hedge/version.hpp"

namespace hedge {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_fail(const std::string& label, int line, const std::string& what) {
  throw std::runtime_error(label + ":" + std::to_string(line) + ": " + what);
}

bool read_int_pair(const std::string& text, long& a, long& b) {
  std::istringstream ss(text);
  std::string tail;
  if (!(ss >> a >> b)) return false;
  if (ss >> tail) return false;
  return true;
}

}  // namespace

void write_incidence(const IncidenceMatrix& h, std::ostream& out) {
  out << h.nodes() << ' ' << h.edges() << '\n';
  const mat_t& e = h.entries();
  for (int i = 0; i < h.nodes(); ++i)
    for (int j = 0; j < h.edges(); ++j)
      if (e(i, j) == 1.0) out << i << ' ' << j << '\n';
}

void save_incidence(const IncidenceMatrix& h, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_incidence: cannot open " + path.string());
  write_incidence(h, out);
  if (!out) throw std::runtime_error("save_incidence: write failed for " + path.string());
}

IncidenceMatrix parse_incidence(std::istream& in, const std::string& label,
                                const IncidenceMatrix::Options& opts) {
  std::string text;
  int line = 0;
  long n = 0, m = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!read_int_pair(text, n, m) || n <= 0 || m <= 0)
      parse_fail(label, line, "malformed header, expected 'n m' with positive integers");
    break;
  }
  if (n <= 0) parse_fail(label, line, "missing header");

  mat_t entries = mat_t::Zero(n, m);
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    long i = 0, j = 0;
    if (!read_int_pair(text, i, j)) parse_fail(label, line, "malformed incidence, expected 'row col'");
    if (i < 0 || i >= n || j < 0 || j >= m)
      parse_fail(label, line,
                 "index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range for " +
                     std::to_string(n) + "x" + std::to_string(m));
    if (entries(i, j) == 1.0)
      parse_fail(label, line, "duplicate incidence (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    entries(i, j) = 1.0;
  }
  // Invariant failures (empty hyperedge, isolated node) are parse errors from
  // the loader's point of view: keep the file label in the message.
  try {
    return IncidenceMatrix(std::move(entries), opts);
  } catch (const std::invalid_argument& e) {
    parse_fail(label, line, e.what());
    throw;  // parse_fail always throws
  }
}

IncidenceMatrix load_incidence(const fs::path& path, const IncidenceMatrix::Options& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_incidence: cannot open " + path.string());
  return parse_incidence(in, path.string(), opts);
}

void save_batch(const std::vector<IncidenceMatrix>& batch, const fs::path& dir,
                const BatchManifest& manifest) {
  if (batch.empty()) throw std::invalid_argument("save_batch: empty batch");
  const int n = batch.front().nodes(), m = batch.front().edges();
  for (const auto& h : batch)
    if (h.nodes() != n || h.edges() != m)
      throw std::invalid_argument("save_batch: mixed shapes in batch");
  fs::create_directories(dir);
  char name[32];
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::snprintf(name, sizeof name, "sample_%05zu.txt", i);
    save_incidence(batch[i], dir / name);
  }
  nlohmann::json j{{"kind", manifest.kind},
                   {"seed", manifest.seed},
                   {"count", batch.size()},
                   {"nodes", n},
                   {"edges", m},
                   {"config_hash", manifest.config_hash},
                   {"tool_version", kToolVersion}};
  if (manifest.extra.is_object())
    for (auto it = manifest.extra.begin(); it != manifest.extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("save_batch: cannot open manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

LoadedBatch load_batch(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("load_batch: not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string stem = entry.path().filename().string();
    if (stem.rfind("sample_", 0) == 0 && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("load_batch: no sample_*.txt files in " + dir.string());
  std::sort(files.begin(), files.end());

  LoadedBatch out;
  out.manifest = nlohmann::json::object();
  out.samples.reserve(files.size());
  for (const auto& f : files)
    out.samples.push_back(
        load_incidence(f, {.allow_isolated_nodes = true, .allow_empty_hyperedges = true}));
  const fs::path mpath = dir / "manifest.json";
  if (fs::exists(mpath)) {
    std::ifstream in(mpath);
    in >> out.manifest;
    if (in.fail()) throw std::runtime_error("load_batch: unreadable manifest in " + dir.string());
  }
  return out;
}

namespace {

/// First k of a uniform random permutation of 0..n-1, in drawn order.
std::vector<int> draw_without_replacement(int n, int k, rng::Stream& stream) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int t = 0; t < k; ++t)
    std::swap(idx[static_cast<std::size_t>(t)],
              idx[static_cast<std::size_t>(t) + stream.uniform_index(static_cast<std::uint64_t>(n - t))]);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

std::vector<IncidenceMatrix> sample_subhypergraphs(const IncidenceMatrix& full,
                                                   const SubsampleConfig& cfg) {
  const int n = full.nodes(), m = full.edges();
  if (cfg.n_sub < 1 || cfg.n_sub > n) throw std::invalid_argument("subsample: n_sub out of range");
  if (cfg.m_sub < 2 || cfg.m_sub > m) throw std::invalid_argument("subsample: m_sub out of range");
  if (cfg.count < 1) throw std::invalid_argument("subsample: count must be positive");
  if (cfg.max_retries < 1) throw std::invalid_argument("subsample: max_retries must be positive");

  const mat_t& entries = full.entries();
  std::vector<IncidenceMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int sample = 0; sample < cfg.count; ++sample) {
    rng::Stream stream(rng::derive(cfg.seed, "subsample", static_cast<std::uint64_t>(sample)));
    bool done = false;
    for (int attempt = 0; attempt < cfg.max_retries && !done; ++attempt) {
      const std::vector<int> cols = draw_without_replacement(m, cfg.m_sub, stream);
      // Incident nodes in first-touch order across the drawn columns.
      std::vector<int> incident;
      std::vector<char> seen(static_cast<std::size_t>(n), 0);
      for (int c : cols)
        for (int r = 0; r < n; ++r)
          if (entries(r, c) == 1.0 && !seen[static_cast<std::size_t>(r)]) {
            seen[static_cast<std::size_t>(r)] = 1;
            incident.push_back(r);
          }
      std::vector<int> rows;
      if (static_cast<int>(incident.size()) > cfg.n_sub) {
        const std::vector<int> pick =
            draw_without_replacement(static_cast<int>(incident.size()), cfg.n_sub, stream);
        rows.reserve(static_cast<std::size_t>(cfg.n_sub));
        for (int p : pick) rows.push_back(incident[static_cast<std::size_t>(p)]);
      } else {
        rows = incident;
        if (static_cast<int>(rows.size()) < cfg.n_sub) {
          std::vector<int> rest;
          for (int r = 0; r < n; ++r)
            if (!seen[static_cast<std::size_t>(r)]) rest.push_back(r);
          const int need = cfg.n_sub - static_cast<int>(rows.size());
          const std::vector<int> pick =
              draw_without_replacement(static_cast<int>(rest.size()), need, stream);
          for (int p : pick) rows.push_back(rest[static_cast<std::size_t>(p)]);
        }
      }
      mat_t sub(cfg.n_sub, cfg.m_sub);
      for (int c = 0; c < cfg.m_sub; ++c)
        for (int r = 0; r < cfg.n_sub; ++r)
          sub(r, c) = entries(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
      if ((sub.colwise().sum().array() > 0.0).all()) {
        out.emplace_back(std::move(sub), IncidenceMatrix::Options{.allow_isolated_nodes = true,
                                                                  .allow_empty_hyperedges = false});
        done = true;
      }
    }
    if (!done)
      throw std::runtime_error("subsample: no empty-column-free draw in " +
                               std::to_string(cfg.max_retries) +
                               " retries; target shape looks infeasible");
  }
  return out;
}

std::string regime_name(SynthRegime regime) {
  switch (regime) {
    case SynthRegime::configuration: return "configuration";
    case SynthRegime::overlapping_blocks: return "overlapping_blocks";
    case SynthRegime::committee: return "committee";
    case SynthRegime::sparse_tail_overlap: return "sparse_tail_overlap";
  }
  throw std::logic_error("regime_name: unhandled regime");
}

SynthRegime regime_from_name(const std::string& name) {
  if (name == "configuration") return SynthRegime::configuration;
  if (name == "overlapping_blocks") return SynthRegime::overlapping_blocks;
  if (name == "committee") return SynthRegime::committee;
  if (name == "sparse_tail_overlap") return SynthRegime::sparse_tail_overlap;
  throw std::invalid_argument("unknown regime: " + name);
}

namespace {

/// Cumulative weights of a truncated power law P(k) proportional to k^-a on
/// [kmin, kmax].
std::vector<double> power_law_cdf(double a, int kmin, int kmax) {
  std::vector<double> cum;
  cum.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  double total = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    total += std::pow(static_cast<double>(k), -a);
    cum.push_back(total);
  }
  return cum;
}

int sample_power_law(const std::vector<double>& cum, int kmin, rng::Stream& stream) {
  const double u = stream.uniform() * cum.back();
  const auto it = std::lower_bound(cum.begin(), cum.end(), u);
  return kmin + static_cast<int>(it - cum.begin());
}

mat_t synth_configuration(int n, int m, rng::Stream& stream) {
  const int kmax = std::clamp(n / 2, 2, 12);
  const int dmax_init = std::clamp(m / 2, 2, 8);
  const std::vector<double> size_cdf = power_law_cdf(2.2, 2, kmax);
  const std::vector<double> deg_cdf = power_law_cdf(2.0, 1, dmax_init);

  for (int restart = 0; restart < 50; ++restart) {
    std::vector<int> sizes(static_cast<std::size_t>(m));
    int total = 0;
    for (auto& k : sizes) {
      k = sample_power_law(size_cdf, 2, stream);
      total += k;
    }
    int dmax = dmax_init;
    while (dmax < m && n * dmax < total) ++dmax;
    if (n * dmax < total) throw std::runtime_error("configuration regime: degree sequence infeasible");

    std::vector<int> degrees(static_cast<std::size_t>(n));
    long have = 0;
    for (auto& d : degrees) {
      d = std::min(sample_power_law(deg_cdf, 1, stream), dmax);
      have += d;
    }
    // Nudge degrees until the two stub totals match.
    long guard = 200L * (n + total);
    while (have != total && guard-- > 0) {
      const auto v = stream.uniform_index(static_cast<std::uint64_t>(n));
      if (have < total && degrees[v] < dmax) {
        ++degrees[v];
        ++have;
      } else if (have > total && degrees[v] > 1) {
        --degrees[v];
        --have;
      }
    }
    if (have != total) continue;

    // Stub matching: shuffled node stubs against edge slots in order. A stub
    // that would duplicate a membership is swapped with a random later stub.
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(total));
    for (int v = 0; v < n; ++v)
      for (int d = 0; d < degrees[static_cast<std::size_t>(v)]; ++d) stubs.push_back(v);
    for (std::size_t t = 0; t + 1 < stubs.size(); ++t)
      std::swap(stubs[t], stubs[t + stream.uniform_index(stubs.size() - t)]);

    std::vector<int> edge_of(static_cast<std::size_t>(total));
    {
      int pos = 0;
      for (int j = 0; j < m; ++j)
        for (int t = 0; t < sizes[static_cast<std::size_t>(j)]; ++t) edge_of[static_cast<std::size_t>(pos++)] = j;
    }

    mat_t entries = mat_t::Zero(n, m);
    bool ok = true;
    for (int p = 0; p < total && ok; ++p) {
      int v = stubs[static_cast<std::size_t>(p)];
      const int e = edge_of[static_cast<std::size_t>(p)];
      if (entries(v, e) == 1.0) {
        ok = false;
        for (int t = 0; t < 400 && p + 1 < total; ++t) {
          const std::size_t q = static_cast<std::size_t>(p + 1) +
                                stream.uniform_index(static_cast<std::uint64_t>(total - p - 1));
          const int w = stubs[q];
          if (w != v && entries(w, e) == 0.0) {
            std::swap(stubs[static_cast<std::size_t>(p)], stubs[q]);
            v = w;
            ok = true;
            break;
          }
        }
      }
      if (ok) entries(v, e) = 1.0;
    }
    if (!ok) continue;
    checkerboard_swaps(entries, 10 * total, stream);
    return entries;
  }
  throw std::runtime_error("configuration regime: stub matching failed after 50 restarts");
}

mat_t synth_blocks(int n, int m, int blocks, double p_in, double p_out, rng::Stream& stream) {
  mat_t entries = mat_t::Zero(n, m);
  for (int j = 0; j < m; ++j) {
    const int cb = static_cast<int>(static_cast<long>(j) * blocks / m);
    bool nonempty = false;
    for (int attempt = 0; attempt < 100 && !nonempty; ++attempt) {
      for (int i = 0; i < n; ++i) {
        const int rb = static_cast<int>(static_cast<long>(i) * blocks / n);
        entries(i, j) = stream.uniform() < (rb == cb ? p_in : p_out) ? 1.0 : 0.0;
        nonempty = nonempty || entries(i, j) == 1.0;
      }
    }
    if (!nonempty) {
      // Degenerate probabilities; force one member from the column's own block.
      std::vector<int> members;
      for (int i = 0; i < n; ++i)
        if (static_cast<long>(i) * blocks / n == cb) members.push_back(i);
      entries(members[stream.uniform_index(members.size())], j) = 1.0;
    }
  }
  return entries;
}

mat_t synth_committee(int n, int m, rng::Stream& stream) {
  const int lo = std::max(1, (n + 4) / 5);   // ceil(0.2 n)
  const int hi = std::max(lo, (3 * n) / 5);  // floor(0.6 n)
  mat_t entries = mat_t::Zero(n, m);
  for (int j = 0; j < m; ++j) {
    const int k = lo + static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
    for (int r : draw_without_replacement(n, k, stream)) entries(r, j) = 1.0;
  }
  return entries;
}

/// Exactly `planted` hyperedge pairs share >= 2 nodes; every other pair shares
/// at most 1 by rejection, so the tail fraction is planted/pairs by design.
mat_t synth_sparse_tail(int n, int m, double plant_fraction, rng::Stream& stream) {
  const long pairs = static_cast<long>(m) * (m - 1) / 2;
  const int planted = static_cast<int>(std::llround(plant_fraction * static_cast<double>(pairs)));
  if (2 * planted > m)
    throw std::invalid_argument("sparse_tail_overlap: plant_fraction needs more than m/2 edge pairs");
  if (planted > 0 && n < 4)
    throw std::invalid_argument("sparse_tail_overlap: planting needs n >= 4");

  const std::vector<int> perm = draw_without_replacement(m, m, stream);
  mat_t entries = mat_t::Zero(n, m);
  std::vector<char> built(static_cast<std::size_t>(m), 0);
  auto clashes = [&](const std::vector<int>& nodes, int skip_col) {
    for (int c = 0; c < m; ++c) {
      if (!built[static_cast<std::size_t>(c)] || c == skip_col) continue;
      int shared = 0;
      for (int v : nodes) shared += entries(v, c) == 1.0 ? 1 : 0;
      if (shared >= 2) return true;
    }
    return false;
  };
  auto place = [&](const std::vector<int>& nodes, int col) {
    for (int v : nodes) entries(v, col) = 1.0;
    built[static_cast<std::size_t>(col)] = 1;
  };

  for (int t = 0; t < planted; ++t) {
    const int e1 = perm[static_cast<std::size_t>(2 * t)];
    const int e2 = perm[static_cast<std::size_t>(2 * t + 1)];
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      const std::vector<int> pick = draw_without_replacement(n, 4, stream);
      const std::vector<int> first{pick[0], pick[1], pick[2]};
      const std::vector<int> second{pick[0], pick[1], pick[3]};
      if (clashes(first, -1)) continue;
      place(first, e1);
      if (clashes(second, e1)) {
        for (int v : first) entries(v, e1) = 0.0;
        built[static_cast<std::size_t>(e1)] = 0;
        continue;
      }
      place(second, e2);
      done = true;
    }
    if (!done) throw std::runtime_error("sparse_tail_overlap: planting infeasible at this shape");
  }
  for (int t = 2 * planted; t < m; ++t) {
    const int e = perm[static_cast<std::size_t>(t)];
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      const std::vector<int> pick = draw_without_replacement(n, 2, stream);
      if (clashes(pick, -1)) continue;
      place(pick, e);
      done = true;
    }
    if (!done) throw std::runtime_error("sparse_tail_overlap: background edges infeasible at this shape");
  }
  return entries;
}

}  // namespace

std::vector<IncidenceMatrix> synth_batch(const SynthConfig& cfg) {
  if (cfg.n < 2 || cfg.m < 2) throw std::invalid_argument("synth: need n >= 2 and m >= 2");
  if (cfg.count < 1) throw std::invalid_argument("synth: count must be positive");
  if (cfg.regime == SynthRegime::overlapping_blocks) {
    if (cfg.blocks < 1 || cfg.blocks > std::min(cfg.n, cfg.m))
      throw std::invalid_argument("synth: blocks must be in [1, min(n, m)]");
    if (cfg.p_in < 0.0 || cfg.p_in > 1.0 || cfg.p_out < 0.0 || cfg.p_out > 1.0)
      throw std::invalid_argument("synth: block probabilities must be in [0, 1]");
  }
  if (cfg.regime == SynthRegime::configuration && cfg.n < 4)
    throw std::invalid_argument("synth: configuration regime needs n >= 4");
  if (cfg.regime == SynthRegime::sparse_tail_overlap &&
      (cfg.plant_fraction < 0.0 || cfg.plant_fraction > 1.0))
    throw std::invalid_argument("synth: plant_fraction must be in [0, 1]");

  const std::string label = "synth/" + regime_name(cfg.regime);
  std::vector<IncidenceMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int i = 0; i < cfg.count; ++i) {
    rng::Stream stream(rng::derive(cfg.seed, label, static_cast<std::uint64_t>(i)));
    mat_t entries;
    switch (cfg.regime) {
      case SynthRegime::configuration: entries = synth_configuration(cfg.n, cfg.m, stream); break;
      case SynthRegime::overlapping_blocks:
        entries = synth_blocks(cfg.n, cfg.m, cfg.blocks, cfg.p_in, cfg.p_out, stream);
        break;
      case SynthRegime::committee: entries = synth_committee(cfg.n, cfg.m, stream); break;
      case SynthRegime::sparse_tail_overlap:
        entries = synth_sparse_tail(cfg.n, cfg.m, cfg.plant_fraction, stream);
        break;
    }
    out.emplace_back(std::move(entries), IncidenceMatrix::Options{.allow_isolated_nodes = true,
                                                                  .allow_empty_hyperedges = false});
  }
  return out;
}

}  // namespace hedge
