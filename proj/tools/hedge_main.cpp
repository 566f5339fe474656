// Command line front end: train / generate / evaluate / baseline / subsample /
// synth / validate / ablate. Every artifact written embeds the config hash,
// the root seed, and the tool version; reruns with identical inputs are
// bit-identical except wall-clock fields.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hedge/baselines.hpp"
#include "hedge/dataset_io.hpp"
#include "hedge/metrics.hpp"
#include "hedge/run_config.hpp"
#include "hedge/sampler.hpp"
#include "hedge/trainer.hpp"
#include "hedge/validation.hpp"
#include "hedge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
};

hedge::RunConfig load_config(const Common& c) {
  if (c.config_path.empty()) return hedge::RunConfig{};
  return hedge::RunConfig::from_file(c.config_path);
}

void stamp(json& j, const hedge::RunConfig& rc, std::uint64_t seed) {
  j["config_hash"] = rc.hash();
  j["seed"] = seed;
  j["tool_version"] = hedge::kToolVersion;
}

void write_json(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << j.dump(2) << '\n';
}

void require_uniform_shape(const std::vector<hedge::IncidenceMatrix>& batch, const std::string& what) {
  const int n = batch.front().nodes(), m = batch.front().edges();
  for (const auto& h : batch)
    if (h.nodes() != n || h.edges() != m)
      throw std::runtime_error(what + ": samples disagree on shape; expected " + std::to_string(n) +
                               "x" + std::to_string(m));
}

double pooled_density(const std::vector<hedge::IncidenceMatrix>& batch) {
  double nnz = 0.0, cells = 0.0;
  for (const auto& h : batch) {
    nnz += static_cast<double>(h.nnz());
    cells += static_cast<double>(h.nodes()) * h.edges();
  }
  return nnz / cells;
}

void write_relaxed(const hedge::mat_t& x, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << x.rows() << ' ' << x.cols() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
      out << buf << (j + 1 == x.cols() ? '\n' : ' ');
    }
  }
}

struct TrainArgs : Common {
  std::string data_dir;
  std::string out_dir;
  std::string mask = "full";
  int steps_override = 0;
};

int cmd_train(const TrainArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const hedge::RunConfig rc = load_config(a);
  const hedge::LoadedBatch data = hedge::load_batch(a.data_dir);
  require_uniform_shape(data.samples, "train");
  const int n = data.samples.front().nodes(), m = data.samples.front().edges();
  const double rho_hat = pooled_density(data.samples);
  const double rho = rc.rho > 0.0 ? rc.rho : rho_hat;
  const hedge::DiffusionConfig dcfg = rc.diffusion_config(n, m, rho_hat);
  const hedge::OperatorMask mask = hedge::mask_from_name(a.mask);

  std::vector<hedge::ForwardProcess> bank;
  bank.reserve(data.samples.size());
  for (const auto& h : data.samples) bank.emplace_back(h, dcfg, mask);

  hedge::DriftNet::Config ncfg;
  ncfg.horizon = dcfg.horizon;
  hedge::DriftNet net(ncfg, hedge::rng::derive(a.seed, "net/init"));
  hedge::TrainConfig tc = rc.train_config(hedge::rng::derive(a.seed, "train"));
  if (a.steps_override > 0) tc.steps = a.steps_override;

  fs::create_directories(a.out_dir);
  std::ofstream log(fs::path(a.out_dir) / "train_log.jsonl");
  if (!log) throw std::runtime_error("cannot open train log in " + a.out_dir);
  const auto sink = [&log](const hedge::TrainLogEntry& e) {
    log << json{{"step", e.step}, {"loss", e.loss}, {"lr", e.lr}, {"wall_ms", e.wall_ms}}.dump() << '\n';
  };
  const hedge::TrainReport rep = hedge::train(net, bank, tc, sink);

  const fs::path model_path = fs::path(a.out_dir) / "model.bin";
  net.save(model_path.string());

  json meta{{"nodes", n},
            {"edges", m},
            {"train_samples", data.samples.size()},
            {"rho", rho},
            {"gamma", dcfg.gamma},
            {"tau", dcfg.tau},
            {"horizon", dcfg.horizon},
            {"schedule", hedge::schedule_name(dcfg.schedule)},
            {"quad_points", dcfg.quad_points},
            {"mask", hedge::mask_name(mask)},
            {"steps", tc.steps},
            {"batch", tc.batch},
            {"final_loss", rep.final_loss},
            {"zero_predictor_loss", rep.zero_predictor_loss},
            {"clip_threshold", rep.clip_threshold},
            {"param_checksum", rep.param_checksum},
            {"wall_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                            .count()}};
  stamp(meta, rc, a.seed);
  write_json(meta, (fs::path(a.out_dir) / "model_meta.json").string());

  std::cout << "trained " << tc.steps << " steps on " << data.samples.size() << " samples (" << n << "x"
            << m << "); final loss " << rep.final_loss << ", zero-predictor " << rep.zero_predictor_loss
            << "\nmodel: " << model_path.string() << '\n';
  return 0;
}

struct GenerateArgs : Common {
  std::string model_path;
  std::string out_dir;
  int count_override = 0;
  int steps_override = 0;
  double threshold_override = -1.0;
  bool save_relaxed = false;
};

int cmd_generate(const GenerateArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  const fs::path meta_path = fs::path(a.model_path).parent_path() / "model_meta.json";
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw std::runtime_error("cannot open " + meta_path.string() + " next to the model");
  json meta;
  meta_in >> meta;

  const int n = meta.at("nodes").get<int>(), m = meta.at("edges").get<int>();
  hedge::DiffusionConfig dcfg;
  dcfg.horizon = meta.at("horizon").get<double>();
  dcfg.gamma = meta.at("gamma").get<double>();
  dcfg.tau = meta.at("tau").get<double>();
  dcfg.schedule = hedge::schedule_from_name(meta.at("schedule").get<std::string>());
  dcfg.quad_points = meta.at("quad_points").get<int>();
  dcfg.base_mean = hedge::mat_t::Constant(n, m, meta.at("rho").get<double>());

  const hedge::DriftNet net = hedge::DriftNet::load(a.model_path);
  hedge::SampleConfig scfg = rc.sample_config(hedge::rng::derive(a.seed, "generate"));
  if (a.count_override > 0) scfg.count = a.count_override;
  if (a.steps_override > 0) scfg.steps = a.steps_override;
  if (a.threshold_override > 0.0) scfg.threshold = a.threshold_override;

  const hedge::GenerationResult res = hedge::generate(net, dcfg, n, m, scfg);
  std::vector<hedge::IncidenceMatrix> batch;
  double saturation = 0.0;
  for (std::size_t i = 0; i < res.projected.size(); ++i)
    if (res.projected[i]) {
      batch.push_back(*res.projected[i]);
      saturation += res.stats[i].saturation;
    }
  if (batch.empty()) throw std::runtime_error("generation failed: every sample hit a non-finite state");
  saturation /= static_cast<double>(batch.size());

  hedge::BatchManifest manifest;
  manifest.kind = "generated";
  manifest.seed = a.seed;
  manifest.config_hash = rc.hash();
  manifest.extra = json{{"model_checksum", hedge::params_checksum(net.params())},
                        {"sampler_steps", scfg.steps},
                        {"threshold", scfg.threshold},
                        {"failures", res.failures},
                        {"mean_saturation", saturation}};
  hedge::save_batch(batch, a.out_dir, manifest);

  if (a.save_relaxed) {
    char name[32];
    for (std::size_t i = 0; i < res.relaxed.size(); ++i) {
      std::snprintf(name, sizeof name, "relaxed_%05zu.txt", i);
      write_relaxed(res.relaxed[i], fs::path(a.out_dir) / name);
    }
  }
  std::cout << "generated " << batch.size() << " samples (failures " << res.failures
            << ", mean saturation " << saturation << ") -> " << a.out_dir << '\n';
  return 0;
}

struct EvaluateArgs : Common {
  std::string real_dir;
  std::string gen_dir;
  std::string out_path;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  const auto real = hedge::load_batch(a.real_dir);
  const auto gen = hedge::load_batch(a.gen_dir);
  hedge::MetricOptions opts;
  opts.spectral_k = rc.spectral_k;
  const hedge::MetricReport rep = hedge::evaluate_batches(real.samples, gen.samples, opts);
  json j{{"metrics", rep.to_json()},
         {"real", a.real_dir},
         {"gen", a.gen_dir},
         {"real_count", real.samples.size()},
         {"gen_count", gen.samples.size()}};
  stamp(j, rc, a.seed);
  write_json(j, a.out_path);
  if (!a.out_path.empty()) std::cout << "report -> " << a.out_path << '\n';
  return 0;
}

struct BaselineArgs : Common {
  std::string kind;
  std::string real_dir;
  std::string out_dir;
  int count = 0;
  int swaps = 0;
};

int cmd_baseline(const BaselineArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  const auto real = hedge::load_batch(a.real_dir);
  require_uniform_shape(real.samples, "baseline");
  const std::string kind = a.kind.empty() ? rc.baseline_kind : a.kind;
  const int count = a.count > 0 ? a.count : static_cast<int>(real.samples.size());

  hedge::BaselineResult res;
  if (kind == "er_hg") {
    res = hedge::er_incidence(real.samples, count, hedge::rng::derive(a.seed, "baseline/er"));
  } else if (kind == "hcm_mcmc") {
    const int swaps = a.swaps > 0 ? a.swaps : rc.swaps_per_incidence;
    res = hedge::rewiring_baseline(real.samples, count, swaps,
                                   hedge::rng::derive(a.seed, "baseline/rewire"));
  } else {
    throw std::runtime_error("unknown baseline kind '" + kind + "' (er_hg or hcm_mcmc)");
  }

  hedge::BatchManifest manifest;
  manifest.kind = "baseline_" + kind;
  manifest.seed = a.seed;
  manifest.config_hash = rc.hash();
  manifest.extra = json{{"source", a.real_dir}, {"warnings", res.warnings}};
  hedge::save_batch(res.samples, a.out_dir, manifest);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "baseline " << kind << ": " << res.samples.size() << " samples -> " << a.out_dir << '\n';
  return 0;
}

struct SubsampleArgs : Common {
  std::string input;
  std::string out_dir;
  int n_sub = 0;
  int m_sub = 0;
  int count = 0;
};

int cmd_subsample(const SubsampleArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  const hedge::IncidenceMatrix full = hedge::load_incidence(a.input);
  hedge::SubsampleConfig sc;
  sc.n_sub = a.n_sub > 0 ? a.n_sub : rc.n_sub;
  sc.m_sub = a.m_sub > 0 ? a.m_sub : rc.m_sub;
  sc.count = a.count > 0 ? a.count : rc.subsample_count;
  sc.max_retries = rc.max_retries;
  sc.seed = hedge::rng::derive(a.seed, "subsample");
  const auto batch = hedge::sample_subhypergraphs(full, sc);

  hedge::BatchManifest manifest;
  manifest.kind = "subsample";
  manifest.seed = a.seed;
  manifest.config_hash = rc.hash();
  manifest.extra = json{{"source", a.input}, {"n_sub", sc.n_sub}, {"m_sub", sc.m_sub}};
  hedge::save_batch(batch, a.out_dir, manifest);
  std::cout << "subsampled " << batch.size() << " x (" << sc.n_sub << "x" << sc.m_sub << ") -> "
            << a.out_dir << '\n';
  return 0;
}

struct SynthArgs : Common {
  std::string regime;
  std::string out_dir;
  int n = 0, m = 0, count = 0;
};

int cmd_synth(const SynthArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  hedge::SynthConfig sc = rc.synth_config(hedge::rng::derive(a.seed, "synth"));
  if (!a.regime.empty()) sc.regime = hedge::regime_from_name(a.regime);
  if (a.n > 0) sc.n = a.n;
  if (a.m > 0) sc.m = a.m;
  if (a.count > 0) sc.count = a.count;
  const auto batch = hedge::synth_batch(sc);

  hedge::BatchManifest manifest;
  manifest.kind = "synth_" + hedge::regime_name(sc.regime);
  manifest.seed = a.seed;
  manifest.config_hash = rc.hash();
  manifest.extra = json{{"regime", hedge::regime_name(sc.regime)},
                        {"blocks", sc.blocks},
                        {"p_in", sc.p_in},
                        {"p_out", sc.p_out},
                        {"plant_fraction", sc.plant_fraction}};
  hedge::save_batch(batch, a.out_dir, manifest);
  std::cout << "synth " << hedge::regime_name(sc.regime) << ": " << batch.size() << " samples ("
            << sc.n << "x" << sc.m << ") -> " << a.out_dir << '\n';
  return 0;
}

struct ValidateArgs : Common {
  std::string out_path;
};

int cmd_validate(const ValidateArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  const hedge::ValidationReport rep = hedge::run_validation(a.seed);
  json j = rep.to_json();
  stamp(j, rc, a.seed);
  write_json(j, a.out_path);
  if (!a.out_path.empty()) {
    int failed = 0;
    for (const auto& c : rep.checks)
      if (!c.skipped && !c.passed) ++failed;
    std::cout << "report -> " << a.out_path << " (" << rep.checks.size() << " checks, " << failed
              << " failed)\n";
  }
  return rep.all_passed() ? 0 : 1;
}

struct AblateArgs : Common {
  std::string out_dir;
  std::string regime;
  std::string variants;
  int seeds = 0;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int cmd_ablate(const AblateArgs& a) {
  const hedge::RunConfig rc = load_config(a);
  const int seeds = a.seeds > 0 ? a.seeds : rc.ablate_seeds;
  const std::vector<std::string> variants = split_csv(a.variants.empty() ? rc.variants : a.variants);
  if (variants.empty()) throw std::runtime_error("ablate: no variants requested");

  hedge::SynthConfig regime_cfg = rc.synth_config(0);
  if (!a.regime.empty()) regime_cfg.regime = hedge::regime_from_name(a.regime);

  const std::vector<std::string> metric_names{
      "density_gap",   "degree_gap",        "size_gap",
      "degree_w1",     "size_w1",           "node_spectral_w1",
      "edge_spectral_w1", "intersection_tail_gap", "intersection_w1",
      "feature_mmd"};
  // values[variant][metric][seed]
  std::vector<std::vector<std::vector<double>>> values(
      variants.size(), std::vector<std::vector<double>>(metric_names.size()));

  for (int si = 0; si < seeds; ++si) {
    const std::uint64_t root = hedge::rng::derive(a.seed, "ablate", static_cast<std::uint64_t>(si));
    hedge::SynthConfig train_cfg = regime_cfg;
    train_cfg.count = rc.ablate_train_count;
    train_cfg.seed = hedge::rng::derive(root, "data/train");
    hedge::SynthConfig eval_cfg = regime_cfg;
    eval_cfg.count = rc.ablate_eval_count;
    eval_cfg.seed = hedge::rng::derive(root, "data/eval");
    const auto train_batch = hedge::synth_batch(train_cfg);
    const auto eval_batch = hedge::synth_batch(eval_cfg);
    const hedge::DiffusionConfig dcfg =
        rc.diffusion_config(regime_cfg.n, regime_cfg.m, pooled_density(train_batch));

    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      const hedge::OperatorMask mask = hedge::mask_from_name(variants[vi]);
      std::vector<hedge::ForwardProcess> bank;
      bank.reserve(train_batch.size());
      for (const auto& h : train_batch) bank.emplace_back(h, dcfg, mask);

      hedge::DriftNet::Config ncfg;
      ncfg.horizon = dcfg.horizon;
      hedge::DriftNet net(ncfg, hedge::rng::derive(root, "net", vi));
      const hedge::TrainConfig tc = rc.train_config(hedge::rng::derive(root, "train", vi));
      hedge::train(net, bank, tc);

      hedge::SampleConfig scfg = rc.sample_config(hedge::rng::derive(root, "gen", vi));
      scfg.count = rc.ablate_eval_count;
      const hedge::GenerationResult res = hedge::generate(net, dcfg, regime_cfg.n, regime_cfg.m, scfg);
      std::vector<hedge::IncidenceMatrix> gen;
      for (const auto& p : res.projected)
        if (p) gen.push_back(*p);
      if (gen.size() < 2)
        throw std::runtime_error("ablate: variant " + variants[vi] + " produced fewer than 2 samples");

      hedge::MetricOptions opts;
      opts.spectral_k = rc.spectral_k;
      const hedge::MetricReport rep = hedge::evaluate_batches(eval_batch, gen, opts);
      const double metric_values[] = {rep.density_gap,     rep.degree_gap,
                                      rep.size_gap,        rep.degree_w1,
                                      rep.size_w1,         rep.node_spectral_w1,
                                      rep.edge_spectral_w1, rep.intersection_tail_gap,
                                      rep.intersection_w1, rep.feature_mmd};
      for (std::size_t mi = 0; mi < metric_names.size(); ++mi) values[vi][mi].push_back(metric_values[mi]);
      std::cerr << "seed " << si << " variant " << variants[vi] << " done\n";
    }
  }

  json variants_json = json::object();
  std::cout << "regime " << hedge::regime_name(regime_cfg.regime) << ", " << seeds
            << " seeds; mean +/- SE per metric\n";
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    json metrics_json = json::object();
    std::cout << "  " << variants[vi] << ":\n";
    for (std::size_t mi = 0; mi < metric_names.size(); ++mi) {
      const auto& v = values[vi][mi];
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double se = v.size() > 1 ? std::sqrt(var / (v.size() - 1.0) / static_cast<double>(v.size())) : 0.0;
      metrics_json[metric_names[mi]] = json{{"mean", mean}, {"se", se}, {"values", v}};
      std::printf("    %-22s %.4f +/- %.4f\n", metric_names[mi].c_str(), mean, se);
    }
    variants_json[variants[vi]] = metrics_json;
  }
  json j{{"regime", hedge::regime_name(regime_cfg.regime)},
         {"seeds", seeds},
         {"train_count", rc.ablate_train_count},
         {"eval_count", rc.ablate_eval_count},
         {"variants", variants_json}};
  stamp(j, rc, a.seed);
  fs::create_directories(a.out_dir);
  write_json(j, (fs::path(a.out_dir) / "ablate_report.json").string());
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "run configuration file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "root seed for every substream");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured heat-OU diffusion over hypergraph incidence matrices"};
  app.set_version_flag("--version", std::string(hedge::kToolVersion));
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "fit the drift net on a batch directory");
  add_common(train, train_args);
  train->add_option("--data", train_args.data_dir, "training batch directory")->required();
  train->add_option("--out", train_args.out_dir, "output directory")->required();
  train->add_option("--mask", train_args.mask, "operator mask: full, ou_only, node_only, edge_only");
  train->add_option("--steps", train_args.steps_override, "override train.steps");

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "sample hypergraphs from a trained model");
  add_common(gen, gen_args);
  gen->add_option("--model", gen_args.model_path, "model.bin path")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_args.out_dir, "output batch directory")->required();
  gen->add_option("--count", gen_args.count_override, "override sample.count");
  gen->add_option("--steps", gen_args.steps_override, "override sample.steps");
  gen->add_option("--threshold", gen_args.threshold_override, "override sample.threshold");
  gen->add_flag("--save-relaxed", gen_args.save_relaxed, "also write relaxed terminal states");

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "compare a generated batch against a reference batch");
  add_common(eval, eval_args);
  eval->add_option("--real", eval_args.real_dir, "reference batch directory")->required();
  eval->add_option("--gen", eval_args.gen_dir, "generated batch directory")->required();
  eval->add_option("--out", eval_args.out_path, "report path (default: stdout)");

  BaselineArgs base_args;
  auto* base = app.add_subcommand("baseline", "density-matched or rewiring comparator batches");
  add_common(base, base_args);
  base->add_option("--kind", base_args.kind, "er_hg or hcm_mcmc");
  base->add_option("--real", base_args.real_dir, "reference batch directory")->required();
  base->add_option("--out", base_args.out_dir, "output batch directory")->required();
  base->add_option("--count", base_args.count, "samples to generate (default: reference count)");
  base->add_option("--swaps", base_args.swaps, "override baseline.swaps_per_incidence");

  SubsampleArgs sub_args;
  auto* sub = app.add_subcommand("subsample", "fixed-shape subhypergraphs from one incidence file");
  add_common(sub, sub_args);
  sub->add_option("--input", sub_args.input, "incidence file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", sub_args.out_dir, "output batch directory")->required();
  sub->add_option("--n-sub", sub_args.n_sub, "override subsample.n_sub");
  sub->add_option("--m-sub", sub_args.m_sub, "override subsample.m_sub");
  sub->add_option("--count", sub_args.count, "override subsample.count");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "synthetic regime batches");
  add_common(synth, synth_args);
  synth->add_option("--regime", synth_args.regime,
                    "configuration, overlapping_blocks, committee, sparse_tail_overlap");
  synth->add_option("--out", synth_args.out_dir, "output batch directory")->required();
  synth->add_option("--n", synth_args.n, "override regime.n");
  synth->add_option("--m", synth_args.m, "override regime.m");
  synth->add_option("--count", synth_args.count, "override regime.count");

  ValidateArgs val_args;
  auto* val = app.add_subcommand("validate", "run the numerical certificate battery");
  add_common(val, val_args);
  val->add_option("--out", val_args.out_path, "report path (default: stdout)");

  AblateArgs abl_args;
  auto* abl = app.add_subcommand("ablate", "train and score every operator mask on a synthetic regime");
  add_common(abl, abl_args);
  abl->add_option("--out", abl_args.out_dir, "output directory")->required();
  abl->add_option("--regime", abl_args.regime, "override regime.kind");
  abl->add_option("--seeds", abl_args.seeds, "override ablate.seeds");
  abl->add_option("--variants", abl_args.variants, "comma-separated mask list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (*train) return cmd_train(train_args);
    if (*gen) return cmd_generate(gen_args);
    if (*eval) return cmd_evaluate(eval_args);
    if (*base) return cmd_baseline(base_args);
    if (*sub) return cmd_subsample(sub_args);
    if (*synth) return cmd_synth(synth_args);
    if (*val) return cmd_validate(val_args);
    if (*abl) return cmd_ablate(abl_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
