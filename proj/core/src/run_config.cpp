#include "hedge/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hedge {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
  }
  if (used != value.size()) throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
  return static_cast<int>(out);
}

struct Field {
  enum Kind { kDouble, kInt, kString } kind;
  void* target;
};

/// Schema in canonical order. Built per instance so the targets point into it.
std::map<std::string, Field> schema(RunConfig& c) {
  return {
      {"ablate.eval_count", {Field::kInt, &c.ablate_eval_count}},
      {"ablate.seeds", {Field::kInt, &c.ablate_seeds}},
      {"ablate.train_count", {Field::kInt, &c.ablate_train_count}},
      {"ablate.variants", {Field::kString, &c.variants}},
      {"baseline.kind", {Field::kString, &c.baseline_kind}},
      {"baseline.swaps_per_incidence", {Field::kInt, &c.swaps_per_incidence}},
      {"diffusion.gamma", {Field::kDouble, &c.gamma}},
      {"diffusion.horizon", {Field::kDouble, &c.horizon}},
      {"diffusion.quad_points", {Field::kInt, &c.quad_points}},
      {"diffusion.rho", {Field::kDouble, &c.rho}},
      {"diffusion.schedule", {Field::kString, &c.schedule}},
      {"diffusion.tau", {Field::kDouble, &c.tau}},
      {"metrics.spectral_k", {Field::kInt, &c.spectral_k}},
      {"regime.blocks", {Field::kInt, &c.blocks}},
      {"regime.count", {Field::kInt, &c.regime_count}},
      {"regime.kind", {Field::kString, &c.regime}},
      {"regime.m", {Field::kInt, &c.regime_m}},
      {"regime.n", {Field::kInt, &c.regime_n}},
      {"regime.p_in", {Field::kDouble, &c.p_in}},
      {"regime.p_out", {Field::kDouble, &c.p_out}},
      {"regime.plant_fraction", {Field::kDouble, &c.plant_fraction}},
      {"sample.count", {Field::kInt, &c.sample_count}},
      {"sample.steps", {Field::kInt, &c.sample_steps}},
      {"sample.threshold", {Field::kDouble, &c.threshold}},
      {"subsample.count", {Field::kInt, &c.subsample_count}},
      {"subsample.m_sub", {Field::kInt, &c.m_sub}},
      {"subsample.max_retries", {Field::kInt, &c.max_retries}},
      {"subsample.n_sub", {Field::kInt, &c.n_sub}},
      {"train.batch", {Field::kInt, &c.train_batch}},
      {"train.clip_quantile", {Field::kDouble, &c.clip_quantile}},
      {"train.clip_warmup", {Field::kInt, &c.clip_warmup}},
      {"train.log_every", {Field::kInt, &c.log_every}},
      {"train.lr", {Field::kDouble, &c.lr}},
      {"train.lr_end", {Field::kDouble, &c.lr_end}},
      {"train.steps", {Field::kInt, &c.train_steps}},
  };
}

}  // namespace

RunConfig RunConfig::from_text(const std::string& text, const std::string& label) {
  RunConfig cfg;
  auto fields = schema(cfg);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(label + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(label + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument(label + ":" + std::to_string(lineno) + ": key outside any [section]");
    const std::string full = section + "." + key;
    const auto it = fields.find(full);
    if (it == fields.end())
      throw std::invalid_argument(label + ":" + std::to_string(lineno) + ": unknown config key '" + full + "'");
    switch (it->second.kind) {
      case Field::kDouble: *static_cast<double*>(it->second.target) = parse_double(full, value); break;
      case Field::kInt: *static_cast<int*>(it->second.target) = parse_int(full, value); break;
      case Field::kString: *static_cast<std::string*>(it->second.target) = value; break;
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

std::string RunConfig::canonical() const {
  RunConfig copy = *this;
  auto fields = schema(copy);
  std::string out;
  char num[64];
  for (const auto& [key, field] : fields) {
    out += key;
    out += " = ";
    switch (field.kind) {
      case Field::kDouble:
        std::snprintf(num, sizeof num, "%.17g", *static_cast<const double*>(field.target));
        out += num;
        break;
      case Field::kInt:
        std::snprintf(num, sizeof num, "%d", *static_cast<const int*>(field.target));
        out += num;
        break;
      case Field::kString: out += *static_cast<const std::string*>(field.target); break;
    }
    out += '\n';
  }
  return out;
}

std::string RunConfig::hash() const {
  const std::string text = canonical();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DiffusionConfig RunConfig::diffusion_config(int n, int m, double rho_hat) const {
  const double density = rho > 0.0 ? rho : rho_hat;
  if (!(density > 0.0 && density < 1.0))
    throw std::invalid_argument("config: resolved density must be in (0, 1); set diffusion.rho or "
                                "use a reference batch that is neither empty nor full");
  DiffusionConfig cfg = make_default_config(n, m, density);
  cfg.horizon = horizon;
  cfg.gamma = gamma;
  cfg.tau = tau > 0.0 ? tau : gamma * density * (1.0 - density);
  cfg.schedule = schedule_from_name(schedule);
  cfg.quad_points = quad_points;
  return cfg;
}

TrainConfig RunConfig::train_config(std::uint64_t seed) const {
  TrainConfig cfg;
  cfg.steps = train_steps;
  cfg.batch = train_batch;
  cfg.lr = lr;
  cfg.lr_end = lr_end;
  cfg.clip_warmup = clip_warmup;
  cfg.clip_quantile = clip_quantile;
  cfg.log_every = log_every;
  cfg.seed = seed;
  return cfg;
}

SampleConfig RunConfig::sample_config(std::uint64_t seed) const {
  SampleConfig cfg;
  cfg.steps = sample_steps;
  cfg.count = sample_count;
  cfg.threshold = threshold;
  cfg.seed = seed;
  return cfg;
}

SynthConfig RunConfig::synth_config(std::uint64_t seed) const {
  SynthConfig cfg;
  cfg.regime = regime_from_name(regime);
  cfg.n = regime_n;
  cfg.m = regime_m;
  cfg.count = regime_count;
  cfg.blocks = blocks;
  cfg.p_in = p_in;
  cfg.p_out = p_out;
  cfg.plant_fraction = plant_fraction;
  cfg.seed = seed;
  return cfg;
}

}  // namespace hedge
