#include "hedge/drift_net.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "hedge/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace hedge {

namespace {

constexpr char kMagic[7] = {'H', 'E', 'D', 'G', 'E', 'v', '1'};
constexpr double kPi = 3.14159265358979323846;

double spectral_norm(const mat_t& w) {
  if (w.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<mat_t> es(w.transpose() * w);
  const double top = es.eigenvalues().tail(1)[0];
  return top > 0.0 ? std::sqrt(top) : 0.0;
}

}  // namespace

struct DriftNet::Trace {
  // act[l] holds the channel stack entering layer l; act[L] is the output.
  std::vector<std::vector<mat_t>> act;
  // Linear outputs (bias included, before FiLM) per layer.
  std::vector<std::vector<mat_t>> linear;
  std::vector<double> embed, hidden, film;
};

DriftNet::DriftNet(Config cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  if (cfg_.widths.size() < 2 || cfg_.widths.front() != 1 || cfg_.widths.back() != 1) {
    throw std::invalid_argument("drift net: widths must run from 1 channel to 1 channel");
  }
  for (int w : cfg_.widths) {
    if (w < 1) throw std::invalid_argument("drift net: channel widths must be positive");
  }
  if (cfg_.time_embed_dim < 2 || cfg_.time_embed_dim % 2 != 0) {
    throw std::invalid_argument("drift net: time_embed_dim must be even and >= 2");
  }
  if (cfg_.time_hidden < 1) throw std::invalid_argument("drift net: time_hidden must be >= 1");
  if (!(cfg_.horizon > 0.0)) throw std::invalid_argument("drift net: horizon must be positive");

  const int num_layers = int(cfg_.widths.size()) - 1;
  std::size_t off = 0;
  for (int l = 0; l < num_layers; ++l) {
    LayerOffsets lo;
    lo.in = cfg_.widths[l];
    lo.out = cfg_.widths[l + 1];
    for (auto& w : lo.w) {
      w = off;
      off += std::size_t(lo.out) * lo.in;
    }
    lo.bias = off;
    off += lo.out;
    layers_.push_back(lo);
  }
  film_total_ = 0;
  for (int l = 0; l < num_layers - 1; ++l) film_total_ += 2 * cfg_.widths[l + 1];
  time_w1_ = off;
  off += std::size_t(cfg_.time_hidden) * cfg_.time_embed_dim;
  time_b1_ = off;
  off += cfg_.time_hidden;
  time_w2_ = off;
  off += std::size_t(film_total_) * cfg_.time_hidden;
  time_b2_ = off;
  off += film_total_;
  params_.assign(off, 0.0);

  // Random init: modest fan-in scaling over the four basis maps, zero biases,
  // zero FiLM head, zero final layer so the initial field vanishes.
  rng::Stream stream(rng::derive(seed, "drift_net/init"));
  for (int l = 0; l < num_layers; ++l) {
    if (l == num_layers - 1) continue;
    const double std_w = 1.0 / std::sqrt(4.0 * layers_[l].in);
    for (const auto w0 : layers_[l].w) {
      for (std::size_t k = 0; k < std::size_t(layers_[l].out) * layers_[l].in; ++k) {
        params_[w0 + k] = std_w * stream.normal();
      }
    }
  }
  const double std_t = 1.0 / std::sqrt(double(cfg_.time_embed_dim));
  for (std::size_t k = 0; k < std::size_t(cfg_.time_hidden) * cfg_.time_embed_dim; ++k) {
    params_[time_w1_ + k] = std_t * stream.normal();
  }
}

void DriftNet::film_at(double s, std::vector<double>& embed, std::vector<double>& hidden,
                       std::vector<double>& film) const {
  const double u = s / cfg_.horizon;
  embed.resize(cfg_.time_embed_dim);
  for (int k = 0; k < cfg_.time_embed_dim / 2; ++k) {
    const double w = kPi * double(1 << k);
    embed[2 * k] = std::sin(w * u);
    embed[2 * k + 1] = std::cos(w * u);
  }
  hidden.assign(cfg_.time_hidden, 0.0);
  for (int i = 0; i < cfg_.time_hidden; ++i) {
    double acc = params_[time_b1_ + i];
    const double* row = params_.data() + time_w1_ + std::size_t(i) * cfg_.time_embed_dim;
    for (int j = 0; j < cfg_.time_embed_dim; ++j) acc += row[j] * embed[j];
    hidden[i] = std::tanh(acc);
  }
  film.assign(film_total_, 0.0);
  for (int i = 0; i < film_total_; ++i) {
    double acc = params_[time_b2_ + i];
    const double* row = params_.data() + time_w2_ + std::size_t(i) * cfg_.time_hidden;
    for (int j = 0; j < cfg_.time_hidden; ++j) acc += row[j] * hidden[j];
    film[i] = acc;
  }
}

DriftNet::Trace DriftNet::run_forward(const mat_t& x, double s) const {
  if (s < 0.0 || s > cfg_.horizon) {
    throw std::invalid_argument("drift net: s outside [0, horizon]");
  }
  Trace tr;
  film_at(s, tr.embed, tr.hidden, tr.film);
  const Eigen::Index n = x.rows(), m = x.cols();
  const int num_layers = int(layers_.size());
  tr.act.resize(num_layers + 1);
  tr.linear.resize(num_layers);
  tr.act[0] = {x};

  int film_off = 0;
  for (int l = 0; l < num_layers; ++l) {
    const auto& lo = layers_[l];
    const auto& in = tr.act[l];
    // Equivariant features of each input channel.
    std::vector<mat_t> row_b(lo.in), col_b(lo.in), glob_b(lo.in);
    for (int i = 0; i < lo.in; ++i) {
      const vec_t rmean = in[i].rowwise().mean();
      const Eigen::RowVectorXd cmean = in[i].colwise().mean();
      row_b[i] = rmean.replicate(1, m);
      col_b[i] = cmean.replicate(n, 1);
      glob_b[i] = mat_t::Constant(n, m, in[i].mean());
    }
    auto& lin = tr.linear[l];
    lin.assign(lo.out, mat_t());
    auto& out = tr.act[l + 1];
    out.assign(lo.out, mat_t());
    const bool hidden_layer = l < num_layers - 1;
    for (int o = 0; o < lo.out; ++o) {
      mat_t y = mat_t::Constant(n, m, params_[lo.bias + o]);
      for (int i = 0; i < lo.in; ++i) {
        const std::size_t k = std::size_t(o) * lo.in + i;
        y += params_[lo.w[0] + k] * in[i];
        y += params_[lo.w[1] + k] * row_b[i];
        y += params_[lo.w[2] + k] * col_b[i];
        y += params_[lo.w[3] + k] * glob_b[i];
      }
      lin[o] = y;
      if (hidden_layer) {
        const double scale = tr.film[film_off + o];
        const double shift = tr.film[film_off + lo.out + o];
        out[o] = ((1.0 + scale) * y.array() + shift).tanh().matrix();
      } else {
        out[o] = std::move(y);
      }
    }
    if (hidden_layer) film_off += 2 * lo.out;
  }
  return tr;
}

mat_t DriftNet::forward(const mat_t& x, double s) const {
  return run_forward(x, s).act.back()[0];
}

mat_t DriftNet::backward(const mat_t& x, double s, const mat_t& upstream,
                         std::vector<double>& grads) const {
  if (grads.size() != params_.size()) {
    throw std::invalid_argument("drift net: gradient buffer size mismatch");
  }
  const Trace tr = run_forward(x, s);
  const Eigen::Index n = x.rows(), m = x.cols();
  const int num_layers = int(layers_.size());

  std::vector<double> dfilm(film_total_, 0.0);
  std::vector<mat_t> d_out = {upstream};

  int film_off = film_total_;
  for (int l = num_layers - 1; l >= 0; --l) {
    const auto& lo = layers_[l];
    const auto& in = tr.act[l];
    const bool hidden_layer = l < num_layers - 1;
    if (hidden_layer) film_off -= 2 * lo.out;

    // d wrt the linear output of this layer.
    std::vector<mat_t> d_lin(lo.out);
    for (int o = 0; o < lo.out; ++o) {
      if (hidden_layer) {
        const mat_t& a = tr.act[l + 1][o];
        const mat_t dz = (d_out[o].array() * (1.0 - a.array().square())).matrix();
        const double scale = tr.film[film_off + o];
        dfilm[film_off + o] += (dz.array() * tr.linear[l][o].array()).sum();
        dfilm[film_off + lo.out + o] += dz.sum();
        d_lin[o] = (1.0 + scale) * dz;
      } else {
        d_lin[o] = d_out[o];
      }
    }

    // Parameter gradients and the pass-through to the previous stack. The four
    // broadcast maps are self-adjoint, so the adjoint pass reuses them.
    std::vector<mat_t> d_in(lo.in, mat_t::Zero(n, m));
    std::vector<mat_t> row_b(lo.in), col_b(lo.in);
    std::vector<double> gmean(lo.in);
    for (int i = 0; i < lo.in; ++i) {
      row_b[i] = in[i].rowwise().mean().replicate(1, m);
      col_b[i] = in[i].colwise().mean().replicate(n, 1);
      gmean[i] = in[i].mean();
    }
    for (int o = 0; o < lo.out; ++o) {
      const mat_t& dy = d_lin[o];
      const double dy_sum = dy.sum();
      grads[lo.bias + o] += dy_sum;
      const mat_t dy_row = dy.rowwise().mean().replicate(1, m);
      const mat_t dy_col = dy.colwise().mean().replicate(n, 1);
      const double dy_mean = dy.mean();
      for (int i = 0; i < lo.in; ++i) {
        const std::size_t k = std::size_t(o) * lo.in + i;
        grads[lo.w[0] + k] += (dy.array() * in[i].array()).sum();
        grads[lo.w[1] + k] += (dy.array() * row_b[i].array()).sum();
        grads[lo.w[2] + k] += (dy.array() * col_b[i].array()).sum();
        grads[lo.w[3] + k] += dy_sum * gmean[i];
        d_in[i] += params_[lo.w[0] + k] * dy;
        d_in[i] += params_[lo.w[1] + k] * dy_row;
        d_in[i] += params_[lo.w[2] + k] * dy_col;
        d_in[i] += params_[lo.w[3] + k] * mat_t::Constant(n, m, dy_mean);
      }
    }
    d_out = std::move(d_in);
  }

  // Time-conditioning path.
  std::vector<double> dhidden(cfg_.time_hidden, 0.0);
  for (int i = 0; i < film_total_; ++i) {
    if (dfilm[i] == 0.0) continue;
    grads[time_b2_ + i] += dfilm[i];
    const std::size_t row = time_w2_ + std::size_t(i) * cfg_.time_hidden;
    for (int j = 0; j < cfg_.time_hidden; ++j) {
      grads[row + j] += dfilm[i] * tr.hidden[j];
      dhidden[j] += params_[row + j] * dfilm[i];
    }
  }
  for (int j = 0; j < cfg_.time_hidden; ++j) {
    const double dz = dhidden[j] * (1.0 - tr.hidden[j] * tr.hidden[j]);
    if (dz == 0.0) continue;
    grads[time_b1_ + j] += dz;
    const std::size_t row = time_w1_ + std::size_t(j) * cfg_.time_embed_dim;
    for (int k = 0; k < cfg_.time_embed_dim; ++k) grads[row + k] += dz * tr.embed[k];
  }

  return d_out[0];
}

double DriftNet::lipschitz_bound(double s) const {
  std::vector<double> embed, hidden, film;
  film_at(s, embed, hidden, film);
  const int num_layers = int(layers_.size());
  double bound = 1.0;
  int film_off = 0;
  for (int l = 0; l < num_layers; ++l) {
    const auto& lo = layers_[l];
    mat_t w1(lo.out, lo.in), w2(lo.out, lo.in), w3(lo.out, lo.in), w4(lo.out, lo.in);
    for (int o = 0; o < lo.out; ++o) {
      for (int i = 0; i < lo.in; ++i) {
        const std::size_t k = std::size_t(o) * lo.in + i;
        w1(o, i) = params_[lo.w[0] + k];
        w2(o, i) = params_[lo.w[1] + k];
        w3(o, i) = params_[lo.w[2] + k];
        w4(o, i) = params_[lo.w[3] + k];
      }
    }
    const bool hidden_layer = l < num_layers - 1;
    vec_t gains = vec_t::Ones(lo.out);
    if (hidden_layer) {
      for (int o = 0; o < lo.out; ++o) gains[o] = 1.0 + film[film_off + o];
      film_off += 2 * lo.out;
    }
    // The broadcasts are commuting orthogonal projections; their joint
    // eigenspaces split the layer map into these four channel matrices.
    const mat_t g = gains.asDiagonal();
    const double norm = std::max(
        std::max(spectral_norm(g * w1), spectral_norm(g * (w1 + w2))),
        std::max(spectral_norm(g * (w1 + w3)), spectral_norm(g * (w1 + w2 + w3 + w4))));
    bound *= norm;
  }
  return bound;
}

void DriftNet::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint8_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 1);
  const auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  put_u32(std::uint32_t(cfg_.widths.size()));
  for (int w : cfg_.widths) put_u32(std::uint32_t(w));
  put_u32(std::uint32_t(cfg_.time_embed_dim));
  put_u32(std::uint32_t(cfg_.time_hidden));
  out.write(reinterpret_cast<const char*>(&cfg_.horizon), 8);
  const std::uint64_t count = params_.size();
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(params_.data()), std::streamsize(count * 8));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

DriftNet DriftNet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a drift net checkpoint: " + path);
  }
  std::uint8_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 1);
  if (version != 1) throw std::runtime_error("unsupported checkpoint version");
  const auto get_u32 = [&] {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  Config cfg;
  cfg.widths.resize(get_u32());
  if (cfg.widths.size() < 2 || cfg.widths.size() > 64) {
    throw std::runtime_error("checkpoint header is corrupt");
  }
  for (auto& w : cfg.widths) w = int(get_u32());
  cfg.time_embed_dim = int(get_u32());
  cfg.time_hidden = int(get_u32());
  in.read(reinterpret_cast<char*>(&cfg.horizon), 8);
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 8);
  DriftNet net(cfg, 0);
  if (count != net.params_.size()) {
    throw std::runtime_error("checkpoint parameter count does not match its shape header");
  }
  in.read(reinterpret_cast<char*>(net.params_.data()), std::streamsize(count * 8));
  if (!in) throw std::runtime_error("checkpoint is truncated: " + path);
  return net;
}

}  // namespace hedge
