#include "motiondrift/model.hpp"

#include <cmath>

#include "motiondrift/errors.hpp"

namespace motiondrift {

namespace {

constexpr double kLayerNormEps = 1e-5;

template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <class T>
using ColVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using ConstMat = Eigen::Map<const SequenceMatrix<T>>;
template <class T>
using MutMat = Eigen::Map<SequenceMatrix<T>>;
template <class T>
using ConstRow = Eigen::Map<const RowVec<T>>;
template <class T>
using MutRow = Eigen::Map<RowVec<T>>;

template <class T>
SequenceMatrix<T> positional_encoding(std::size_t length, std::size_t width) {
  SequenceMatrix<T> pe(length, width);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / width);
      const double angle = static_cast<double>(pos) * rate;
      pe(pos, i) = static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <class T>
void layer_norm(const SequenceMatrix<T>& x, const ConstRow<T>& gain, const ConstRow<T>& bias,
                SequenceMatrix<T>& hat, ColVec<T>& inv, SequenceMatrix<T>& y) {
  const auto n = static_cast<T>(x.cols());
  const ColVec<T> mean = x.rowwise().sum() / n;
  hat = x.colwise() - mean;
  const ColVec<T> var = hat.array().square().rowwise().sum() / n;
  inv = (var.array() + static_cast<T>(kLayerNormEps)).rsqrt();
  hat = hat.array().colwise() * inv.array();
  y = (hat.array().rowwise() * gain.array()).rowwise() + bias.array();
}

template <class T>
SequenceMatrix<T> layer_norm_backward(const SequenceMatrix<T>& dy, const SequenceMatrix<T>& hat,
                                      const ColVec<T>& inv, const ConstRow<T>& gain,
                                      MutRow<T> dgain, MutRow<T> dbias) {
  const auto n = static_cast<T>(dy.cols());
  dgain += (dy.array() * hat.array()).colwise().sum().matrix();
  dbias += dy.colwise().sum();
  const SequenceMatrix<T> dhat = dy.array().rowwise() * gain.array();
  const ColVec<T> s1 = dhat.rowwise().sum();
  const ColVec<T> s2 = (dhat.array() * hat.array()).rowwise().sum();
  SequenceMatrix<T> dx = (dhat * n).colwise() - s1;
  dx -= (hat.array().colwise() * s2.array()).matrix();
  dx = dx.array().colwise() * (inv.array() / n);
  return dx;
}

template <class T>
void row_softmax(SequenceMatrix<T>& s) {
  const ColVec<T> m = s.rowwise().maxCoeff();
  s = (s.colwise() - m).array().exp();
  const ColVec<T> sum = s.rowwise().sum();
  s = s.array().colwise() / sum.array();
}

}  // namespace

void ModelConfig::validate() const {
  if (embedding_dim < 2) throw ConfigError("embedding_dim must be >= 2");
  if (gru_layers < 1) throw ConfigError("gru_layers must be >= 1");
  if (gru_hidden < 1) throw ConfigError("gru_hidden must be >= 1");
  if (tf_heads < 1) throw ConfigError("tf_heads must be >= 1");
  if (gru_hidden % tf_heads != 0) {
    throw ConfigError("tf_heads (" + std::to_string(tf_heads) +
                      ") must divide the transformer width gru_hidden (" +
                      std::to_string(gru_hidden) + ")");
  }
  if (tf_ff_dim < 1) throw ConfigError("tf_ff_dim must be >= 1");
  if (dense_hidden < 1) throw ConfigError("dense_hidden must be >= 1");
  if (!(frame_dropout >= 0.0 && frame_dropout < 1.0)) {
    throw ConfigError("frame_dropout must lie in [0, 1)");
  }
}

std::size_t ParameterLayout::add(std::string name, std::size_t rows, std::size_t cols) {
  tensors_.push_back({std::move(name), rows, cols, size_});
  size_ += rows * cols;
  return tensors_.size() - 1;
}

template <class T>
SequenceMatrix<T> window_matrix(const FeatureWindow& window) {
  SequenceMatrix<T> m(window.length, kFeatureCount);
  for (std::size_t i = 0; i < window.length; ++i) {
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      m(i, k) = static_cast<T>(window.values[i * kFeatureCount + k]);
    }
  }
  return m;
}

template SequenceMatrix<float> window_matrix<float>(const FeatureWindow&);
template SequenceMatrix<double> window_matrix<double>(const FeatureWindow&);

std::size_t frame_dropout(FeatureWindow& window, double p, Rng& rng) {
  std::size_t dropped = 0;
  if (p <= 0.0) return dropped;
  for (std::size_t i = 0; i < window.length; ++i) {
    if (bernoulli(rng, p)) {
      auto row = window.frame(i);
      std::fill(row.begin(), row.end(), 0.0f);
      ++dropped;
    }
  }
  return dropped;
}

template <class T>
struct EmbeddingNet<T>::Ids {
  struct Gru {
    std::size_t w_in, b_in, w_hid, b_hid;
  };
  struct Encoder {
    std::size_t qkv_w, qkv_b, out_w, out_b, ln1_g, ln1_b, ff1_w, ff1_b, ff2_w, ff2_b, ln2_g, ln2_b;
  };
  std::vector<Gru> gru;
  std::vector<Encoder> encoder;
  std::size_t dense1_w = 0, dense1_b = 0, dense2_w = 0, dense2_b = 0;
};

template <class T>
EmbeddingNet<T>::EmbeddingNet(const ModelConfig& config)
    : config_(config), ids_(std::make_unique<Ids>()) {
  config_.validate();
  const std::size_t h = config_.gru_hidden;
  std::size_t in = kFeatureCount;
  for (std::size_t l = 0; l < config_.gru_layers; ++l) {
    const std::string p = "gru" + std::to_string(l) + ".";
    ids_->gru.push_back({layout_.add(p + "w_in", in, 3 * h), layout_.add(p + "b_in", 1, 3 * h),
                         layout_.add(p + "w_hid", h, 3 * h), layout_.add(p + "b_hid", 1, 3 * h)});
    in = h;
  }
  const std::size_t f = config_.tf_ff_dim;
  for (std::size_t l = 0; l < config_.tf_layers; ++l) {
    const std::string p = "encoder" + std::to_string(l) + ".";
    typename Ids::Encoder e{};
    e.qkv_w = layout_.add(p + "qkv_w", h, 3 * h);
    e.qkv_b = layout_.add(p + "qkv_b", 1, 3 * h);
    e.out_w = layout_.add(p + "out_w", h, h);
    e.out_b = layout_.add(p + "out_b", 1, h);
    e.ln1_g = layout_.add(p + "ln1_gain", 1, h);
    e.ln1_b = layout_.add(p + "ln1_bias", 1, h);
    e.ff1_w = layout_.add(p + "ff1_w", h, f);
    e.ff1_b = layout_.add(p + "ff1_b", 1, f);
    e.ff2_w = layout_.add(p + "ff2_w", f, h);
    e.ff2_b = layout_.add(p + "ff2_b", 1, h);
    e.ln2_g = layout_.add(p + "ln2_gain", 1, h);
    e.ln2_b = layout_.add(p + "ln2_bias", 1, h);
    ids_->encoder.push_back(e);
  }
  ids_->dense1_w = layout_.add("dense1_w", h, config_.dense_hidden);
  ids_->dense1_b = layout_.add("dense1_b", 1, config_.dense_hidden);
  ids_->dense2_w = layout_.add("dense2_w", config_.dense_hidden, config_.embedding_dim);
  ids_->dense2_b = layout_.add("dense2_b", 1, config_.embedding_dim);
  weights_.assign(layout_.size(), T(0));
}

template <class T>
EmbeddingNet<T>::~EmbeddingNet() = default;
template <class T>
EmbeddingNet<T>::EmbeddingNet(const EmbeddingNet& o)
    : config_(o.config_), layout_(o.layout_), ids_(std::make_unique<Ids>(*o.ids_)), weights_(o.weights_) {}
template <class T>
EmbeddingNet<T>& EmbeddingNet<T>::operator=(const EmbeddingNet& o) {
  if (this != &o) {
    config_ = o.config_;
    layout_ = o.layout_;
    ids_ = std::make_unique<Ids>(*o.ids_);
    weights_ = o.weights_;
  }
  return *this;
}
template <class T>
EmbeddingNet<T>::EmbeddingNet(EmbeddingNet&&) noexcept = default;
template <class T>
EmbeddingNet<T>& EmbeddingNet<T>::operator=(EmbeddingNet&&) noexcept = default;

template <class T>
EmbeddingNet<T> EmbeddingNet<T>::init(const ModelConfig& config, std::uint64_t seed) {
  EmbeddingNet net(config);
  Rng rng = make_rng(seed, "model.init");
  for (const auto& spec : net.layout_.tensors()) {
    const bool gain = spec.name.ends_with("_gain");
    const bool ln_bias = spec.name.ends_with("ln1_bias") || spec.name.ends_with("ln2_bias");
    // Biases share the fan-in of the weight that precedes them.
    std::size_t fan_in = spec.rows;
    if (spec.rows == 1) {
      const auto& weight = net.layout_[&spec - net.layout_.tensors().data() - 1];
      fan_in = weight.rows;
    }
    if (spec.name.starts_with("gru")) fan_in = config.gru_hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < spec.size(); ++i) {
      T v;
      if (gain) {
        v = T(1);
      } else if (ln_bias) {
        v = T(0);
      } else {
        v = static_cast<T>(uniform(rng, -bound, bound));
      }
      net.weights_[spec.offset + i] = v;
    }
  }
  return net;
}

template <class T>
std::vector<T> EmbeddingNet<T>::forward(const Matrix& input) const {
  return run(input, nullptr);
}

template <class T>
std::vector<T> EmbeddingNet<T>::forward(const Matrix& input, Cache& cache) const {
  return run(input, &cache);
}

template <class T>
std::vector<T> EmbeddingNet<T>::run(const Matrix& input, Cache* cache) const {
  if (input.cols() != static_cast<Eigen::Index>(kFeatureCount) || input.rows() == 0) {
    throw InvalidInput("model input must be L x " + std::to_string(kFeatureCount) + ", got " +
                       std::to_string(input.rows()) + " x " + std::to_string(input.cols()));
  }
  const auto mat = [&](std::size_t id) {
    const auto& s = layout_[id];
    return ConstMat<T>(weights_.data() + s.offset, s.rows, s.cols);
  };
  const auto row = [&](std::size_t id) {
    const auto& s = layout_[id];
    return ConstRow<T>(weights_.data() + s.offset, s.cols);
  };
  const Eigen::Index len = input.rows();
  const Eigen::Index h = static_cast<Eigen::Index>(config_.gru_hidden);

  Cache local;
  Cache& c = cache ? *cache : local;
  c.length = static_cast<std::size_t>(len);
  c.gru.resize(config_.gru_layers);
  c.encoder.resize(config_.tf_layers);

  Matrix x = input;
  for (std::size_t l = 0; l < config_.gru_layers; ++l) {
    const auto& id = ids_->gru[l];
    auto& g = c.gru[l];
    const auto w_hid = mat(id.w_hid);
    const auto b_hid = row(id.b_hid);
    const Matrix gates_in = (x * mat(id.w_in)).rowwise() + row(id.b_in);
    g.r.resize(len, h);
    g.z.resize(len, h);
    g.n.resize(len, h);
    g.hn.resize(len, h);
    g.h.resize(len, h);
    RowVec<T> prev = RowVec<T>::Zero(h);
    RowVec<T> gh(3 * h);
    for (Eigen::Index t = 0; t < len; ++t) {
      gh.noalias() = prev * w_hid;
      gh += b_hid;
      for (Eigen::Index j = 0; j < h; ++j) {
        const T r = sigmoid(gates_in(t, j) + gh(j));
        const T z = sigmoid(gates_in(t, h + j) + gh(h + j));
        const T hn = gh(2 * h + j);
        const T n = std::tanh(gates_in(t, 2 * h + j) + r * hn);
        g.r(t, j) = r;
        g.z(t, j) = z;
        g.hn(t, j) = hn;
        g.n(t, j) = n;
        g.h(t, j) = (T(1) - z) * n + z * prev(j);
      }
      prev = g.h.row(t);
    }
    if (cache) g.input = std::move(x);
    x = g.h;
  }

  x += positional_encoding<T>(static_cast<std::size_t>(len), config_.gru_hidden);

  const Eigen::Index heads = static_cast<Eigen::Index>(config_.tf_heads);
  const Eigen::Index dk = h / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  for (std::size_t l = 0; l < config_.tf_layers; ++l) {
    const auto& id = ids_->encoder[l];
    auto& e = c.encoder[l];
    e.qkv = (x * mat(id.qkv_w)).rowwise() + row(id.qkv_b);
    e.concat.resize(len, h);
    e.probs.resize(static_cast<std::size_t>(heads));
    for (Eigen::Index hd = 0; hd < heads; ++hd) {
      Matrix& p = e.probs[static_cast<std::size_t>(hd)];
      p.noalias() = e.qkv.middleCols(hd * dk, dk) * e.qkv.middleCols(h + hd * dk, dk).transpose();
      p *= scale;
      row_softmax(p);
      e.concat.middleCols(hd * dk, dk).noalias() = p * e.qkv.middleCols(2 * h + hd * dk, dk);
    }
    Matrix residual = x + ((e.concat * mat(id.out_w)).rowwise() + row(id.out_b));
    layer_norm<T>(residual, row(id.ln1_g), row(id.ln1_b), e.hat1, e.inv1, e.x1);
    e.ff_pre = (e.x1 * mat(id.ff1_w)).rowwise() + row(id.ff1_b);
    e.ff_act = e.ff_pre.cwiseMax(T(0));
    residual = e.x1 + ((e.ff_act * mat(id.ff2_w)).rowwise() + row(id.ff2_b));
    e.input = std::move(x);
    layer_norm<T>(residual, row(id.ln2_g), row(id.ln2_b), e.hat2, e.inv2, x);
    if (!cache) e.probs.clear();
  }

  c.pooled = x.colwise().mean();
  c.hidden_pre = c.pooled * mat(ids_->dense1_w) + row(ids_->dense1_b);
  const RowVec<T> hidden = c.hidden_pre.cwiseMax(T(0));
  c.output = hidden * mat(ids_->dense2_w) + row(ids_->dense2_b);
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < c.output.size(); ++i) {
    norm2 += static_cast<double>(c.output(i)) * static_cast<double>(c.output(i));
  }
  const double norm = std::max(std::sqrt(norm2), 1e-12);
  c.output_norm = static_cast<T>(norm);
  std::vector<T> out(static_cast<std::size_t>(c.output.size()));
  for (Eigen::Index i = 0; i < c.output.size(); ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<T>(static_cast<double>(c.output(i)) / norm);
  }
  return out;
}

template <class T>
void EmbeddingNet<T>::backward(const Cache& c, std::span<const T> grad_embedding,
                               std::span<T> grad_out) const {
  if (grad_out.size() != weights_.size()) throw InvalidInput("gradient buffer has the wrong size");
  if (grad_embedding.size() != config_.embedding_dim) {
    throw InvalidInput("embedding gradient has the wrong size");
  }
  const auto mat = [&](std::size_t id) {
    const auto& s = layout_[id];
    return ConstMat<T>(weights_.data() + s.offset, s.rows, s.cols);
  };
  const auto row = [&](std::size_t id) {
    const auto& s = layout_[id];
    return ConstRow<T>(weights_.data() + s.offset, s.cols);
  };
  // Eigen's vectorized kernels round differently depending on the address
  // alignment of their operands, so gradients accumulate in an aligned
  // buffer and are added element-wise to the caller's at the end.
  WeightVector scratch(weights_.size(), T(0));
  const std::span<T> grad(scratch);
  const auto gmat = [&](std::size_t id) {
    const auto& s = layout_[id];
    return MutMat<T>(grad.data() + s.offset, s.rows, s.cols);
  };
  const auto grow = [&](std::size_t id) {
    const auto& s = layout_[id];
    return MutRow<T>(grad.data() + s.offset, s.cols);
  };
  const auto len = static_cast<Eigen::Index>(c.length);
  const Eigen::Index h = static_cast<Eigen::Index>(config_.gru_hidden);

  // L2 normalization.
  const RowVec<T> y = c.output / c.output_norm;
  const ConstRow<T> dy(grad_embedding.data(), static_cast<Eigen::Index>(grad_embedding.size()));
  const RowVec<T> d_out = (dy - y * y.dot(dy)) / c.output_norm;

  // Dense head.
  const RowVec<T> hidden = c.hidden_pre.cwiseMax(T(0));
  gmat(ids_->dense2_w).noalias() += hidden.transpose() * d_out;
  grow(ids_->dense2_b) += d_out;
  RowVec<T> d_hidden = d_out * mat(ids_->dense2_w).transpose();
  for (Eigen::Index i = 0; i < d_hidden.size(); ++i) {
    if (!(c.hidden_pre(i) > T(0))) d_hidden(i) = T(0);
  }
  gmat(ids_->dense1_w).noalias() += c.pooled.transpose() * d_hidden;
  grow(ids_->dense1_b) += d_hidden;
  const RowVec<T> d_pooled = d_hidden * mat(ids_->dense1_w).transpose();

  // Mean pool.
  Matrix dx = d_pooled.replicate(len, 1) / static_cast<T>(len);

  const Eigen::Index heads = static_cast<Eigen::Index>(config_.tf_heads);
  const Eigen::Index dk = h / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  for (std::size_t li = config_.tf_layers; li-- > 0;) {
    const auto& id = ids_->encoder[li];
    const auto& e = c.encoder[li];
    Matrix d_res2 = layer_norm_backward<T>(dx, e.hat2, e.inv2, row(id.ln2_g), grow(id.ln2_g),
                                           grow(id.ln2_b));
    // Feed-forward branch.
    gmat(id.ff2_w).noalias() += e.ff_act.transpose() * d_res2;
    grow(id.ff2_b) += d_res2.colwise().sum();
    Matrix d_ff = d_res2 * mat(id.ff2_w).transpose();
    d_ff = (e.ff_pre.array() > T(0)).select(d_ff, T(0));
    gmat(id.ff1_w).noalias() += e.x1.transpose() * d_ff;
    grow(id.ff1_b) += d_ff.colwise().sum();
    Matrix d_x1 = d_res2;
    d_x1.noalias() += d_ff * mat(id.ff1_w).transpose();
    Matrix d_res1 = layer_norm_backward<T>(d_x1, e.hat1, e.inv1, row(id.ln1_g), grow(id.ln1_g),
                                           grow(id.ln1_b));
    // Attention branch.
    gmat(id.out_w).noalias() += e.concat.transpose() * d_res1;
    grow(id.out_b) += d_res1.colwise().sum();
    const Matrix d_concat = d_res1 * mat(id.out_w).transpose();
    Matrix d_qkv(len, 3 * h);
    for (Eigen::Index hd = 0; hd < heads; ++hd) {
      const Matrix& p = e.probs[static_cast<std::size_t>(hd)];
      const auto q = e.qkv.middleCols(hd * dk, dk);
      const auto k = e.qkv.middleCols(h + hd * dk, dk);
      const auto v = e.qkv.middleCols(2 * h + hd * dk, dk);
      const auto d_o = d_concat.middleCols(hd * dk, dk);
      Matrix d_p = d_o * v.transpose();
      d_qkv.middleCols(2 * h + hd * dk, dk).noalias() = p.transpose() * d_o;
      const ColVec<T> dot = (d_p.array() * p.array()).rowwise().sum();
      d_p = (p.array() * (d_p.colwise() - dot).array()) * scale;
      d_qkv.middleCols(hd * dk, dk).noalias() = d_p * k;
      d_qkv.middleCols(h + hd * dk, dk).noalias() = d_p.transpose() * q;
    }
    gmat(id.qkv_w).noalias() += e.input.transpose() * d_qkv;
    grow(id.qkv_b) += d_qkv.colwise().sum();
    dx = d_res1;
    dx.noalias() += d_qkv * mat(id.qkv_w).transpose();
  }

  // Positional encoding is additive and constant; GRU stack in reverse.
  for (std::size_t li = config_.gru_layers; li-- > 0;) {
    const auto& id = ids_->gru[li];
    const auto& g = c.gru[li];
    const auto w_hid = mat(id.w_hid);
    Matrix d_gates_in(len, 3 * h);
    Matrix d_gates_hid(len, 3 * h);
    RowVec<T> carry = RowVec<T>::Zero(h);
    for (Eigen::Index t = len; t-- > 0;) {
      for (Eigen::Index j = 0; j < h; ++j) {
        const T dh = dx(t, j) + carry(j);
        const T r = g.r(t, j), z = g.z(t, j), n = g.n(t, j);
        const T prev = t > 0 ? g.h(t - 1, j) : T(0);
        const T dn_pre = dh * (T(1) - z) * (T(1) - n * n);
        const T dz_pre = dh * (prev - n) * z * (T(1) - z);
        const T dr_pre = dn_pre * g.hn(t, j) * r * (T(1) - r);
        d_gates_in(t, j) = dr_pre;
        d_gates_in(t, h + j) = dz_pre;
        d_gates_in(t, 2 * h + j) = dn_pre;
        d_gates_hid(t, j) = dr_pre;
        d_gates_hid(t, h + j) = dz_pre;
        d_gates_hid(t, 2 * h + j) = dn_pre * r;
        carry(j) = dh * z;
      }
      carry.noalias() += d_gates_hid.row(t) * w_hid.transpose();
    }
    if (len > 1) {
      gmat(id.w_hid).noalias() +=
          g.h.topRows(len - 1).transpose() * d_gates_hid.bottomRows(len - 1);
    }
    grow(id.b_hid) += d_gates_hid.colwise().sum();
    gmat(id.w_in).noalias() += g.input.transpose() * d_gates_in;
    grow(id.b_in) += d_gates_in.colwise().sum();
    if (li > 0) dx = d_gates_in * mat(id.w_in).transpose();
  }
  for (std::size_t i = 0; i < grad_out.size(); ++i) grad_out[i] += scratch[i];
}

template class EmbeddingNet<float>;
template class EmbeddingNet<double>;

std::vector<float> embed(const Model& model, const FeatureWindow& window) {
  return model.forward(window_matrix<float>(window));
}

}  // namespace motiondrift
