#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "motiondrift/encoding.hpp"
#include "motiondrift/random.hpp"

namespace motiondrift {

/// Hyperparameters of the embedding network. The transformer width equals
/// gru_hidden.
struct ModelConfig {
  std::size_t embedding_dim = 64;
  std::size_t gru_layers = 1;
  std::size_t gru_hidden = 64;
  std::size_t tf_layers = 2;
  std::size_t tf_heads = 4;
  std::size_t tf_ff_dim = 128;
  std::size_t dense_hidden = 64;
  double frame_dropout = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on inconsistent dimensions.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// Location of one named tensor inside the flat parameter vector.
struct TensorSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  [[nodiscard]] std::size_t size() const { return rows * cols; }
};

class ParameterLayout {
 public:
  std::size_t add(std::string name, std::size_t rows, std::size_t cols);
  [[nodiscard]] const std::vector<TensorSpec>& tensors() const { return tensors_; }
  [[nodiscard]] const TensorSpec& operator[](std::size_t id) const { return tensors_[id]; }
  [[nodiscard]] std::size_t size() const { return size_; }

 private:
  std::vector<TensorSpec> tensors_;
  std::size_t size_ = 0;
};

template <class T>
using SequenceMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Window values as an L x 18 matrix.
template <class T>
SequenceMatrix<T> window_matrix(const FeatureWindow& window);

/// Zero-masks each frame independently with probability p; sequence
/// length is preserved. Returns the number of masked frames.
std::size_t frame_dropout(FeatureWindow& window, double p, Rng& rng);

/// Frame dropout -> GRU stack -> sinusoidal positions -> post-norm
/// transformer encoder -> mean pool -> dense(ReLU) -> dense -> L2 norm.
///
/// Parameters live in one flat vector described by layout(); gradients use
/// the same layout. The forward pass is a pure function of (weights, input)
/// and may run concurrently on one network.
template <class T>
class EmbeddingNet {
 public:
  using Matrix = SequenceMatrix<T>;
  /// Aligned storage keeps vectorized arithmetic independent of where the
  /// allocator happens to place the weights.
  using WeightVector = std::vector<T, Eigen::aligned_allocator<T>>;
  struct Cache;

  explicit EmbeddingNet(const ModelConfig& config);
  ~EmbeddingNet();
  EmbeddingNet(const EmbeddingNet&);
  EmbeddingNet& operator=(const EmbeddingNet&);
  EmbeddingNet(EmbeddingNet&&) noexcept;
  EmbeddingNet& operator=(EmbeddingNet&&) noexcept;

  /// Uniform fan-in initialization, U(-1/sqrt(fan_in), 1/sqrt(fan_in));
  /// layer-norm gains 1 and offsets 0. Deterministic in `seed`.
  static EmbeddingNet init(const ModelConfig& config, std::uint64_t seed);

  [[nodiscard]] const ModelConfig& config() const { return config_; }
  [[nodiscard]] const ParameterLayout& layout() const { return layout_; }
  [[nodiscard]] WeightVector& weights() { return weights_; }
  [[nodiscard]] const WeightVector& weights() const { return weights_; }
  [[nodiscard]] std::size_t parameter_count() const { return weights_.size(); }

  /// Input is L x 18; throws InvalidInput for any other column count or L = 0.
  [[nodiscard]] std::vector<T> forward(const Matrix& input) const;
  /// Same computation, recording activations for backward().
  std::vector<T> forward(const Matrix& input, Cache& cache) const;
  /// Accumulates d(loss)/d(weights) into `grad` given d(loss)/d(embedding).
  void backward(const Cache& cache, std::span<const T> grad_embedding, std::span<T> grad) const;

  template <class U>
  [[nodiscard]] EmbeddingNet<U> cast() const {
    EmbeddingNet<U> out(config_);
    for (std::size_t i = 0; i < weights_.size(); ++i) out.weights()[i] = static_cast<U>(weights_[i]);
    return out;
  }

 private:
  struct Ids;
  std::vector<T> run(const Matrix& input, Cache* cache) const;

  ModelConfig config_;
  ParameterLayout layout_;
  std::unique_ptr<Ids> ids_;
  WeightVector weights_;
};

/// Recorded activations of one forward pass.
template <class T>
struct EmbeddingNet<T>::Cache {
  struct Gru {
    Matrix input, r, z, n, hn, h;
  };
  struct Encoder {
    Matrix input, qkv, concat, hat1, x1, ff_pre, ff_act, hat2;
    std::vector<Matrix> probs;
    Eigen::Matrix<T, Eigen::Dynamic, 1> inv1, inv2;
  };
  std::vector<Gru> gru;
  std::vector<Encoder> encoder;
  Eigen::Matrix<T, 1, Eigen::Dynamic> pooled, hidden_pre, output;
  T output_norm = T(1);
  std::size_t length = 0;
};

using Model = EmbeddingNet<float>;

/// Evaluation-mode embedding of a (standardized) window.
std::vector<float> embed(const Model& model, const FeatureWindow& window);

}  // namespace motiondrift
