#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajsim/nn.hpp"
#include "trajsim/raster.hpp"

namespace trajsim {

struct CaeConfig {
  int embedding_dim = 3;  // L
  double lambda1 = 0.15;
  double lambda2 = 0.85;
  int batch_size = 200;
  int epochs = 3000;
  double lr = 0.001;
  std::uint64_t seed = 0;
  int threads = 1;               // batch workers; output is identical for any value
  std::string optimizer = "adam";  // "adam" or "sgd"
};

struct Embedding {
  std::string id;
  std::vector<double> values;
};

/// Argmax records of the four encoder poolings, stage order. The decoder's
/// unpooling stages consume them in reverse.
struct PoolRecords {
  std::array<nn::PoolRecord, 4> stage;
};

nn::Tensor to_tensor(const TrajectoryImage& img);

/// The convolutional auto-encoder: four conv(9,7,5,3)/ReLU/maxpool encoder
/// stages with 16,16,8,8 filters, a dense bottleneck of dimension L, and the
/// mirrored dense + four unpool/deconv/ReLU decoder stages ending in one
/// output channel.
class CaeModel {
 public:
  CaeModel() = default;

  static CaeModel init(const GridSpec& grid, int embedding_dim, std::uint64_t seed);

  const GridSpec& grid() const { return grid_; }
  int embedding_dim() const { return enc_dense_.out; }

  /// Encoder pass. Throws if the image grid differs from the model grid.
  std::pair<std::vector<double>, PoolRecords> encode(const TrajectoryImage& img) const;

  /// Decoder pass; requires the pool records of the paired encode.
  /// Returns the real-valued reconstruction, shape (1, pad_w, pad_h).
  nn::Tensor decode(std::span<const double> embedding, const PoolRecords& recs) const;

  /// All intermediates of one encode+decode pass, kept for backpropagation.
  struct Cache {
    nn::Tensor x0;
    std::array<nn::Tensor, 4> enc_relu;
    std::array<nn::Tensor, 4> enc_pooled;
    PoolRecords recs;
    std::vector<double> embedding;
    std::vector<double> dec_flat;
    std::array<nn::Tensor, 4> dec_unpooled;
    std::array<nn::Tensor, 4> dec_relu;

    const nn::Tensor& output() const { return dec_relu[3]; }
  };

  Cache forward(const nn::Tensor& x0) const;

  /// Chain rule from d(loss)/d(output) down to every parameter; gradients
  /// accumulate into grad_flat (layout matching export_params).
  void backward(const Cache& cache, const nn::Tensor& grad_output, std::span<double> grad_flat) const;

  std::size_t param_count() const;
  void export_params(std::span<double> out) const;
  void import_params(std::span<const double> in);

  /// Binary model file: magic, version, grid, L, layer dimension table, then
  /// raw little-endian float64 parameters in declaration order.
  void save(const std::string& path) const;
  static CaeModel load(const std::string& path);

  // Layer access for composition-style tests.
  const nn::Conv2d& conv(int i) const { return conv_[i]; }
  const nn::Dense& encoder_dense() const { return enc_dense_; }
  const nn::Dense& decoder_dense() const { return dec_dense_; }
  const nn::Deconv2d& deconv(int i) const { return deconv_[i]; }

 private:
  GridSpec grid_;
  std::array<nn::Conv2d, 4> conv_;
  nn::Dense enc_dense_;
  nn::Dense dec_dense_;
  std::array<nn::Deconv2d, 4> deconv_;

  int bottleneck_h() const { return grid_.pad_w / 16; }
  int bottleneck_w() const { return grid_.pad_h / 16; }

  // Parameter blocks in declaration order; export/import, gradient layout
  // and the model file all share this traversal.
  template <typename Fn>
  void each_param_block(Fn&& fn) {
    for (auto& c : conv_) {
      fn(c.w);
      fn(c.b);
    }
    fn(enc_dense_.w);
    fn(enc_dense_.b);
    fn(dec_dense_.w);
    fn(dec_dense_.b);
    for (auto& d : deconv_) {
      fn(d.w);
      fn(d.b);
    }
  }
  template <typename Fn>
  void each_param_block(Fn&& fn) const {
    for (const auto& c : conv_) {
      fn(c.w);
      fn(c.b);
    }
    fn(enc_dense_.w);
    fn(enc_dense_.b);
    fn(dec_dense_.w);
    fn(dec_dense_.b);
    for (const auto& d : deconv_) {
      fn(d.w);
      fn(d.b);
    }
  }
};

// Reconstruction losses. Batch losses are means over per-image terms; images
// and reconstructions must share one shape.
double loss_l1(std::span<const nn::Tensor> batch_x, std::span<const nn::Tensor> batch_xhat);
double loss_mse(std::span<const nn::Tensor> batch_x, std::span<const nn::Tensor> batch_xhat);
double loss_hybrid(std::span<const nn::Tensor> batch_x, std::span<const nn::Tensor> batch_xhat,
                   double lambda1, double lambda2);

/// Global-statistics SSIM with c1=(0.01)^2, c2=(0.03)^2 for dynamic range 1.
double ssim(std::span<const double> x, std::span<const double> y);
double ssim(const nn::Tensor& x, const nn::Tensor& y);

/// Per-image hybrid term lambda1*MAE + lambda2*(1-SSIM) and its gradient with
/// respect to the reconstruction. Training reduces the batch mean of this.
std::pair<double, nn::Tensor> hybrid_with_grad(const nn::Tensor& x, const nn::Tensor& xhat,
                                               double lambda1, double lambda2);

struct TrainResult {
  CaeModel model;
  std::vector<double> epoch_loss;
  bool tail_rising = false;  // mean loss rose across the last 10% of epochs
};

/// Mini-batch training with epoch shuffling (seeded) and the configured
/// optimizer. All images must share the model grid. Throws Error
/// ("diverged; lower lr") when the loss stops being finite.
TrainResult train(const std::vector<TrajectoryImage>& images, const GridSpec& grid,
                  const CaeConfig& config);

/// Embeddings CSV: header `id,y1,...,yL`, 12-significant-digit values.
void write_embeddings_csv(const std::string& path, const std::vector<Embedding>& embs);
std::vector<Embedding> read_embeddings_csv(const std::string& path);

}  // namespace trajsim
