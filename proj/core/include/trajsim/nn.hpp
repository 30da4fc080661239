#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace trajsim::nn {

/// Dense row-major (channels, rows, cols) value block. Rank-1 data uses a
/// plain std::vector<double> instead.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}

  std::size_t size() const { return v.size(); }
  double* plane(int ci) { return v.data() + static_cast<std::size_t>(ci) * h * w; }
  const double* plane(int ci) const { return v.data() + static_cast<std::size_t>(ci) * h * w; }
  double& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
  double at(int ci, int y, int x) const { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

/// Argmax locations of one 2x2 max-pooling pass: for every output cell the
/// flat row-major index of the winning cell inside the input plane.
struct PoolRecord {
  int c = 0, in_h = 0, in_w = 0;
  std::vector<int> argmax;  // size c * (in_h/2) * (in_w/2)

  bool empty() const { return argmax.empty(); }
};

/// Same-padding 2D convolution, odd kernel, stride 1. Output spatial size
/// equals input; weights laid out [out_ch][in_ch][k][k].
struct Conv2d {
  int in_ch = 0, out_ch = 0, k = 0;
  std::vector<double> w;
  std::vector<double> b;

  Conv2d() = default;
  Conv2d(int in_ch_, int out_ch_, int k_);

  Tensor forward(const Tensor& x) const;
  /// Accumulates parameter gradients into gw/gb (same layouts as w/b) and
  /// returns the gradient with respect to the input.
  Tensor backward(const Tensor& x, const Tensor& gy, std::span<double> gw, std::span<double> gb) const;
};

/// Adjoint of a same-padding convolution ("DeConv"): forward applies the
/// transpose of the conv that would map out_ch -> in_ch, so spatial size is
/// preserved and <conv(x), y> == <x, deconv(y)> holds for shared weights.
/// Weights laid out [in_ch][out_ch][k][k].
struct Deconv2d {
  int in_ch = 0, out_ch = 0, k = 0;
  std::vector<double> w;
  std::vector<double> b;

  Deconv2d() = default;
  Deconv2d(int in_ch_, int out_ch_, int k_);

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy, std::span<double> gw, std::span<double> gb) const;
};

/// Fully-connected layer, weights [out][in].
struct Dense {
  int in = 0, out = 0;
  std::vector<double> w;
  std::vector<double> b;

  Dense() = default;
  Dense(int in_, int out_);

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> backward(std::span<const double> x, std::span<const double> gy,
                               std::span<double> gw, std::span<double> gb) const;
};

/// 2x2 max-pool; input dims must be even. Ties pick the lowest row-major
/// index in the window.
std::pair<Tensor, PoolRecord> maxpool2(const Tensor& x);
Tensor maxpool2_backward(const PoolRecord& rec, const Tensor& gy);

/// Places each value at its recorded argmax location, zero elsewhere.
Tensor unpool2(const Tensor& x, const PoolRecord& rec);
Tensor unpool2_backward(const PoolRecord& rec, const Tensor& gy);

Tensor relu(const Tensor& x);
/// Subgradient at 0 is 0; the mask comes from the forward output.
Tensor relu_backward(const Tensor& out, const Tensor& gy);

/// Uniform +-sqrt(6/(fan_in+fan_out)) fill.
void glorot_fill(std::span<double> w, int fan_in, int fan_out, std::mt19937_64& rng);

/// Adam with bias correction over a flat parameter vector. Deterministic
/// given identical state and inputs. Throws Error on non-finite gradients.
class Adam {
 public:
  explicit Adam(std::size_t param_count, double lr = 1e-3, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grads);
  double lr() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// Plain gradient descent, provided as the ablation optimizer.
class Sgd {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(std::span<double> params, std::span<const double> grads);

 private:
  double lr_;
};

}  // namespace trajsim::nn
