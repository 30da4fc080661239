#include "trajsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "trajsim/error.hpp"

namespace trajsim::nn {

namespace {

// Zero-padded per-channel copy with margin p. All hot kernels below gather
// from this so their inner loops run branch-free over full rows.
struct Padded {
  int c = 0, ph = 0, pw = 0;
  std::vector<double> v;

  const double* plane(int ci) const { return v.data() + static_cast<std::size_t>(ci) * ph * pw; }
};

Padded pad_copy(const Tensor& x, int p) {
  Padded out;
  out.c = x.c;
  out.ph = x.h + 2 * p;
  out.pw = x.w + 2 * p;
  out.v.assign(static_cast<std::size_t>(out.c) * out.ph * out.pw, 0.0);
  for (int c = 0; c < x.c; ++c) {
    const double* src = x.plane(c);
    double* dst = out.v.data() + static_cast<std::size_t>(c) * out.ph * out.pw;
    for (int y = 0; y < x.h; ++y)
      std::memcpy(dst + static_cast<std::size_t>(y + p) * out.pw + p,
                  src + static_cast<std::size_t>(y) * x.w, sizeof(double) * x.w);
  }
  return out;
}

// out[o][y][x] = bias[o] + sum_c sum_{u,v} wgt[((o*ic+c)*k+u)*k+v] * pad[c][y+u][x+v]
template <int K>
void gather_fixed(const Padded& pad, int ic, int H, int W, const double* wgt,
                  const double* bias, int oc, Tensor& out) {
  for (int o = 0; o < oc; ++o) {
    double* op = out.plane(o);
    const double b = bias ? bias[o] : 0.0;
    for (int i = 0; i < H * W; ++i) op[i] = b;
    for (int c = 0; c < ic; ++c) {
      const double* inp = pad.plane(c);
      const double* wb = wgt + (static_cast<std::size_t>(o) * ic + c) * K * K;
      for (int u = 0; u < K; ++u) {
        const double* wrow = wb + u * K;
        for (int y = 0; y < H; ++y) {
          const double* prow = inp + static_cast<std::size_t>(y + u) * pad.pw;
          double* orow = op + static_cast<std::size_t>(y) * W;
          for (int x = 0; x < W; ++x) {
            double acc = 0.0;
#pragma GCC unroll 9
            for (int v = 0; v < K; ++v) acc += wrow[v] * prow[x + v];
            orow[x] += acc;
          }
        }
      }
    }
  }
}

void gather_any(const Padded& pad, int ic, int H, int W, const double* wgt,
                const double* bias, int oc, int k, Tensor& out) {
  for (int o = 0; o < oc; ++o) {
    double* op = out.plane(o);
    const double b = bias ? bias[o] : 0.0;
    for (int i = 0; i < H * W; ++i) op[i] = b;
    for (int c = 0; c < ic; ++c) {
      const double* inp = pad.plane(c);
      const double* wb = wgt + (static_cast<std::size_t>(o) * ic + c) * k * k;
      for (int u = 0; u < k; ++u) {
        const double* wrow = wb + u * k;
        for (int y = 0; y < H; ++y) {
          const double* prow = inp + static_cast<std::size_t>(y + u) * pad.pw;
          double* orow = op + static_cast<std::size_t>(y) * W;
          for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            for (int v = 0; v < k; ++v) acc += wrow[v] * prow[x + v];
            orow[x] += acc;
          }
        }
      }
    }
  }
}

void gather(const Padded& pad, int ic, int H, int W, const double* wgt, const double* bias,
            int oc, int k, Tensor& out) {
  switch (k) {
    case 3: gather_fixed<3>(pad, ic, H, W, wgt, bias, oc, out); break;
    case 5: gather_fixed<5>(pad, ic, H, W, wgt, bias, oc, out); break;
    case 7: gather_fixed<7>(pad, ic, H, W, wgt, bias, oc, out); break;
    case 9: gather_fixed<9>(pad, ic, H, W, wgt, bias, oc, out); break;
    default: gather_any(pad, ic, H, W, wgt, bias, oc, k, out); break;
  }
}

// dst[o][c][u][v] = sum_{y,x} gy[o][y][x] * pad[c][y+u][x+v]
// Eight explicit accumulator lanes: the reduction order is fixed by the code,
// not the compiler, so results are deterministic and the loop vectorizes.
void weight_dot(const Padded& pad, const Tensor& gy, int k, double* dst) {
  const int H = gy.h, W = gy.w;
  for (int o = 0; o < gy.c; ++o) {
    const double* gp = gy.plane(o);
    for (int c = 0; c < pad.c; ++c) {
      const double* inp = pad.plane(c);
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) {
          double lanes[8] = {0, 0, 0, 0, 0, 0, 0, 0};
          for (int y = 0; y < H; ++y) {
            const double* grow = gp + static_cast<std::size_t>(y) * W;
            const double* prow = inp + static_cast<std::size_t>(y + u) * pad.pw + v;
            int x = 0;
            for (; x + 8 <= W; x += 8) {
#pragma GCC unroll 8
              for (int j = 0; j < 8; ++j) lanes[j] += grow[x + j] * prow[x + j];
            }
            for (; x < W; ++x) lanes[x & 7] += grow[x] * prow[x];
          }
          double s = 0.0;
          for (double lane : lanes) s += lane;
          dst[((static_cast<std::size_t>(o) * pad.c + c) * k + u) * k + v] = s;
        }
      }
    }
  }
}

// dst[b][a][k-1-u][k-1-v] = src[a][b][u][v]: the reindexing that turns conv
// weights into the gather table of their adjoint (and back).
std::vector<double> swap_flip(const double* src, int a, int b, int k) {
  std::vector<double> dst(static_cast<std::size_t>(a) * b * k * k);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j)
      for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v)
          dst[((static_cast<std::size_t>(j) * a + i) * k + (k - 1 - u)) * k + (k - 1 - v)] =
              src[((static_cast<std::size_t>(i) * b + j) * k + u) * k + v];
  return dst;
}

void check_odd(int k) {
  if (k < 1 || k % 2 == 0) throw Error("conv: kernel size must be odd and positive");
}

void plane_sums(const Tensor& gy, std::span<double> gb) {
  for (int o = 0; o < gy.c; ++o) {
    const double* gp = gy.plane(o);
    double s = 0.0;
    for (int i = 0; i < gy.h * gy.w; ++i) s += gp[i];
    gb[o] += s;
  }
}

}  // namespace

Conv2d::Conv2d(int in_ch_, int out_ch_, int k_) : in_ch(in_ch_), out_ch(out_ch_), k(k_) {
  check_odd(k);
  w.assign(static_cast<std::size_t>(out_ch) * in_ch * k * k, 0.0);
  b.assign(out_ch, 0.0);
}

Tensor Conv2d::forward(const Tensor& x) const {
  if (x.c != in_ch) throw Error("conv: channel mismatch");
  Tensor out(out_ch, x.h, x.w);
  Padded pad = pad_copy(x, k / 2);
  gather(pad, in_ch, x.h, x.w, w.data(), b.data(), out_ch, k, out);
  return out;
}

Tensor Conv2d::backward(const Tensor& x, const Tensor& gy, std::span<double> gw,
                        std::span<double> gb) const {
  if (x.c != in_ch || gy.c != out_ch || gy.h != x.h || gy.w != x.w)
    throw Error("conv backward: shape mismatch");
  if (gw.size() != w.size() || gb.size() != b.size())
    throw Error("conv backward: gradient buffer mismatch");

  Padded pad_x = pad_copy(x, k / 2);
  std::vector<double> scratch(w.size());
  weight_dot(pad_x, gy, k, scratch.data());
  for (std::size_t i = 0; i < scratch.size(); ++i) gw[i] += scratch[i];
  plane_sums(gy, gb);

  Tensor gx(in_ch, x.h, x.w);
  Padded pad_gy = pad_copy(gy, k / 2);
  std::vector<double> wt = swap_flip(w.data(), out_ch, in_ch, k);
  gather(pad_gy, out_ch, x.h, x.w, wt.data(), nullptr, in_ch, k, gx);
  return gx;
}

Deconv2d::Deconv2d(int in_ch_, int out_ch_, int k_) : in_ch(in_ch_), out_ch(out_ch_), k(k_) {
  check_odd(k);
  w.assign(static_cast<std::size_t>(in_ch) * out_ch * k * k, 0.0);
  b.assign(out_ch, 0.0);
}

Tensor Deconv2d::forward(const Tensor& x) const {
  if (x.c != in_ch) throw Error("deconv: channel mismatch");
  Tensor out(out_ch, x.h, x.w);
  Padded pad = pad_copy(x, k / 2);
  std::vector<double> wt = swap_flip(w.data(), in_ch, out_ch, k);
  gather(pad, in_ch, x.h, x.w, wt.data(), b.data(), out_ch, k, out);
  return out;
}

Tensor Deconv2d::backward(const Tensor& x, const Tensor& gy, std::span<double> gw,
                          std::span<double> gb) const {
  if (x.c != in_ch || gy.c != out_ch || gy.h != x.h || gy.w != x.w)
    throw Error("deconv backward: shape mismatch");
  if (gw.size() != w.size() || gb.size() != b.size())
    throw Error("deconv backward: gradient buffer mismatch");

  // d/dw: dot of gy against the input with flipped taps, stored transposed.
  Padded pad_x = pad_copy(x, k / 2);
  std::vector<double> dot(w.size());
  weight_dot(pad_x, gy, k, dot.data());  // dot[oc][ic][u'][v']
  std::vector<double> reordered = swap_flip(dot.data(), out_ch, in_ch, k);
  for (std::size_t i = 0; i < reordered.size(); ++i) gw[i] += reordered[i];
  plane_sums(gy, gb);

  // d/dx of the adjoint is the forward conv with the stored weights.
  Tensor gx(in_ch, x.h, x.w);
  Padded pad_gy = pad_copy(gy, k / 2);
  gather(pad_gy, out_ch, x.h, x.w, w.data(), nullptr, in_ch, k, gx);
  return gx;
}

Dense::Dense(int in_, int out_) : in(in_), out(out_) {
  w.assign(static_cast<std::size_t>(out) * in, 0.0);
  b.assign(out, 0.0);
}

std::vector<double> Dense::forward(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(in)) throw Error("dense: input size mismatch");
  std::vector<double> y(out);
  for (int o = 0; o < out; ++o) {
    const double* wr = w.data() + static_cast<std::size_t>(o) * in;
    double acc = b[o];
    for (int i = 0; i < in; ++i) acc += wr[i] * x[i];
    y[o] = acc;
  }
  return y;
}

std::vector<double> Dense::backward(std::span<const double> x, std::span<const double> gy,
                                    std::span<double> gw, std::span<double> gb) const {
  if (x.size() != static_cast<std::size_t>(in) || gy.size() != static_cast<std::size_t>(out))
    throw Error("dense backward: shape mismatch");
  std::vector<double> gx(in, 0.0);
  for (int o = 0; o < out; ++o) {
    double g = gy[o];
    gb[o] += g;
    const double* wr = w.data() + static_cast<std::size_t>(o) * in;
    double* gwr = gw.data() + static_cast<std::size_t>(o) * in;
    for (int i = 0; i < in; ++i) {
      gwr[i] += g * x[i];
      gx[i] += g * wr[i];
    }
  }
  return gx;
}

std::pair<Tensor, PoolRecord> maxpool2(const Tensor& x) {
  if (x.h % 2 != 0 || x.w % 2 != 0) throw Error("maxpool2: dimensions must be even");
  Tensor out(x.c, x.h / 2, x.w / 2);
  PoolRecord rec;
  rec.c = x.c;
  rec.in_h = x.h;
  rec.in_w = x.w;
  rec.argmax.resize(out.size());
  std::size_t oi = 0;
  for (int c = 0; c < x.c; ++c) {
    const double* ip = x.plane(c);
    for (int y = 0; y < out.h; ++y) {
      for (int xx = 0; xx < out.w; ++xx) {
        int base = (2 * y) * x.w + 2 * xx;
        int cand[4] = {base, base + 1, base + x.w, base + x.w + 1};
        int best = cand[0];
        for (int j = 1; j < 4; ++j)
          if (ip[cand[j]] > ip[best]) best = cand[j];  // strict: ties keep lowest index
        out.v[oi] = ip[best];
        rec.argmax[oi] = best;
        ++oi;
      }
    }
  }
  return {std::move(out), std::move(rec)};
}

Tensor maxpool2_backward(const PoolRecord& rec, const Tensor& gy) {
  if (gy.c != rec.c || gy.h != rec.in_h / 2 || gy.w != rec.in_w / 2)
    throw Error("maxpool2 backward: record mismatch");
  Tensor gx(rec.c, rec.in_h, rec.in_w);
  std::size_t oi = 0;
  for (int c = 0; c < rec.c; ++c) {
    double* gp = gx.plane(c);
    for (int i = 0; i < gy.h * gy.w; ++i, ++oi) gp[rec.argmax[oi]] += gy.v[oi];
  }
  return gx;
}

Tensor unpool2(const Tensor& x, const PoolRecord& rec) {
  if (rec.empty()) throw Error("unpool2: missing pool record");
  if (x.c != rec.c || x.h != rec.in_h / 2 || x.w != rec.in_w / 2)
    throw Error("unpool2: record shape mismatch");
  Tensor out(rec.c, rec.in_h, rec.in_w);
  std::size_t oi = 0;
  for (int c = 0; c < rec.c; ++c) {
    double* op = out.plane(c);
    for (int i = 0; i < x.h * x.w; ++i, ++oi) op[rec.argmax[oi]] = x.v[oi];
  }
  return out;
}

Tensor unpool2_backward(const PoolRecord& rec, const Tensor& gy) {
  if (gy.c != rec.c || gy.h != rec.in_h || gy.w != rec.in_w)
    throw Error("unpool2 backward: record mismatch");
  Tensor gx(rec.c, rec.in_h / 2, rec.in_w / 2);
  std::size_t oi = 0;
  for (int c = 0; c < rec.c; ++c) {
    const double* gp = gy.plane(c);
    for (int i = 0; i < gx.h * gx.w; ++i, ++oi) gx.v[oi] = gp[rec.argmax[oi]];
  }
  return gx;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.v) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& out, const Tensor& gy) {
  if (!out.same_shape(gy)) throw Error("relu backward: shape mismatch");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i)
    if (!(out.v[i] > 0.0)) gx.v[i] = 0.0;
  return gx;
}

void glorot_fill(std::span<double> w, int fan_in, int fan_out, std::mt19937_64& rng) {
  double s = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-s, s);
  for (auto& v : w) v = dist(rng);
}

Adam::Adam(std::size_t param_count, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(param_count, 0.0), v_(param_count, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw Error("adam: parameter count mismatch");
  ++t_;
  double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    if (!std::isfinite(g)) throw Error("diverged: non-finite gradient");
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

void Sgd::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw Error("sgd: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(grads[i])) throw Error("diverged: non-finite gradient");
    params[i] -= lr_ * grads[i];
  }
}

}  // namespace trajsim::nn
