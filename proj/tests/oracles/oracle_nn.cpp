#include "oracle_nn.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

using trajsim::nn::Tensor;

Tensor conv2d_loops(const Tensor& x, const std::vector<double>& w, const std::vector<double>& b,
                    int out_ch, int in_ch, int k) {
  const int p = k / 2;
  Tensor out(out_ch, x.h, x.w);
  for (int o = 0; o < out_ch; ++o)
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = b[o];
        for (int c = 0; c < in_ch; ++c)
          for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v) {
              int sy = y + u - p, sx = xx + v - p;
              if (sy < 0 || sy >= x.h || sx < 0 || sx >= x.w) continue;
              acc += w[((static_cast<std::size_t>(o) * in_ch + c) * k + u) * k + v] * x.at(c, sy, sx);
            }
        out.at(o, y, xx) = acc;
      }
  return out;
}

std::pair<Tensor, std::vector<int>> maxpool2_loops(const Tensor& x) {
  Tensor out(x.c, x.h / 2, x.w / 2);
  std::vector<int> argmax(out.size());
  std::size_t oi = 0;
  for (int c = 0; c < x.c; ++c)
    for (int y = 0; y < out.h; ++y)
      for (int xx = 0; xx < out.w; ++xx) {
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            int sy = 2 * y + dy, sx = 2 * xx + dx;
            double v = x.at(c, sy, sx);
            if (v > best) {
              best = v;
              best_idx = sy * x.w + sx;
            }
          }
        out.v[oi] = best;
        argmax[oi] = best_idx;
        ++oi;
      }
  return {std::move(out), std::move(argmax)};
}

Tensor unpool2_loops(const Tensor& x, const std::vector<int>& argmax, int in_h, int in_w) {
  Tensor out(x.c, in_h, in_w);
  std::size_t oi = 0;
  for (int c = 0; c < x.c; ++c)
    for (int i = 0; i < x.h * x.w; ++i, ++oi) out.plane(c)[argmax[oi]] = x.v[oi];
  return out;
}

double central_diff(double* param, double step, const std::function<double()>& f) {
  const double orig = *param;
  *param = orig + step;
  double fp = f();
  *param = orig - step;
  double fm = f();
  *param = orig;
  return (fp - fm) / (2.0 * step);
}

double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle
