#pragma once

#include <functional>
#include <vector>

#include "trajsim/nn.hpp"

namespace oracle {

/// Six-nested-loop same-padding convolution, the slowest possible spelling
/// of the definition.
trajsim::nn::Tensor conv2d_loops(const trajsim::nn::Tensor& x, const std::vector<double>& w,
                                 const std::vector<double>& b, int out_ch, int in_ch, int k);

/// Per-window loop max pooling; returns values and per-window argmax (flat
/// index within the channel plane, lowest index on ties).
std::pair<trajsim::nn::Tensor, std::vector<int>> maxpool2_loops(const trajsim::nn::Tensor& x);

/// Scatter by explicit loops.
trajsim::nn::Tensor unpool2_loops(const trajsim::nn::Tensor& x, const std::vector<int>& argmax,
                                  int in_h, int in_w);

/// Central finite difference of f around the current value of *param.
double central_diff(double* param, double step, const std::function<double()>& f);

/// |a-b| relative to max(|a|,|b|,floor): the gradient-check comparison.
double rel_err(double a, double b, double floor = 1e-3);

}  // namespace oracle
