#pragma once

#include <Eigen/Dense>

#include "hcd/tensor.hpp"

namespace hcd {

// One 2D convolution layer: odd kernel, zero same-padding (pad = (k-1)/2),
// optional stride. Weights are (out_ch, in_ch, k, k), row-major.
struct ConvLayer {
  int in_ch = 0;
  int out_ch = 0;
  int k = 0;
  int stride = 1;
  Tensor weights;
  Eigen::VectorXd bias;
};

ConvLayer make_conv_layer(int in_ch, int out_ch, int k, int stride = 1);

Shape4 conv_out_shape(const ConvLayer& layer, const Shape4& in);

Tensor conv_forward(const ConvLayer& layer, const Tensor& in);
Tensor conv_backward_input(const ConvLayer& layer, const Tensor& grad_out,
                           const Shape4& in_shape);

struct ConvParamGrads {
  Tensor dw;
  Eigen::VectorXd db;
};

ConvParamGrads conv_backward_params(const ConvLayer& layer, const Tensor& input,
                                    const Tensor& grad_out);

// ReLU with subgradient 0 at exactly 0.
Tensor relu(const Tensor& t);
Tensor relu_backward(const Tensor& grad, const Tensor& preact);

// (B, s*s*C, H, W) -> (B, C, H*s, W*s); input channel c*s*s + dy*s + dx
// lands at spatial offset (dy, dx) of output channel c.
Tensor depth_to_space(const Tensor& t, int s);
Tensor space_to_depth(const Tensor& t, int s);  // exact inverse

}  // namespace hcd
