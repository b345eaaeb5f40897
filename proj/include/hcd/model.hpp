#pragma once

#include <string>
#include <vector>

#include "hcd/bicubic.hpp"
#include "hcd/conv.hpp"
#include "hcd/tensor.hpp"

namespace hcd {

// Conv stack with ReLU between layers (none after the last) and an
// optional trailing depth-to-space step. Architecture strings look like
//
//   conv(3,32,5)|conv(32,32,3)|conv(32,12,3)|shuffle(2)
//
// with an optional 4th conv argument for stride, e.g. conv(3,16,5,2).
// ReLU between conv entries is implied. parse_arch round-trips with
// arch_string.
struct ConvNet {
  std::vector<ConvLayer> layers;
  int shuffle = 0;  // depth-to-space factor; 0 = none
};

std::string arch_string(const ConvNet& net);
ConvNet parse_arch(const std::string& arch);  // zero-initialized params
void validate_net(const ConvNet& net);

// Stores what backward needs: the net input and each layer's post-conv
// pre-activation. Post-ReLU activations are recomputed from these.
struct ActivationTape {
  Tensor input;
  std::vector<Tensor> preacts;
};

struct Forward {
  Tensor output;
  ActivationTape tape;
};

Forward net_forward(const ConvNet& net, const Tensor& in);
Tensor net_backward_input(const ConvNet& net, const ActivationTape& tape,
                          const Tensor& grad_out);

using NetGrads = std::vector<ConvParamGrads>;

// Parameter gradients; also emits the input gradient when grad_in is
// non-null (shares the backward sweep).
NetGrads net_backward_params(const ConvNet& net, const ActivationTape& tape,
                             const Tensor& grad_out, Tensor* grad_in = nullptr);

enum class DownscalerKind { bicubic, learned };

// The rescaling pair (g, f): fixed bicubic (or small strided conv stack)
// downscaler g and a trained conv upscaler f ending in depth-to-space.
struct ModelChain {
  int scale = 2;
  DownscalerKind down_kind = DownscalerKind::bicubic;
  ConvNet down_net;  // only when down_kind == learned
  ConvNet up_net;
};

void validate_chain(const ModelChain& chain);
int chain_channels(const ModelChain& chain);

Tensor downscale(const ModelChain& chain, const Tensor& y);
Forward upscale_forward(const ModelChain& chain, const Tensor& x_lr);

enum class LossKind { mse, charbonnier };

inline constexpr double kCharbonnierEps = 1e-6;

double loss_value(LossKind kind, const Tensor& y_hat, const Tensor& y_ref);

struct LossGrad {
  double value = 0.0;
  Tensor grad;
};

LossGrad loss_grad(LossKind kind, const Tensor& y_hat, const Tensor& y_ref);

// Loss and gradient w.r.t. the LR input of f.
LossGrad grad_input(const ModelChain& chain, const Tensor& x_lr,
                    const Tensor& y_ref, LossKind kind);

// Loss and gradient w.r.t. the HR input of f(g(.)); chains the LR input
// gradient through the downscaler (exact adjoint in the bicubic case).
LossGrad grad_input_full(const ModelChain& chain, const Tensor& y_hr,
                         const Tensor& y_ref, LossKind kind);

struct ParamGrads {
  double value = 0.0;
  NetGrads up;
  NetGrads down;  // empty for a bicubic downscaler
};

// Gradients of loss(f(x_lr), y_ref) w.r.t. the upscaler parameters.
ParamGrads grad_params(const ModelChain& chain, const Tensor& x_lr,
                       const Tensor& y_ref, LossKind kind);

// Gradients of loss(f(g(y_hr)), y_ref) w.r.t. all trainable parameters
// (upscaler, plus the downscaler when it is learned).
ParamGrads grad_params_full(const ModelChain& chain, const Tensor& y_hr,
                            const Tensor& y_ref, LossKind kind);

}  // namespace hcd
