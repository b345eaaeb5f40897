#include "hcd/model.hpp"

#include <cmath>
#include <sstream>

namespace hcd {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int> parse_int_args(const std::string& entry,
                                const std::string& head) {
  if (entry.size() < head.size() + 2 || entry.substr(0, head.size()) != head ||
      entry[head.size()] != '(' || entry.back() != ')')
    throw_usage("bad architecture entry: '" + entry + "'");
  std::vector<int> args;
  for (const auto& tok :
       split(entry.substr(head.size() + 1, entry.size() - head.size() - 2),
             ',')) {
    try {
      size_t pos = 0;
      int v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      args.push_back(v);
    } catch (const std::exception&) {
      throw_usage("bad integer '" + tok + "' in architecture entry '" + entry +
                  "'");
    }
  }
  return args;
}

}  // namespace

std::string arch_string(const ConvNet& net) {
  std::ostringstream os;
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const ConvLayer& l = net.layers[i];
    if (i) os << "|";
    os << "conv(" << l.in_ch << "," << l.out_ch << "," << l.k;
    if (l.stride != 1) os << "," << l.stride;
    os << ")";
  }
  if (net.shuffle > 0) os << "|shuffle(" << net.shuffle << ")";
  return os.str();
}

ConvNet parse_arch(const std::string& arch) {
  ConvNet net;
  const auto entries = split(arch, '|');
  for (size_t i = 0; i < entries.size(); ++i) {
    const std::string& e = entries[i];
    if (e.rfind("conv(", 0) == 0) {
      if (net.shuffle > 0) throw_usage("shuffle must be the last entry");
      auto a = parse_int_args(e, "conv");
      if (a.size() != 3 && a.size() != 4)
        throw_usage("conv takes (in,out,k[,stride]): '" + e + "'");
      net.layers.push_back(
          make_conv_layer(a[0], a[1], a[2], a.size() == 4 ? a[3] : 1));
    } else if (e.rfind("shuffle(", 0) == 0) {
      auto a = parse_int_args(e, "shuffle");
      if (a.size() != 1 || a[0] < 1) throw_usage("shuffle takes one factor");
      net.shuffle = a[0];
    } else {
      throw_usage("unknown architecture entry: '" + e + "'");
    }
  }
  validate_net(net);
  return net;
}

void validate_net(const ConvNet& net) {
  if (net.layers.empty()) throw_usage("network needs at least one conv layer");
  for (size_t i = 1; i < net.layers.size(); ++i)
    if (net.layers[i].in_ch != net.layers[i - 1].out_ch)
      throw_usage("channel mismatch between conv layers " +
                  std::to_string(i - 1) + " and " + std::to_string(i));
  if (net.shuffle > 0) {
    const int s2 = net.shuffle * net.shuffle;
    if (net.layers.back().out_ch % s2 != 0)
      throw_usage("final channel count must be divisible by shuffle^2");
  }
}

Forward net_forward(const ConvNet& net, const Tensor& in) {
  Forward f;
  f.tape.input = in;
  Tensor a = in;
  for (size_t i = 0; i < net.layers.size(); ++i) {
    Tensor z = conv_forward(net.layers[i], a);
    f.tape.preacts.push_back(z);
    a = (i + 1 < net.layers.size()) ? relu(z) : std::move(z);
  }
  f.output = net.shuffle > 0 ? depth_to_space(a, net.shuffle) : std::move(a);
  return f;
}

Tensor net_backward_input(const ConvNet& net, const ActivationTape& tape,
                          const Tensor& grad_out) {
  Tensor g = net.shuffle > 0 ? space_to_depth(grad_out, net.shuffle)
                             : grad_out;
  for (size_t i = net.layers.size(); i-- > 0;) {
    const Shape4 in_shape =
        i == 0 ? tape.input.shape() : tape.preacts[i - 1].shape();
    Tensor ga = conv_backward_input(net.layers[i], g, in_shape);
    g = i == 0 ? std::move(ga) : relu_backward(ga, tape.preacts[i - 1]);
  }
  return g;
}

NetGrads net_backward_params(const ConvNet& net, const ActivationTape& tape,
                             const Tensor& grad_out, Tensor* grad_in) {
  NetGrads grads(net.layers.size());
  Tensor g = net.shuffle > 0 ? space_to_depth(grad_out, net.shuffle)
                             : grad_out;
  for (size_t i = net.layers.size(); i-- > 0;) {
    const Tensor layer_in =
        i == 0 ? tape.input : relu(tape.preacts[i - 1]);
    grads[i] = conv_backward_params(net.layers[i], layer_in, g);
    if (i == 0 && grad_in == nullptr) break;
    Tensor ga = conv_backward_input(net.layers[i], g, layer_in.shape());
    if (i == 0) {
      *grad_in = std::move(ga);
    } else {
      g = relu_backward(ga, tape.preacts[i - 1]);
    }
  }
  return grads;
}

void validate_chain(const ModelChain& chain) {
  if (chain.scale < 2) throw_usage("chain scale must be >= 2");
  validate_net(chain.up_net);
  if (chain.up_net.shuffle != chain.scale)
    throw_usage("upscaler must end in shuffle(scale)");
  const int c_in = chain.up_net.layers.front().in_ch;
  const int c_out = chain.up_net.layers.back().out_ch /
                    (chain.up_net.shuffle * chain.up_net.shuffle);
  if (c_in != c_out)
    throw_usage("upscaler must preserve the channel count");
  if (chain.down_kind == DownscalerKind::learned) {
    validate_net(chain.down_net);
    if (chain.down_net.shuffle != 0)
      throw_usage("downscaler must not contain a shuffle step");
    int stride_product = 1;
    for (const auto& l : chain.down_net.layers) stride_product *= l.stride;
    if (stride_product != chain.scale)
      throw_usage("downscaler strides must multiply to the chain scale");
    if (chain.down_net.layers.front().in_ch != c_in ||
        chain.down_net.layers.back().out_ch != c_in)
      throw_usage("downscaler must preserve the channel count");
  }
}

int chain_channels(const ModelChain& chain) {
  return chain.up_net.layers.front().in_ch;
}

Tensor downscale(const ModelChain& chain, const Tensor& y) {
  if (chain.down_kind == DownscalerKind::bicubic)
    return bicubic_down(BicubicOp(chain.scale), y);
  return net_forward(chain.down_net, y).output;
}

Forward upscale_forward(const ModelChain& chain, const Tensor& x_lr) {
  const Shape4 s = x_lr.shape();
  int radius = 0;
  for (const auto& l : chain.up_net.layers)
    radius = std::max(radius, (l.k - 1) / 2);
  if (s.h < radius + 1 || s.w < radius + 1)
    throw_data("upscaler input smaller than the largest kernel radius");
  return net_forward(chain.up_net, x_lr);
}

double loss_value(LossKind kind, const Tensor& y_hat, const Tensor& y_ref) {
  if (!(y_hat.shape() == y_ref.shape()))
    throw_data("loss: shape mismatch " + to_string(y_hat.shape()) + " vs " +
               to_string(y_ref.shape()));
  const Eigen::ArrayXd r = y_hat.array() - y_ref.array();
  switch (kind) {
    case LossKind::mse:
      return r.square().mean();
    case LossKind::charbonnier:
      return (r.square() + kCharbonnierEps * kCharbonnierEps).sqrt().mean();
  }
  throw_usage("unknown loss kind");
}

LossGrad loss_grad(LossKind kind, const Tensor& y_hat, const Tensor& y_ref) {
  if (!(y_hat.shape() == y_ref.shape()))
    throw_data("loss: shape mismatch " + to_string(y_hat.shape()) + " vs " +
               to_string(y_ref.shape()));
  const Eigen::ArrayXd r = y_hat.array() - y_ref.array();
  const double n = static_cast<double>(r.size());
  LossGrad out;
  switch (kind) {
    case LossKind::mse:
      out.value = r.square().mean();
      out.grad = Tensor(y_hat.shape(), 2.0 * r / n);
      return out;
    case LossKind::charbonnier: {
      const Eigen::ArrayXd root =
          (r.square() + kCharbonnierEps * kCharbonnierEps).sqrt();
      out.value = root.mean();
      out.grad = Tensor(y_hat.shape(), r / (root * n));
      return out;
    }
  }
  throw_usage("unknown loss kind");
}

LossGrad grad_input(const ModelChain& chain, const Tensor& x_lr,
                    const Tensor& y_ref, LossKind kind) {
  Forward f = upscale_forward(chain, x_lr);
  LossGrad lg = loss_grad(kind, f.output, y_ref);
  LossGrad out;
  out.value = lg.value;
  out.grad = net_backward_input(chain.up_net, f.tape, lg.grad);
  return out;
}

LossGrad grad_input_full(const ModelChain& chain, const Tensor& y_hr,
                         const Tensor& y_ref, LossKind kind) {
  LossGrad out;
  if (chain.down_kind == DownscalerKind::bicubic) {
    const BicubicOp op(chain.scale);
    Tensor x = bicubic_down(op, y_hr);
    LossGrad lr = grad_input(chain, x, y_ref, kind);
    out.value = lr.value;
    out.grad = bicubic_down_adjoint(op, lr.grad);
  } else {
    Forward g = net_forward(chain.down_net, y_hr);
    LossGrad lr = grad_input(chain, g.output, y_ref, kind);
    out.value = lr.value;
    out.grad = net_backward_input(chain.down_net, g.tape, lr.grad);
  }
  return out;
}

ParamGrads grad_params(const ModelChain& chain, const Tensor& x_lr,
                       const Tensor& y_ref, LossKind kind) {
  Forward f = upscale_forward(chain, x_lr);
  LossGrad lg = loss_grad(kind, f.output, y_ref);
  ParamGrads out;
  out.value = lg.value;
  out.up = net_backward_params(chain.up_net, f.tape, lg.grad);
  return out;
}

ParamGrads grad_params_full(const ModelChain& chain, const Tensor& y_hr,
                            const Tensor& y_ref, LossKind kind) {
  if (chain.down_kind == DownscalerKind::bicubic)
    return grad_params(chain, downscale(chain, y_hr), y_ref, kind);
  Forward g = net_forward(chain.down_net, y_hr);
  Forward f = upscale_forward(chain, g.output);
  LossGrad lg = loss_grad(kind, f.output, y_ref);
  ParamGrads out;
  out.value = lg.value;
  Tensor grad_x;
  out.up = net_backward_params(chain.up_net, f.tape, lg.grad, &grad_x);
  out.down = net_backward_params(chain.down_net, g.tape, grad_x);
  return out;
}

}  // namespace hcd
