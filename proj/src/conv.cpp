#include "hcd/conv.hpp"

namespace hcd {

namespace {

using RowMajorMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

// Patch matrix for one batch item: (in_ch*k*k) x (h_out*w_out), zeros
// where the window hangs over the border.
Eigen::MatrixXd im2col(const ConvLayer& l, const Tensor& in, Eigen::Index b,
                       Eigen::Index h_out, Eigen::Index w_out) {
  const Shape4 s = in.shape();
  const int pad = (l.k - 1) / 2;
  Eigen::MatrixXd cols =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l.in_ch) * l.k * l.k,
                            h_out * w_out);
  for (int c = 0; c < l.in_ch; ++c) {
    auto src = in.plane(b, c);
    for (int ky = 0; ky < l.k; ++ky)
      for (int kx = 0; kx < l.k; ++kx) {
        const Eigen::Index row =
            (static_cast<Eigen::Index>(c) * l.k + ky) * l.k + kx;
        for (Eigen::Index oy = 0; oy < h_out; ++oy) {
          const Eigen::Index iy = oy * l.stride + ky - pad;
          if (iy < 0 || iy >= s.h) continue;
          for (Eigen::Index ox = 0; ox < w_out; ++ox) {
            const Eigen::Index ix = ox * l.stride + kx - pad;
            if (ix < 0 || ix >= s.w) continue;
            cols(row, oy * w_out + ox) = src(iy, ix);
          }
        }
      }
  }
  return cols;
}

// Transpose of im2col: scatter-add patch columns back into an image.
void col2im_add(const ConvLayer& l, const Eigen::MatrixXd& cols, Tensor& out,
                Eigen::Index b, Eigen::Index h_out, Eigen::Index w_out) {
  const Shape4 s = out.shape();
  const int pad = (l.k - 1) / 2;
  for (int c = 0; c < l.in_ch; ++c) {
    auto dst = out.plane(b, c);
    for (int ky = 0; ky < l.k; ++ky)
      for (int kx = 0; kx < l.k; ++kx) {
        const Eigen::Index row =
            (static_cast<Eigen::Index>(c) * l.k + ky) * l.k + kx;
        for (Eigen::Index oy = 0; oy < h_out; ++oy) {
          const Eigen::Index iy = oy * l.stride + ky - pad;
          if (iy < 0 || iy >= s.h) continue;
          for (Eigen::Index ox = 0; ox < w_out; ++ox) {
            const Eigen::Index ix = ox * l.stride + kx - pad;
            if (ix < 0 || ix >= s.w) continue;
            dst(iy, ix) += cols(row, oy * w_out + ox);
          }
        }
      }
  }
}

ConstRowMajorMap weight_matrix(const ConvLayer& l) {
  return ConstRowMajorMap(l.weights.array().data(), l.out_ch,
                          static_cast<Eigen::Index>(l.in_ch) * l.k * l.k);
}

void check_layer(const ConvLayer& l, const Shape4& in) {
  if (in.c != l.in_ch)
    throw_data("conv: input has " + std::to_string(in.c) +
               " channels, layer expects " + std::to_string(l.in_ch));
  if (l.k % 2 == 0) throw_usage("conv: kernel size must be odd");
  if (l.stride < 1) throw_usage("conv: stride must be >= 1");
}

}  // namespace

ConvLayer make_conv_layer(int in_ch, int out_ch, int k, int stride) {
  if (in_ch < 1 || out_ch < 1) throw_usage("conv: channel counts must be >= 1");
  if (k < 1 || k % 2 == 0) throw_usage("conv: kernel size must be odd");
  if (stride < 1) throw_usage("conv: stride must be >= 1");
  ConvLayer l;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.k = k;
  l.stride = stride;
  l.weights = Tensor(Shape4{out_ch, in_ch, k, k});
  l.bias = Eigen::VectorXd::Zero(out_ch);
  return l;
}

Shape4 conv_out_shape(const ConvLayer& l, const Shape4& in) {
  const int pad = (l.k - 1) / 2;
  const Eigen::Index h = (in.h + 2 * pad - l.k) / l.stride + 1;
  const Eigen::Index w = (in.w + 2 * pad - l.k) / l.stride + 1;
  if (h < 1 || w < 1) throw_data("conv: input smaller than kernel support");
  return Shape4{in.b, l.out_ch, h, w};
}

Tensor conv_forward(const ConvLayer& l, const Tensor& in) {
  check_layer(l, in.shape());
  const Shape4 os = conv_out_shape(l, in.shape());
  Tensor out(os);
  const auto wm = weight_matrix(l);
  for (Eigen::Index b = 0; b < os.b; ++b) {
    Eigen::MatrixXd cols = im2col(l, in, b, os.h, os.w);
    RowMajorMap dst(out.array().data() + b * os.c * os.h * os.w, os.c,
                    os.h * os.w);
    dst.noalias() = wm * cols;
    dst.colwise() += l.bias;
  }
  out.ensure_finite("conv_forward");
  return out;
}

Tensor conv_backward_input(const ConvLayer& l, const Tensor& grad_out,
                           const Shape4& in_shape) {
  check_layer(l, in_shape);
  const Shape4 os = grad_out.shape();
  Tensor grad_in(in_shape);
  const auto wm = weight_matrix(l);
  for (Eigen::Index b = 0; b < os.b; ++b) {
    ConstRowMajorMap dz(grad_out.array().data() + b * os.c * os.h * os.w,
                        os.c, os.h * os.w);
    Eigen::MatrixXd cols = wm.transpose() * dz;
    col2im_add(l, cols, grad_in, b, os.h, os.w);
  }
  grad_in.ensure_finite("conv_backward_input");
  return grad_in;
}

ConvParamGrads conv_backward_params(const ConvLayer& l, const Tensor& input,
                                    const Tensor& grad_out) {
  check_layer(l, input.shape());
  const Shape4 os = grad_out.shape();
  Eigen::MatrixXd dwm = Eigen::MatrixXd::Zero(
      l.out_ch, static_cast<Eigen::Index>(l.in_ch) * l.k * l.k);
  Eigen::VectorXd db = Eigen::VectorXd::Zero(l.out_ch);
  for (Eigen::Index b = 0; b < os.b; ++b) {
    Eigen::MatrixXd cols = im2col(l, input, b, os.h, os.w);
    ConstRowMajorMap dz(grad_out.array().data() + b * os.c * os.h * os.w,
                        os.c, os.h * os.w);
    dwm.noalias() += dz * cols.transpose();
    db += dz.rowwise().sum();
  }
  ConvParamGrads g;
  Eigen::ArrayXd flat(dwm.size());
  RowMajorMap(flat.data(), dwm.rows(), dwm.cols()) = dwm;
  g.dw = Tensor(l.weights.shape(), std::move(flat));
  g.db = std::move(db);
  return g;
}

Tensor relu(const Tensor& t) {
  return Tensor(t.shape(), t.array().max(0.0));
}

Tensor relu_backward(const Tensor& grad, const Tensor& preact) {
  if (!(grad.shape() == preact.shape()))
    throw_data("relu_backward: shape mismatch");
  return Tensor(grad.shape(),
                (preact.array() > 0.0).select(grad.array(), 0.0));
}

Tensor depth_to_space(const Tensor& t, int s) {
  const Shape4 in = t.shape();
  if (s < 1 || in.c % (static_cast<Eigen::Index>(s) * s) != 0)
    throw_data("depth_to_space: channel count not divisible by s^2");
  const Eigen::Index c_out = in.c / (static_cast<Eigen::Index>(s) * s);
  Tensor out(Shape4{in.b, c_out, in.h * s, in.w * s});
  for (Eigen::Index b = 0; b < in.b; ++b)
    for (Eigen::Index c = 0; c < c_out; ++c)
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx) {
          const Eigen::Index c_in = (c * s + dy) * s + dx;
          for (Eigen::Index y = 0; y < in.h; ++y)
            for (Eigen::Index x = 0; x < in.w; ++x)
              out(b, c, y * s + dy, x * s + dx) = t(b, c_in, y, x);
        }
  return out;
}

Tensor space_to_depth(const Tensor& t, int s) {
  const Shape4 in = t.shape();
  if (s < 1 || in.h % s != 0 || in.w % s != 0)
    throw_data("space_to_depth: spatial dims not divisible by s");
  Tensor out(
      Shape4{in.b, in.c * s * s, in.h / s, in.w / s});
  for (Eigen::Index b = 0; b < in.b; ++b)
    for (Eigen::Index c = 0; c < in.c; ++c)
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx) {
          const Eigen::Index c_out = (c * s + dy) * s + dx;
          for (Eigen::Index y = 0; y < in.h / s; ++y)
            for (Eigen::Index x = 0; x < in.w / s; ++x)
              out(b, c_out, y, x) = t(b, c, y * s + dy, x * s + dx);
        }
  return out;
}

}  // namespace hcd
