#pragma once

#include <Eigen/Dense>

#include "hcd/tensor.hpp"

namespace hcd {

// Fixed bicubic downscaler. The operator is linear and separable: each
// axis is a small banded weight matrix, so downscaling a plane P is
// Wh * P * Ww^T and the adjoint is exactly Wh^T * G * Ww.
//
// Conventions (chosen to match the dominant rescaling-evaluation ones,
// spelled out in docs/formats.md):
//   - Catmull-Rom cubic kernel, a = -0.5
//   - antialiasing: the kernel is stretched by the scale factor, so a
//     scale-s row draws from ~4s source samples
//   - centers aligned via u = (i + 0.5) * s - 0.5
//   - edge-replicate boundary handling; every row is renormalized to
//     sum exactly to 1
class BicubicOp {
 public:
  explicit BicubicOp(int scale);

  int scale() const { return scale_; }

  // (len_in / scale) x len_in downscale matrix for one axis.
  Eigen::MatrixXd weight_matrix(Eigen::Index len_in) const;

  static double kernel(double t);  // a = -0.5 cubic, support (-2, 2)

 private:
  int scale_;
};

Tensor bicubic_down(const BicubicOp& op, const Tensor& y);

// Exact transpose of bicubic_down: <down(u), v> == <u, adjoint(v)>.
Tensor bicubic_down_adjoint(const BicubicOp& op, const Tensor& grad_out);

// Plain bicubic upscaling (no antialiasing; same kernel, same edge
// handling). Reference-quality baseline, not part of the trained chain.
Eigen::MatrixXd bicubic_up_matrix(int scale, Eigen::Index len_in);
Tensor bicubic_up(int scale, const Tensor& x);

}  // namespace hcd
