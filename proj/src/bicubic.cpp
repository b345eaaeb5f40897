#include "hcd/bicubic.hpp"

#include <cmath>

namespace hcd {

namespace {

// Accumulate kernel taps for one output center into a dense row,
// clamping source indices to the valid range (edge replication), then
// normalize the row to a partition of unity.
void fill_row(Eigen::MatrixXd& m, Eigen::Index row, double center,
              double kscale, Eigen::Index len_in) {
  const double support = 2.0 * kscale;
  const auto lo = static_cast<Eigen::Index>(std::floor(center - support)) + 1;
  const auto hi = static_cast<Eigen::Index>(std::ceil(center + support)) - 1;
  double sum = 0.0;
  for (Eigen::Index j = lo; j <= hi; ++j) {
    double w = BicubicOp::kernel((static_cast<double>(j) - center) / kscale) /
               kscale;
    if (w == 0.0) continue;
    Eigen::Index jc = std::clamp<Eigen::Index>(j, 0, len_in - 1);
    m(row, jc) += w;
    sum += w;
  }
  m.row(row) /= sum;
}

}  // namespace

BicubicOp::BicubicOp(int scale) : scale_(scale) {
  if (scale < 2) throw_usage("bicubic scale must be >= 2");
}

double BicubicOp::kernel(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return a * (((t - 5.0) * t + 8.0) * t - 4.0);
  return 0.0;
}

Eigen::MatrixXd BicubicOp::weight_matrix(Eigen::Index len_in) const {
  if (len_in <= 0 || len_in % scale_ != 0)
    throw_data("bicubic: length " + std::to_string(len_in) +
               " not divisible by scale " + std::to_string(scale_));
  const Eigen::Index len_out = len_in / scale_;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(len_out, len_in);
  const double s = static_cast<double>(scale_);
  for (Eigen::Index i = 0; i < len_out; ++i)
    fill_row(m, i, (static_cast<double>(i) + 0.5) * s - 0.5, s, len_in);
  return m;
}

Tensor bicubic_down(const BicubicOp& op, const Tensor& y) {
  const Shape4 s = y.shape();
  const Eigen::MatrixXd wh = op.weight_matrix(s.h);
  const Eigen::MatrixXd ww = op.weight_matrix(s.w);
  Tensor out(Shape4{s.b, s.c, s.h / op.scale(), s.w / op.scale()});
  for (Eigen::Index b = 0; b < s.b; ++b)
    for (Eigen::Index c = 0; c < s.c; ++c)
      out.plane(b, c).noalias() = wh * y.plane(b, c) * ww.transpose();
  out.ensure_finite("bicubic_down");
  return out;
}

Tensor bicubic_down_adjoint(const BicubicOp& op, const Tensor& grad_out) {
  const Shape4 s = grad_out.shape();
  const Eigen::Index h_in = s.h * op.scale();
  const Eigen::Index w_in = s.w * op.scale();
  const Eigen::MatrixXd wh = op.weight_matrix(h_in);
  const Eigen::MatrixXd ww = op.weight_matrix(w_in);
  Tensor out(Shape4{s.b, s.c, h_in, w_in});
  for (Eigen::Index b = 0; b < s.b; ++b)
    for (Eigen::Index c = 0; c < s.c; ++c)
      out.plane(b, c).noalias() = wh.transpose() * grad_out.plane(b, c) * ww;
  out.ensure_finite("bicubic_down_adjoint");
  return out;
}

Eigen::MatrixXd bicubic_up_matrix(int scale, Eigen::Index len_in) {
  if (scale < 2) throw_usage("bicubic scale must be >= 2");
  if (len_in <= 0) throw_data("bicubic_up: empty axis");
  const Eigen::Index len_out = len_in * scale;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(len_out, len_in);
  const double s = static_cast<double>(scale);
  for (Eigen::Index i = 0; i < len_out; ++i)
    fill_row(m, i, (static_cast<double>(i) + 0.5) / s - 0.5, 1.0, len_in);
  return m;
}

Tensor bicubic_up(int scale, const Tensor& x) {
  const Shape4 s = x.shape();
  const Eigen::MatrixXd wh = bicubic_up_matrix(scale, s.h);
  const Eigen::MatrixXd ww = bicubic_up_matrix(scale, s.w);
  Tensor out(Shape4{s.b, s.c, s.h * scale, s.w * scale});
  for (Eigen::Index b = 0; b < s.b; ++b)
    for (Eigen::Index c = 0; c < s.c; ++c)
      out.plane(b, c).noalias() = wh * x.plane(b, c) * ww.transpose();
  out.ensure_finite("bicubic_up");
  return out;
}

}  // namespace hcd
