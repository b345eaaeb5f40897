#include "hcd/image.hpp"

#include <cmath>

namespace hcd {

namespace {

void check_metric_pair(const Image& a, const Image& b) {
  if (a.colorspace() != ColorSpace::gray || b.colorspace() != ColorSpace::gray)
    throw_data("metric inputs must be grayscale (use y_channel first)");
  if (a.width() != b.width() || a.height() != b.height())
    throw_data("metric inputs differ in size");
}

// Normalized 1D Gaussian taps for the SSIM window.
Eigen::VectorXd gaussian_window(int size, double sigma) {
  Eigen::VectorXd w(size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i)
    w[i] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
  w /= w.sum();
  return w;
}

// Valid-mode separable window application: out is (H-size+1, W-size+1).
Eigen::MatrixXd window_filter(const Eigen::MatrixXd& img,
                              const Eigen::VectorXd& w) {
  const Eigen::Index size = w.size();
  const Eigen::Index h = img.rows() - size + 1;
  const Eigen::Index wd = img.cols() - size + 1;
  Eigen::MatrixXd rows(h, img.cols());
  for (Eigen::Index i = 0; i < h; ++i)
    rows.row(i) = w.transpose() * img.middleRows(i, size);
  Eigen::MatrixXd out(h, wd);
  for (Eigen::Index j = 0; j < wd; ++j)
    out.col(j) = rows.middleCols(j, size) * w;
  return out;
}

}  // namespace

std::string to_string(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::rgb: return "rgb";
    case ColorSpace::ycbcr: return "ycbcr";
    case ColorSpace::gray: return "gray";
  }
  return "?";
}

Image::Image(ColorSpace cs, Tensor data) : cs_(cs), data_(std::move(data)) {
  const Shape4 s = data_.shape();
  if (s.b != 1) throw_data("image tensor must have batch extent 1");
  const Eigen::Index want = cs == ColorSpace::gray ? 1 : 3;
  if (s.c != want)
    throw_data("image channel count " + std::to_string(s.c) +
               " inconsistent with colorspace " + to_string(cs));
  if (s.h < 1 || s.w < 1) throw_data("empty image");
  if ((data_.array() < 0.0).any() || (data_.array() > 1.0).any())
    throw_data("image pixels must lie in [0, 1]");
}

Image rgb_to_y(const Image& img) {
  if (img.colorspace() != ColorSpace::rgb)
    throw_data("rgb_to_y expects an RGB image");
  const Tensor& t = img.tensor();
  const Shape4 s = t.shape();
  Tensor y(Shape4{1, 1, s.h, s.w});
  y.plane(0, 0) = ((65.481 * t.plane(0, 0) + 128.553 * t.plane(0, 1) +
                    24.966 * t.plane(0, 2)).array() +
                   16.0) /
                  255.0;
  return Image(ColorSpace::gray, std::move(y));
}

Image y_channel(const Image& img) {
  switch (img.colorspace()) {
    case ColorSpace::gray: return img;
    case ColorSpace::rgb: return rgb_to_y(img);
    case ColorSpace::ycbcr: {
      Tensor y(Shape4{1, 1, img.height(), img.width()});
      y.plane(0, 0) = img.tensor().plane(0, 0);
      return Image(ColorSpace::gray, std::move(y));
    }
  }
  throw_data("unknown colorspace");
}

double psnr(const Image& a, const Image& b) {
  check_metric_pair(a, b);
  const double mse = (a.tensor().array() - b.tensor().array()).square().mean();
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(10.0 * std::log10(1.0 / mse), kPsnrCapDb);
}

double ssim(const Image& a, const Image& b) {
  check_metric_pair(a, b);
  constexpr int kWindow = 11;
  constexpr double kSigma = 1.5;
  constexpr double c1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
  constexpr double c2 = 0.03 * 0.03;
  if (a.height() < kWindow || a.width() < kWindow)
    throw_data("ssim needs images of at least 11x11");

  const Eigen::VectorXd w = gaussian_window(kWindow, kSigma);
  const Eigen::MatrixXd pa = a.tensor().plane(0, 0);
  const Eigen::MatrixXd pb = b.tensor().plane(0, 0);

  const Eigen::MatrixXd mu_a = window_filter(pa, w);
  const Eigen::MatrixXd mu_b = window_filter(pb, w);
  const Eigen::MatrixXd var_a =
      window_filter(pa.cwiseProduct(pa), w) - mu_a.cwiseProduct(mu_a);
  const Eigen::MatrixXd var_b =
      window_filter(pb.cwiseProduct(pb), w) - mu_b.cwiseProduct(mu_b);
  const Eigen::MatrixXd cov =
      window_filter(pa.cwiseProduct(pb), w) - mu_a.cwiseProduct(mu_b);

  const Eigen::ArrayXXd num = (2.0 * mu_a.cwiseProduct(mu_b).array() + c1) *
                              (2.0 * cov.array() + c2);
  const Eigen::ArrayXXd den =
      (mu_a.array().square() + mu_b.array().square() + c1) *
      (var_a.array() + var_b.array() + c2);
  return (num / den).mean();
}

Image crop_to_multiple(const Image& img, int scale) {
  if (scale < 1) throw_usage("crop_to_multiple: scale must be >= 1");
  const Eigen::Index h = (img.height() / scale) * scale;
  const Eigen::Index w = (img.width() / scale) * scale;
  if (h == 0 || w == 0)
    throw_data("crop_to_multiple would produce an empty image");
  if (h == img.height() && w == img.width()) return img;
  Tensor out(Shape4{1, img.channels(), h, w});
  for (Eigen::Index c = 0; c < img.channels(); ++c)
    out.plane(0, c) = img.tensor().plane(0, c).topLeftCorner(h, w);
  return Image(img.colorspace(), std::move(out));
}

}  // namespace hcd
