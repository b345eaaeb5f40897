#pragma once

#include <string>

#include "hcd/tensor.hpp"

namespace hcd {

enum class ColorSpace { rgb, ycbcr, gray };

std::string to_string(ColorSpace cs);

// Decoded raster: pixels in [0,1], stored planar as a (1, C, H, W)
// tensor. RGB/YCbCr are 3-channel, Gray is 1-channel.
class Image {
 public:
  Image() = default;
  Image(ColorSpace cs, Tensor data);

  ColorSpace colorspace() const { return cs_; }
  Eigen::Index width() const { return data_.shape().w; }
  Eigen::Index height() const { return data_.shape().h; }
  Eigen::Index channels() const { return data_.shape().c; }

  double operator()(Eigen::Index c, Eigen::Index y, Eigen::Index x) const {
    return data_(0, c, y, x);
  }
  double& operator()(Eigen::Index c, Eigen::Index y, Eigen::Index x) {
    return data_(0, c, y, x);
  }

  const Tensor& tensor() const { return data_; }

 private:
  ColorSpace cs_;
  Tensor data_;
};

// BT.601 studio-swing luma: Y = (65.481 R + 128.553 G + 24.966 B + 16)/255,
// so Y of an in-range RGB pixel lies in [16/255, 235/255].
Image rgb_to_y(const Image& img);

// Gray view used by the metrics: identity for gray, BT.601 Y for RGB.
Image y_channel(const Image& img);

// PSNR in dB against peak 1.0; identical inputs (mse = 0) and values
// beyond the cap report kPsnrCapDb.
inline constexpr double kPsnrCapDb = 100.0;
double psnr(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range 1.0, window applied in valid mode (no
// padding), mean over the valid map.
double ssim(const Image& a, const Image& b);

// Largest top-left crop whose dims are multiples of scale.
Image crop_to_multiple(const Image& img, int scale);

}  // namespace hcd
