#pragma once

#include <Eigen/Dense>
#include <string>

#include "hcd/errors.hpp"
#include "hcd/rng.hpp"

namespace hcd {

// All pipeline data is rank-4: (batch, channel, height, width),
// row-major and contiguous, double precision throughout.
struct Shape4 {
  Eigen::Index b = 0, c = 0, h = 0, w = 0;

  Eigen::Index count() const { return b * c * h * w; }
  bool operator==(const Shape4&) const = default;
};

std::string to_string(const Shape4& s);

using PlaneView =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;
using MutPlaneView =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;

// Dense rank-4 array. Values are validated finite on construction; every
// public operation that produces a Tensor re-establishes that invariant.
// Treat instances as immutable values once built (safe to share across
// threads); the mutable accessors exist for construction code.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape4 shape)
      : shape_(shape), data_(Eigen::ArrayXd::Zero(checked_count(shape))) {}
  Tensor(Shape4 shape, Eigen::ArrayXd data);

  static Tensor full(Shape4 shape, double value);

  const Shape4& shape() const { return shape_; }
  Eigen::Index size() const { return data_.size(); }

  double operator()(Eigen::Index b, Eigen::Index c, Eigen::Index i,
                    Eigen::Index j) const {
    return data_[offset(b, c, i, j)];
  }
  double& operator()(Eigen::Index b, Eigen::Index c, Eigen::Index i,
                     Eigen::Index j) {
    return data_[offset(b, c, i, j)];
  }

  const Eigen::ArrayXd& array() const { return data_; }
  Eigen::ArrayXd& array() { return data_; }

  // (h, w) matrix view of one channel plane.
  PlaneView plane(Eigen::Index b, Eigen::Index c) const {
    return PlaneView(data_.data() + offset(b, c, 0, 0), shape_.h, shape_.w);
  }
  MutPlaneView plane(Eigen::Index b, Eigen::Index c) {
    return MutPlaneView(data_.data() + offset(b, c, 0, 0), shape_.h, shape_.w);
  }

  // Single image slice (1, c, h, w) of a batch.
  Tensor batch_item(Eigen::Index b) const;

  void ensure_finite(const char* context) const;

 private:
  static Eigen::Index checked_count(const Shape4& s);
  Eigen::Index offset(Eigen::Index b, Eigen::Index c, Eigen::Index i,
                      Eigen::Index j) const {
    return ((b * shape_.c + c) * shape_.h + i) * shape_.w + j;
  }

  Shape4 shape_;
  Eigen::ArrayXd data_;
};

enum class EwOp { add, sub, mul };

Tensor elementwise(const Tensor& a, const Tensor& b, EwOp op);

inline Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise(a, b, EwOp::add);
}
inline Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise(a, b, EwOp::sub);
}
inline Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise(a, b, EwOp::mul);
}

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }

Tensor scale(const Tensor& t, double s);
inline Tensor operator*(double s, const Tensor& t) { return scale(t, s); }
inline Tensor operator*(const Tensor& t, double s) { return scale(t, s); }

double l2_norm(const Tensor& t);
double dot(const Tensor& a, const Tensor& b);
double mean(const Tensor& t);
double max_abs(const Tensor& t);

Tensor clamp(const Tensor& t, double lo, double hi);

Tensor random_uniform(Rng& rng, Shape4 shape, double lo, double hi);
Tensor random_normal(Rng& rng, Shape4 shape, double mean, double stddev);

}  // namespace hcd
