#include "hcd/tensor.hpp"

#include <cmath>
#include <sstream>

namespace hcd {

std::string to_string(const Shape4& s) {
  std::ostringstream os;
  os << "(" << s.b << ", " << s.c << ", " << s.h << ", " << s.w << ")";
  return os.str();
}

Eigen::Index Tensor::checked_count(const Shape4& s) {
  if (s.b < 0 || s.c < 0 || s.h < 0 || s.w < 0)
    throw_usage("tensor shape extents must be non-negative: " + to_string(s));
  return s.count();
}

Tensor::Tensor(Shape4 shape, Eigen::ArrayXd data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != checked_count(shape_))
    throw_data("tensor data length " + std::to_string(data_.size()) +
               " does not match shape " + to_string(shape_));
  ensure_finite("construct");
}

Tensor Tensor::full(Shape4 shape, double value) {
  return Tensor(shape,
                Eigen::ArrayXd::Constant(checked_count(shape), value));
}

Tensor Tensor::batch_item(Eigen::Index b) const {
  if (b < 0 || b >= shape_.b) throw_data("batch index out of range");
  Shape4 s{1, shape_.c, shape_.h, shape_.w};
  return Tensor(s, data_.segment(offset(b, 0, 0, 0), s.count()));
}

void Tensor::ensure_finite(const char* context) const {
  if (!data_.allFinite())
    throw_numeric(std::string("non-finite value in tensor after ") + context);
}

Tensor elementwise(const Tensor& a, const Tensor& b, EwOp op) {
  if (!(a.shape() == b.shape()))
    throw_data("elementwise: shape mismatch " + to_string(a.shape()) +
               " vs " + to_string(b.shape()));
  Eigen::ArrayXd out;
  switch (op) {
    case EwOp::add: out = a.array() + b.array(); break;
    case EwOp::sub: out = a.array() - b.array(); break;
    case EwOp::mul: out = a.array() * b.array(); break;
  }
  return Tensor(a.shape(), std::move(out));
}

Tensor scale(const Tensor& t, double s) {
  return Tensor(t.shape(), t.array() * s);
}

double l2_norm(const Tensor& t) { return t.array().matrix().norm(); }

double dot(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) throw_data("dot: shape mismatch");
  return (a.array() * b.array()).sum();
}

double mean(const Tensor& t) {
  if (t.size() == 0) throw_data("mean of empty tensor");
  return t.array().mean();
}

double max_abs(const Tensor& t) {
  return t.size() == 0 ? 0.0 : t.array().abs().maxCoeff();
}

Tensor clamp(const Tensor& t, double lo, double hi) {
  if (lo > hi) throw_usage("clamp: lo > hi");
  return Tensor(t.shape(), t.array().max(lo).min(hi));
}

Tensor random_uniform(Rng& rng, Shape4 shape, double lo, double hi) {
  if (!(lo < hi)) throw_usage("random_uniform: need lo < hi");
  Eigen::ArrayXd data(shape.count());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    data[i] = lo + rng.next_double() * (hi - lo);
  return Tensor(shape, std::move(data));
}

Tensor random_normal(Rng& rng, Shape4 shape, double mean, double stddev) {
  Eigen::ArrayXd data(shape.count());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    data[i] = mean + stddev * rng.normal();
  return Tensor(shape, std::move(data));
}

}  // namespace hcd
