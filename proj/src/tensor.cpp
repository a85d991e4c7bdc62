#include "padkit/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace padkit {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    throw DimensionError("tensor shape " + shape_string(shape_) + " does not match data length " +
                         std::to_string(data_.size()));
  }
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor Tensor::from_vector(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.at2(i, i) = 1.0;
  return t;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::require_finite(const std::string& context) const {
  if (!all_finite()) {
    throw EvaluationError("non-finite value in " + context);
  }
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor affine(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (input.rank() != 2 || weight.rank() != 2 || bias.rank() != 1) {
    throw DimensionError("affine expects matrix x matrix + vector, got " +
                         shape_string(input.shape()) + " x " + shape_string(weight.shape()) +
                         " + " + shape_string(bias.shape()));
  }
  const std::size_t n = input.extent(0), k = input.extent(1);
  const std::size_t m = weight.extent(1);
  if (weight.extent(0) != k || bias.extent(0) != m) {
    throw DimensionError("affine shape mismatch: input " + shape_string(input.shape()) +
                         ", weight " + shape_string(weight.shape()) + ", bias " +
                         shape_string(bias.shape()));
  }
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out.at2(i, j) = bias[j];
    for (std::size_t p = 0; p < k; ++p) {
      const double x = input.at2(i, p);
      if (x == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out.at2(i, j) += x * weight.at2(p, j);
    }
  }
  return out;
}

AffineGrads affine_backward(const Tensor& input, const Tensor& weight, const Tensor& upstream) {
  const std::size_t n = input.extent(0), k = input.extent(1), m = weight.extent(1);
  if (upstream.rank() != 2 || upstream.extent(0) != n || upstream.extent(1) != m) {
    throw DimensionError("affine_backward upstream shape " + shape_string(upstream.shape()));
  }
  AffineGrads g{Tensor({n, k}), Tensor({k, m}), Tensor({m})};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double u = upstream.at2(i, j);
      g.bias[j] += u;
      if (u == 0.0) continue;
      for (std::size_t p = 0; p < k; ++p) {
        g.input.at2(i, p) += u * weight.at2(p, j);
        g.weight.at2(p, j) += u * input.at2(i, p);
      }
    }
  }
  return g;
}

Tensor rectify(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor rectify_backward(const Tensor& input, const Tensor& upstream) {
  if (!input.same_shape(upstream)) {
    throw DimensionError("rectify_backward shape mismatch: " + shape_string(input.shape()) +
                         " vs " + shape_string(upstream.shape()));
  }
  Tensor out = upstream;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (input[i] <= 0.0) out[i] = 0.0;
  }
  return out;
}

namespace {

double norm_of(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

}  // namespace

Tensor l2_normalize(const Tensor& input) {
  const double norm = norm_of(input.data(), input.size());
  if (norm == 0.0) throw DomainError("l2_normalize on zero vector");
  Tensor out = input;
  for (double& v : out.values()) v /= norm;
  return out;
}

Tensor l2_normalize_backward(const Tensor& input, const Tensor& upstream) {
  if (!input.same_shape(upstream)) {
    throw DimensionError("l2_normalize_backward shape mismatch");
  }
  const std::size_t n = input.size();
  const double norm = norm_of(input.data(), n);
  if (norm == 0.0) throw DomainError("l2_normalize_backward on zero vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += input[i] * upstream[i];
  dot /= norm * norm;
  Tensor out({input.shape()});
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (upstream[i] - input[i] * dot) / norm;
  }
  return out;
}

Tensor l2_normalize_rows(const Tensor& input) {
  if (input.rank() != 2) throw DimensionError("l2_normalize_rows expects a matrix");
  const std::size_t n = input.extent(0), d = input.extent(1);
  Tensor out = input;
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = norm_of(input.data() + i * d, d);
    if (norm == 0.0) throw DomainError("l2_normalize_rows: zero row " + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) out.at2(i, j) /= norm;
  }
  return out;
}

Tensor l2_normalize_rows_backward(const Tensor& input, const Tensor& upstream) {
  if (!input.same_shape(upstream)) {
    throw DimensionError("l2_normalize_rows_backward shape mismatch");
  }
  const std::size_t n = input.extent(0), d = input.extent(1);
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = norm_of(input.data() + i * d, d);
    if (norm == 0.0) throw DomainError("l2_normalize_rows_backward: zero row");
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += input.at2(i, j) * upstream.at2(i, j);
    dot /= norm * norm;
    for (std::size_t j = 0; j < d; ++j) {
      out.at2(i, j) = (upstream.at2(i, j) - input.at2(i, j) * dot) / norm;
    }
  }
  return out;
}

}  // namespace padkit
