#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace padkit {

// Exception taxonomy shared across the toolkit.  The CLI maps these to
// exit codes.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major tensor of doubles.  Rank <= 3 in practice.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);
  explicit Tensor(std::vector<std::size_t> shape);  // zero-filled

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
  static Tensor from_vector(std::vector<double> v);
  static Tensor identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at2(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  // (row, col, channel) accessor for H x W x C images.
  double& at3(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at3(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  void require_finite(const std::string& context) const;

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

// y = x . w + b with x (N x K), w (K x M), b (M).
Tensor affine(const Tensor& input, const Tensor& weight, const Tensor& bias);

struct AffineGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};
AffineGrads affine_backward(const Tensor& input, const Tensor& weight,
                            const Tensor& upstream);

Tensor rectify(const Tensor& input);
// Subgradient at 0 is 0.
Tensor rectify_backward(const Tensor& input, const Tensor& upstream);

// Whole-tensor L2 normalization; throws DomainError on a zero vector.
Tensor l2_normalize(const Tensor& input);
Tensor l2_normalize_backward(const Tensor& input, const Tensor& upstream);

// Row-wise variants for (N x D) matrices.
Tensor l2_normalize_rows(const Tensor& input);
Tensor l2_normalize_rows_backward(const Tensor& input, const Tensor& upstream);

}  // namespace padkit
