#pragma once

#include <array>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace preffend {

// Dense 2-D tensor of doubles with optional gradient storage. Scalars are
// 1x1, vectors are n x 1 (column) unless noted. Copies are shallow: a Tensor
// is a handle onto shared storage, which is what lets the tape refer back to
// the same buffers during the backward pass.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols, bool trainable = false);
  static Tensor full(std::size_t rows, std::size_t cols, double value);
  static Tensor scalar(double value);
  static Tensor column(const std::vector<double>& values);
  static Tensor row(const std::vector<double>& values);
  static Tensor from_values(std::size_t rows, std::size_t cols,
                            std::vector<double> values, bool trainable = false);
  // Uniform in [lo, hi), consuming rows*cols draws from rng in row-major order.
  static Tensor uniform(std::size_t rows, std::size_t cols, double lo, double hi,
                        std::mt19937_64& rng, bool trainable = false);
  static Tensor identity(std::size_t n);

  bool defined() const { return data_ != nullptr; }
  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t size() const { return rows() * cols(); }
  std::array<std::size_t, 2> shape() const { return {rows(), cols()}; }
  std::string shape_str() const;
  bool is_scalar() const { return rows() == 1 && cols() == 1; }

  double value() const;  // scalar tensors only
  double at(std::size_t r, std::size_t c) const;
  std::span<const double> values() const;
  std::span<double> values_mut();

  bool trainable() const;
  void set_trainable(bool trainable);
  bool requires_grad() const;

  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> grad_mut();
  void zero_grad();

  // Deep copy of values; the copy starts with no gradient and no history.
  Tensor clone(bool trainable = false) const;

  struct Data;
  const std::shared_ptr<Data>& data() const { return data_; }

 private:
  explicit Tensor(std::shared_ptr<Data> data) : data_(std::move(data)) {}
  std::shared_ptr<Data> data_;
  friend class Tape;
  friend Tensor make_tensor(std::size_t, std::size_t, bool);
};

// Reverse-mode tape. Construction pushes the tape as the active one for the
// current thread; destruction pops it. Operations record themselves only
// while a tape is active and at least one input requires a gradient, so
// forward-only evaluation (no live tape) is pure computation and safe to run
// concurrently over read-only parameters.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Seeds d(loss)/d(loss) = 1 and replays recorded operations in reverse.
  // Only operations on the path from trainable leaves to the loss are
  // executed, so tensors that do not feed the loss keep an empty grad.
  void backward(const Tensor& loss);

  std::size_t num_ops() const { return records_.size(); }

  static Tape* active();

  struct Record {
    const char* name;
    std::vector<std::shared_ptr<Tensor::Data>> inputs;
    std::shared_ptr<Tensor::Data> output;
    std::function<void()> backward;
  };

  void record(Record rec);

 private:
  std::vector<Record> records_;
  Tape* previous_ = nullptr;
};

// Operator set. All operators check shapes and throw std::invalid_argument
// naming the offending shapes; log throws std::domain_error on non-positive
// input.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor divide(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor softmax_rows(const Tensor& a);
Tensor row_sum(const Tensor& a);  // [m x n] -> [m x 1]
Tensor col_sum(const Tensor& a);  // [m x n] -> [1 x n]
Tensor sum_all(const Tensor& a);  // -> [1 x 1]
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::initializer_list<Tensor> parts);
Tensor concat_cols(std::initializer_list<Tensor> parts);
// Cosine similarity of two column vectors -> scalar.
Tensor cosine(const Tensor& u, const Tensor& v);
// Row gather: out[k,:] = a[indices[k],:]. Backward scatter-adds, so repeated
// indices accumulate. This is the sparse form of a one-hot selector matmul.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> indices);
Tensor gather_rows(const Tensor& a, std::initializer_list<std::size_t> indices);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_coord = 0;
};

// Central-difference gradient check of a scalar-valued function at `point`.
// Relative error per coordinate is |analytic - numeric| divided by
// max(1, |analytic|, |numeric|). Coordinates with skip[i] set are excluded;
// callers use this to step around kinks (e.g. ReLU at 0), where one-sided
// derivatives make central differences meaningless. Non-finite values abort
// with a diagnostic naming the coordinate.
GradCheckResult grad_check(const std::function<Tensor(const Tensor&)>& fn,
                           const Tensor& point, double epsilon,
                           const std::vector<bool>* skip = nullptr);

}  // namespace preffend
