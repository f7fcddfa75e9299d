#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace preffend {

struct Tensor::Data {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<double> grad;  // empty until populated by a backward pass
  bool trainable = false;
  bool requires_grad = false;
};

namespace {

thread_local Tape* g_active_tape = nullptr;

using DataPtr = std::shared_ptr<Tensor::Data>;

DataPtr make_data(std::size_t rows, std::size_t cols, bool trainable) {
  auto d = std::make_shared<Tensor::Data>();
  d->rows = rows;
  d->cols = cols;
  d->values.assign(rows * cols, 0.0);
  d->trainable = trainable;
  d->requires_grad = trainable;
  return d;
}

void ensure_grad(Tensor::Data& d) {
  if (d.grad.size() != d.values.size()) d.grad.assign(d.values.size(), 0.0);
}

std::string shape_of(const Tensor::Data& d) {
  return "[" + std::to_string(d.rows) + "x" + std::to_string(d.cols) + "]";
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
  }
}

// Records the op if a tape is live and gradients can flow; otherwise the
// forward result is all there is.
void maybe_record(const char* name, std::vector<DataPtr> inputs, const DataPtr& out,
                  std::function<void()> backward) {
  Tape* tape = Tape::active();
  if (tape == nullptr) return;
  bool needs = false;
  for (const auto& in : inputs) needs = needs || in->requires_grad;
  if (!needs) return;
  out->requires_grad = true;
  tape->record(Tape::Record{name, std::move(inputs), out, std::move(backward)});
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool trainable) {
  return Tensor(make_data(rows, cols, trainable));
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double value) {
  auto d = make_data(rows, cols, false);
  std::fill(d->values.begin(), d->values.end(), value);
  return Tensor(std::move(d));
}

Tensor Tensor::scalar(double value) { return full(1, 1, value); }

Tensor Tensor::column(const std::vector<double>& values) {
  auto d = make_data(values.size(), 1, false);
  d->values = values;
  return Tensor(std::move(d));
}

Tensor Tensor::row(const std::vector<double>& values) {
  auto d = make_data(1, values.size(), false);
  d->values = values;
  return Tensor(std::move(d));
}

Tensor Tensor::from_values(std::size_t rows, std::size_t cols,
                           std::vector<double> values, bool trainable) {
  if (values.size() != rows * cols) {
    throw std::invalid_argument("from_values: " + std::to_string(values.size()) +
                                " values for shape [" + std::to_string(rows) + "x" +
                                std::to_string(cols) + "]");
  }
  auto d = make_data(rows, cols, trainable);
  d->values = std::move(values);
  return Tensor(std::move(d));
}

Tensor Tensor::uniform(std::size_t rows, std::size_t cols, double lo, double hi,
                       std::mt19937_64& rng, bool trainable) {
  auto d = make_data(rows, cols, trainable);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : d->values) v = dist(rng);
  return Tensor(std::move(d));
}

Tensor Tensor::identity(std::size_t n) {
  auto d = make_data(n, n, false);
  for (std::size_t i = 0; i < n; ++i) d->values[i * n + i] = 1.0;
  return Tensor(std::move(d));
}

std::size_t Tensor::rows() const { return data_ ? data_->rows : 0; }
std::size_t Tensor::cols() const { return data_ ? data_->cols : 0; }

std::string Tensor::shape_str() const {
  if (!data_) return "[undefined]";
  return shape_of(*data_);
}

double Tensor::value() const {
  if (!is_scalar()) {
    throw std::invalid_argument("value: tensor is not scalar, shape " + shape_str());
  }
  return data_->values[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  if (r >= rows() || c >= cols()) {
    throw std::out_of_range("at: index (" + std::to_string(r) + "," +
                            std::to_string(c) + ") out of " + shape_str());
  }
  return data_->values[r * cols() + c];
}

std::span<const double> Tensor::values() const {
  return {data_->values.data(), data_->values.size()};
}

std::span<double> Tensor::values_mut() {
  return {data_->values.data(), data_->values.size()};
}

bool Tensor::trainable() const { return data_ && data_->trainable; }

void Tensor::set_trainable(bool trainable) {
  data_->trainable = trainable;
  if (trainable) data_->requires_grad = true;
}

bool Tensor::requires_grad() const { return data_ && data_->requires_grad; }

bool Tensor::has_grad() const {
  return data_ && data_->grad.size() == data_->values.size();
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) {
    throw std::logic_error("grad: no gradient populated for tensor " + shape_str());
  }
  return {data_->grad.data(), data_->grad.size()};
}

std::span<double> Tensor::grad_mut() {
  ensure_grad(*data_);
  return {data_->grad.data(), data_->grad.size()};
}

void Tensor::zero_grad() {
  if (data_) data_->grad.clear();
}

Tensor Tensor::clone(bool trainable) const {
  auto d = make_data(rows(), cols(), trainable);
  d->values = data_->values;
  return Tensor(std::move(d));
}

// ---------------------------------------------------------------------------
// Tape

Tape::Tape() {
  previous_ = g_active_tape;
  g_active_tape = this;
}

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::record(Record rec) { records_.push_back(std::move(rec)); }

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || !loss.is_scalar()) {
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                loss.shape_str());
  }
  // Mark the subgraph that actually feeds the loss so unrelated tensors are
  // left untouched.
  std::unordered_set<Tensor::Data*> reachable;
  reachable.insert(loss.data().get());
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (reachable.count(it->output.get()) == 0) continue;
    for (const auto& in : it->inputs) {
      if (in->requires_grad) reachable.insert(in.get());
    }
  }
  ensure_grad(*loss.data());
  loss.data()->grad[0] += 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (reachable.count(it->output.get()) == 0) continue;
    it->backward();
  }
}

// ---------------------------------------------------------------------------
// Operators

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ " + a.shape_str() +
                                " vs " + b.shape_str());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = Tensor::zeros(m, n);
  {
    const double* av = a.values().data();
    const double* bv = b.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t l = 0; l < k; ++l) {
        const double ail = av[i * k + l];
        if (ail == 0.0) continue;
        const double* brow = bv + l * n;
        double* orow = ov + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += ail * brow[j];
      }
    }
  }
  auto ad = a.data(), bd = b.data(), od = out.data();
  maybe_record("matmul", {ad, bd}, od, [ad, bd, od, m, k, n]() {
    const double* g = od->grad.data();
    if (ad->requires_grad) {
      ensure_grad(*ad);
      const double* bv = bd->values.data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
          double s = 0.0;
          const double* grow = g + i * n;
          const double* brow = bv + l * n;
          for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
          ad->grad[i * k + l] += s;
        }
      }
    }
    if (bd->requires_grad) {
      ensure_grad(*bd);
      const double* av = ad->values.data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g + i * n;
        for (std::size_t l = 0; l < k; ++l) {
          const double ail = av[i * k + l];
          if (ail == 0.0) continue;
          double* brow = bd->grad.data() + l * n;
          for (std::size_t j = 0; j < n; ++j) brow[j] += ail * grow[j];
        }
      }
    }
  });
  return out;
}

Tensor transpose(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out = Tensor::zeros(n, m);
  {
    const double* av = a.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ov[j * m + i] = av[i * n + j];
  }
  auto ad = a.data(), od = out.data();
  maybe_record("transpose", {ad}, od, [ad, od, m, n]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double* g = od->grad.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ad->grad[i * n + j] += g[j * m + i];
  });
  return out;
}

namespace {

template <typename Fwd, typename Bwd>
Tensor binary_elementwise(const char* name, const Tensor& a, const Tensor& b,
                          Fwd fwd, Bwd bwd) {
  check_same_shape(name, a, b);
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  const std::size_t count = a.size();
  {
    const double* av = a.values().data();
    const double* bv = b.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < count; ++i) ov[i] = fwd(av[i], bv[i]);
  }
  auto ad = a.data(), bd = b.data(), od = out.data();
  maybe_record(name, {ad, bd}, od, [ad, bd, od, count, bwd]() {
    const double* g = od->grad.data();
    double* ga = nullptr;
    double* gb = nullptr;
    if (ad->requires_grad) {
      ensure_grad(*ad);
      ga = ad->grad.data();
    }
    if (bd->requires_grad) {
      ensure_grad(*bd);
      gb = bd->grad.data();
    }
    const double* av = ad->values.data();
    const double* bv = bd->values.data();
    for (std::size_t i = 0; i < count; ++i) bwd(g[i], av[i], bv[i], ga ? ga + i : nullptr, gb ? gb + i : nullptr);
  });
  return out;
}

template <typename Fwd, typename Bwd>
Tensor unary_elementwise(const char* name, const Tensor& a, Fwd fwd, Bwd bwd) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  const std::size_t count = a.size();
  {
    const double* av = a.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < count; ++i) ov[i] = fwd(av[i]);
  }
  auto ad = a.data(), od = out.data();
  maybe_record(name, {ad}, od, [ad, od, count, bwd]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double* g = od->grad.data();
    const double* x = ad->values.data();
    const double* y = od->values.data();
    for (std::size_t i = 0; i < count; ++i) ad->grad[i] += bwd(g[i], x[i], y[i]);
  });
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double g, double, double, double* ga, double* gb) {
        if (ga) *ga += g;
        if (gb) *gb += g;
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double g, double, double, double* ga, double* gb) {
        if (ga) *ga += g;
        if (gb) *gb -= g;
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double g, double x, double y, double* ga, double* gb) {
        if (ga) *ga += g * y;
        if (gb) *gb += g * x;
      });
}

Tensor divide(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "divide", a, b, [](double x, double y) { return x / y; },
      [](double g, double x, double y, double* ga, double* gb) {
        if (ga) *ga += g / y;
        if (gb) *gb -= g * x / (y * y);
      });
}

Tensor scale(const Tensor& a, double factor) {
  return unary_elementwise(
      "scale", a, [factor](double x) { return factor * x; },
      [factor](double g, double, double) { return factor * g; });
}

Tensor relu(const Tensor& a) {
  return unary_elementwise(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double g, double x, double) { return x > 0.0 ? g : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_elementwise(
      "sigmoid", a, [](double x) { return stable_sigmoid(x); },
      [](double g, double, double y) { return g * y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary_elementwise(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double g, double, double y) { return g * (1.0 - y * y); });
}

Tensor log(const Tensor& a) {
  const auto vals = a.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!(vals[i] > 0.0)) {
      throw std::domain_error("log: non-positive value " + std::to_string(vals[i]) +
                              " at coordinate " + std::to_string(i));
    }
  }
  return unary_elementwise(
      "log", a, [](double x) { return std::log(x); },
      [](double g, double x, double) { return g / x; });
}

Tensor sqrt(const Tensor& a) {
  const auto vals = a.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] < 0.0) {
      throw std::domain_error("sqrt: negative value " + std::to_string(vals[i]) +
                              " at coordinate " + std::to_string(i));
    }
  }
  return unary_elementwise(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double g, double, double y) { return y > 0.0 ? g / (2.0 * y) : 0.0; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("clamp: lo > hi");
  }
  return unary_elementwise(
      "clamp", a,
      [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
      [lo, hi](double g, double x, double) { return (x > lo && x < hi) ? g : 0.0; });
}

Tensor softmax_rows(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out = Tensor::zeros(m, n);
  {
    const double* av = a.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < m; ++i) {
      const double* xr = av + i * n;
      double* yr = ov + i * n;
      double mx = xr[0];
      for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, xr[j]);
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        yr[j] = std::exp(xr[j] - mx);
        total += yr[j];
      }
      for (std::size_t j = 0; j < n; ++j) yr[j] /= total;
    }
  }
  auto ad = a.data(), od = out.data();
  maybe_record("softmax_rows", {ad}, od, [ad, od, m, n]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double* g = od->grad.data();
    const double* y = od->values.data();
    for (std::size_t i = 0; i < m; ++i) {
      const double* gr = g + i * n;
      const double* yr = y + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += gr[j] * yr[j];
      for (std::size_t j = 0; j < n; ++j) ad->grad[i * n + j] += yr[j] * (gr[j] - dot);
    }
  });
  return out;
}

Tensor row_sum(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out = Tensor::zeros(m, 1);
  {
    const double* av = a.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += av[i * n + j];
      ov[i] = s;
    }
  }
  auto ad = a.data(), od = out.data();
  maybe_record("row_sum", {ad}, od, [ad, od, m, n]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double* g = od->grad.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ad->grad[i * n + j] += g[i];
  });
  return out;
}

Tensor col_sum(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out = Tensor::zeros(1, n);
  {
    const double* av = a.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ov[j] += av[i * n + j];
  }
  auto ad = a.data(), od = out.data();
  maybe_record("col_sum", {ad}, od, [ad, od, m, n]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double* g = od->grad.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ad->grad[i * n + j] += g[j];
  });
  return out;
}

Tensor sum_all(const Tensor& a) {
  const std::size_t count = a.size();
  Tensor out = Tensor::zeros(1, 1);
  {
    const double* av = a.values().data();
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += av[i];
    out.values_mut()[0] = s;
  }
  auto ad = a.data(), od = out.data();
  maybe_record("sum_all", {ad}, od, [ad, od, count]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double g = od->grad[0];
    for (std::size_t i = 0; i < count; ++i) ad->grad[i] += g;
  });
  return out;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  const std::size_t n = parts[0].cols();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.cols() != n) {
      throw std::invalid_argument("concat_rows: column mismatch " + parts[0].shape_str() +
                                  " vs " + p.shape_str());
    }
    total += p.rows();
  }
  Tensor out = Tensor::zeros(total, n);
  {
    double* ov = out.values_mut().data();
    std::size_t off = 0;
    for (const auto& p : parts) {
      const auto pv = p.values();
      std::copy(pv.begin(), pv.end(), ov + off);
      off += pv.size();
    }
  }
  std::vector<DataPtr> inputs;
  inputs.reserve(parts.size());
  for (const auto& p : parts) inputs.push_back(p.data());
  auto od = out.data();
  maybe_record("concat_rows", inputs, od, [inputs, od]() {
    const double* g = od->grad.data();
    std::size_t off = 0;
    for (const auto& in : inputs) {
      const std::size_t count = in->values.size();
      if (in->requires_grad) {
        ensure_grad(*in);
        for (std::size_t i = 0; i < count; ++i) in->grad[i] += g[off + i];
      }
      off += count;
    }
  });
  return out;
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  const std::size_t m = parts[0].rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rows() != m) {
      throw std::invalid_argument("concat_cols: row mismatch " + parts[0].shape_str() +
                                  " vs " + p.shape_str());
    }
    total += p.cols();
  }
  Tensor out = Tensor::zeros(m, total);
  {
    double* ov = out.values_mut().data();
    std::size_t off = 0;
    for (const auto& p : parts) {
      const auto pv = p.values();
      const std::size_t pc = p.cols();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < pc; ++j) ov[i * total + off + j] = pv[i * pc + j];
      off += pc;
    }
  }
  std::vector<DataPtr> inputs;
  inputs.reserve(parts.size());
  for (const auto& p : parts) inputs.push_back(p.data());
  auto od = out.data();
  maybe_record("concat_cols", inputs, od, [inputs, od, m, total]() {
    const double* g = od->grad.data();
    std::size_t off = 0;
    for (const auto& in : inputs) {
      const std::size_t pc = in->cols;
      if (in->requires_grad) {
        ensure_grad(*in);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < pc; ++j) in->grad[i * pc + j] += g[i * total + off + j];
      }
      off += pc;
    }
  });
  return out;
}

Tensor concat_rows(std::initializer_list<Tensor> parts) {
  std::vector<Tensor> v(parts);
  return concat_rows(std::span<const Tensor>(v));
}

Tensor concat_cols(std::initializer_list<Tensor> parts) {
  std::vector<Tensor> v(parts);
  return concat_cols(std::span<const Tensor>(v));
}

Tensor cosine(const Tensor& u, const Tensor& v) {
  if (u.cols() != 1 || v.cols() != 1 || u.rows() != v.rows()) {
    throw std::invalid_argument("cosine: expected equal-length column vectors, got " +
                                u.shape_str() + " and " + v.shape_str());
  }
  const std::size_t n = u.rows();
  const double* uv = u.values().data();
  const double* vv = v.values().data();
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += uv[i] * vv[i];
    nu += uv[i] * uv[i];
    nv += vv[i] * vv[i];
  }
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("cosine: zero-norm vector");
  }
  const double c = dot / (nu * nv);
  Tensor out = Tensor::scalar(c);
  auto ud = u.data(), vd = v.data(), od = out.data();
  maybe_record("cosine", {ud, vd}, od, [ud, vd, od, n, nu, nv, c]() {
    const double g = od->grad[0];
    const double* uv = ud->values.data();
    const double* vv = vd->values.data();
    if (ud->requires_grad) {
      ensure_grad(*ud);
      for (std::size_t i = 0; i < n; ++i) {
        ud->grad[i] += g * (vv[i] / (nu * nv) - c * uv[i] / (nu * nu));
      }
    }
    if (vd->requires_grad) {
      ensure_grad(*vd);
      for (std::size_t i = 0; i < n; ++i) {
        vd->grad[i] += g * (uv[i] / (nu * nv) - c * vv[i] / (nv * nv));
      }
    }
  });
  return out;
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> indices) {
  const std::size_t m = a.rows(), n = a.cols();
  for (std::size_t idx : indices) {
    if (idx >= m) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(idx) +
                                  " out of " + a.shape_str());
    }
  }
  Tensor out = Tensor::zeros(indices.size(), n);
  {
    const double* av = a.values().data();
    double* ov = out.values_mut().data();
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const double* src = av + indices[k] * n;
      std::copy(src, src + n, ov + k * n);
    }
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  auto ad = a.data(), od = out.data();
  maybe_record("gather_rows", {ad}, od, [ad, od, idx = std::move(idx), n]() {
    if (!ad->requires_grad) return;
    ensure_grad(*ad);
    const double* g = od->grad.data();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      double* dst = ad->grad.data() + idx[k] * n;
      const double* src = g + k * n;
      for (std::size_t j = 0; j < n; ++j) dst[j] += src[j];
    }
  });
  return out;
}

Tensor gather_rows(const Tensor& a, std::initializer_list<std::size_t> indices) {
  std::vector<std::size_t> v(indices);
  return gather_rows(a, std::span<const std::size_t>(v));
}

// ---------------------------------------------------------------------------
// Gradient checking

GradCheckResult grad_check(const std::function<Tensor(const Tensor&)>& fn,
                           const Tensor& point, double epsilon,
                           const std::vector<bool>* skip) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("grad_check: epsilon must be positive");
  }
  const std::size_t count = point.size();
  if (skip && skip->size() != count) {
    throw std::invalid_argument("grad_check: skip mask size mismatch");
  }

  std::vector<double> analytic(count, 0.0);
  {
    Tensor x = point.clone(/*trainable=*/true);
    Tape tape;
    Tensor loss = fn(x);
    if (!loss.is_scalar()) {
      throw std::invalid_argument("grad_check: function must return a scalar, got " +
                                  loss.shape_str());
    }
    tape.backward(loss);
    if (x.has_grad()) {
      auto g = x.grad();
      std::copy(g.begin(), g.end(), analytic.begin());
    }
  }

  GradCheckResult result;
  for (std::size_t i = 0; i < count; ++i) {
    if (skip && (*skip)[i]) continue;
    Tensor xp = point.clone();
    Tensor xm = point.clone();
    xp.values_mut()[i] += epsilon;
    xm.values_mut()[i] -= epsilon;
    const double fp = fn(xp).value();
    const double fm = fn(xm).value();
    const double numeric = (fp - fm) / (2.0 * epsilon);
    if (!std::isfinite(numeric) || !std::isfinite(analytic[i])) {
      throw std::runtime_error("grad_check: non-finite value at coordinate " +
                               std::to_string(i));
    }
    const double denom = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric)});
    const double rel = std::fabs(analytic[i] - numeric) / denom;
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_coord = i;
    }
  }
  return result;
}

}  // namespace preffend
