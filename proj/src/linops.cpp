#include "rpd/linops.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "json.hpp"
#include "rpd/errors.hpp"

namespace rpd {

BlockLinearOperator::BlockLinearOperator(int n, std::vector<int> block_dims,
                                         Vector matrix)
    : n_(n), block_dims_(std::move(block_dims)) {
  if (n_ <= 0) throw DimensionError("BlockLinearOperator: n must be positive");
  if (block_dims_.empty())
    throw DimensionError("BlockLinearOperator: need at least one block");
  m_ = 0;
  row_offsets_.reserve(block_dims_.size());
  for (int d : block_dims_) {
    if (d <= 0)
      throw DimensionError("BlockLinearOperator: block dims must be positive");
    row_offsets_.push_back(m_);
    m_ += d;
  }
  if (matrix.size() != static_cast<std::size_t>(m_) * n_)
    throw DimensionError("BlockLinearOperator matrix",
                         static_cast<std::size_t>(m_) * n_, matrix.size());
  data_ = std::move(matrix);
}

BlockLinearOperator BlockLinearOperator::dense(int rows, int cols,
                                               Vector matrix) {
  return BlockLinearOperator(cols, {rows}, std::move(matrix));
}

BlockLinearOperator BlockLinearOperator::identity(int n) {
  Vector data(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) data[static_cast<std::size_t>(i) * n + i] = 1.0;
  return dense(n, n, std::move(data));
}

Vector BlockLinearOperator::apply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n_))
    throw DimensionError("apply: primal vector", n_, x.size());
  Vector out(m_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const double* row = data_.data() + static_cast<std::size_t>(r) * n_;
    double s = 0.0;
    for (int c = 0; c < n_; ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return out;
}

Vector BlockLinearOperator::apply_block(int i, std::span<const double> x) const {
  if (i < 1 || i > p())
    throw DimensionError("apply_block: block index " + std::to_string(i) +
                         " outside 1.." + std::to_string(p()));
  if (x.size() != static_cast<std::size_t>(n_))
    throw DimensionError("apply_block: primal vector", n_, x.size());
  const int off = row_offset(i);
  const int d = block_dim(i);
  Vector out(d, 0.0);
  for (int r = 0; r < d; ++r) {
    const double* row = data_.data() + static_cast<std::size_t>(off + r) * n_;
    double s = 0.0;
    for (int c = 0; c < n_; ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return out;
}

Vector BlockLinearOperator::adjoint_apply(std::span<const double> y) const {
  if (y.size() != static_cast<std::size_t>(m_))
    throw DimensionError("adjoint_apply: dual vector", m_, y.size());
  Vector out(n_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const double* row = data_.data() + static_cast<std::size_t>(r) * n_;
    const double yr = y[r];
    for (int c = 0; c < n_; ++c) out[c] += row[c] * yr;
  }
  return out;
}

BlockLinearOperator BlockLinearOperator::transposed() const {
  Vector data(static_cast<std::size_t>(n_) * m_, 0.0);
  for (int r = 0; r < m_; ++r)
    for (int c = 0; c < n_; ++c)
      data[static_cast<std::size_t>(c) * m_ + r] = entry(r, c);
  return dense(n_, m_, std::move(data));
}

BlockLinearOperator BlockLinearOperator::scaled(double c) const {
  Vector data = data_;
  for (double& v : data) v *= c;
  return BlockLinearOperator(n_, block_dims_, std::move(data));
}

BlockLinearOperator BlockLinearOperator::with_blocks(int p) const {
  if (p < 1 || m_ % p != 0)
    throw DimensionError("with_blocks: " + std::to_string(m_) +
                         " rows not divisible into " + std::to_string(p) +
                         " equal blocks");
  return BlockLinearOperator(n_, std::vector<int>(p, m_ / p), data_);
}

double BlockLinearOperator::frobenius_norm() const {
  return vec::norm2(data_);
}

namespace {

// One power sweep on B = A^T A; returns the Rayleigh quotient v' B v with
// the input v unit-normalized, and replaces v by B v normalized (when Bv is
// nonzero).
double power_sweep(const BlockLinearOperator& a, Vector& v) {
  const Vector av = a.apply(v);
  Vector bv = a.adjoint_apply(av);
  const double rayleigh = vec::dot(v, bv);  // = ||A v||^2 for unit v
  const double bn = vec::norm2(bv);
  if (bn > 0.0) {
    for (double& x : bv) x /= bn;
    v = std::move(bv);
  }
  return rayleigh;
}

Vector normalized_ramp(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
  const double nn = vec::norm2(v);
  for (double& x : v) x /= nn;
  return v;
}

}  // namespace

double spectral_norm(const BlockLinearOperator& a, double rel_tol,
                     int max_iters) {
  if (rel_tol <= 0.0) throw Error("spectral_norm: rel_tol must be positive");
  if (a.frobenius_norm() == 0.0) return 0.0;

  Vector v(a.n(), 1.0 / std::sqrt(static_cast<double>(a.n())));
  bool restarted = false;
  double prev = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    const double lambda = power_sweep(a, v);
    if (lambda == 0.0 && !restarted) {
      // All-ones start lies in the null space; deterministic escape.
      v = normalized_ramp(a.n());
      restarted = true;
      prev = -1.0;
      continue;
    }
    const double sigma = std::sqrt(std::max(lambda, 0.0));
    if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * std::max(sigma, 1e-300))
      return sigma;
    prev = sigma;
  }
  throw ConvergenceError("spectral_norm: no convergence within " +
                             std::to_string(max_iters) + " iterations",
                         prev);
}

BlockLinearOperator operator_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("n") || !j.contains("block_dims") || !j.contains("matrix"))
    throw ConfigError("operator JSON needs fields n, block_dims, matrix");
  const int n = j.at("n").get<int>();
  const auto dims = j.at("block_dims").get<std::vector<int>>();
  const auto matrix = j.at("matrix").get<Vector>();
  return BlockLinearOperator(n, dims, matrix);
}

std::string operator_to_json_text(const BlockLinearOperator& a) {
  nlohmann::json j;
  j["n"] = a.n();
  j["block_dims"] = a.block_dims();
  j["matrix"] = a.matrix();
  return j.dump();
}

}  // namespace rpd
