#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rpd/errors.hpp"

namespace rpd {

using Vector = std::vector<double>;

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot", a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_sq(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(norm2_sq(a)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dist2", a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, Vector& y) {
  if (x.size() != y.size()) throw DimensionError("axpy", y.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector scaled(std::span<const double> x, double alpha) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

inline Vector sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("sub", a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("add", a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector concat(std::span<const double> a, std::span<const double> b) {
  Vector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace vec

// Compensated accumulator for long weighted sums.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Element-wise compensated accumulation of weight * values.
class KahanVectorSum {
 public:
  explicit KahanVectorSum(std::size_t n) : s_(n, 0.0), c_(n, 0.0) {}
  void add_scaled(double weight, std::span<const double> v) {
    if (v.size() != s_.size())
      throw DimensionError("KahanVectorSum::add_scaled", s_.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double y = weight * v[i] - c_[i];
      const double t = s_[i] + y;
      c_[i] = (t - s_[i]) - y;
      s_[i] = t;
    }
  }
  const Vector& value() const { return s_; }
  std::size_t size() const { return s_.size(); }

 private:
  Vector s_;
  Vector c_;
};

}  // namespace rpd
