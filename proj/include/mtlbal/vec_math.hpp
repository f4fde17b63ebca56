#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

namespace mtlbal {

/// Flat vector of 64-bit reals. Carrier for parameters and gradients.
/// Length is fixed at construction; entries are validated finite on
/// construction, and every exported operation validates its result.
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t n) : e_(n, 0.0) {}
  RealVector(std::initializer_list<double> init);
  explicit RealVector(std::vector<double> entries);

  std::size_t size() const noexcept { return e_.size(); }
  bool empty() const noexcept { return e_.empty(); }

  double operator[](std::size_t i) const noexcept { return e_[i]; }
  double& operator[](std::size_t i) noexcept { return e_[i]; }

  const std::vector<double>& entries() const noexcept { return e_; }

  auto begin() const noexcept { return e_.begin(); }
  auto end() const noexcept { return e_.end(); }
  auto begin() noexcept { return e_.begin(); }
  auto end() noexcept { return e_.end(); }

  bool operator==(const RealVector&) const = default;

  // Throws EvaluationError naming `context` if any entry is NaN/Inf.
  void check_finite(const char* context) const;

 private:
  std::vector<double> e_;
};

// Euclidean norm; 0 iff v is the zero vector.
double norm2(const RealVector& v);

double dot(const RealVector& a, const RealVector& b);

// Elementwise a*x + y. Inputs unmodified. Throws DimensionError on
// length mismatch.
RealVector scaled_add(double a, const RealVector& x, const RealVector& y);

// y += a*x in place (update loops).
void axpy_inplace(double a, const RealVector& x, RealVector& y);

// Central finite difference (f(x+h e_i) - f(x-h e_i)) / (2h) per
// coordinate. Independent gradient oracle for tests; throws
// EvaluationError if f returns a non-finite value.
RealVector finite_diff_grad(const std::function<double(const RealVector&)>& f,
                            const RealVector& x, double h);

}  // namespace mtlbal
