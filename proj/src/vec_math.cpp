#include "mtlbal/vec_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mtlbal/errors.hpp"

namespace mtlbal {

namespace {

void require_same_size(const RealVector& x, const RealVector& y,
                       const char* op) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
}

}  // namespace

RealVector::RealVector(std::initializer_list<double> init) : e_(init) {
  check_finite("RealVector");
}

RealVector::RealVector(std::vector<double> entries) : e_(std::move(entries)) {
  check_finite("RealVector");
}

void RealVector::check_finite(const char* context) const {
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (!std::isfinite(e_[i])) {
      throw EvaluationError(std::string(context) + ": non-finite entry at index " +
                            std::to_string(i));
    }
  }
}

double norm2(const RealVector& v) {
  // Scaled two-pass form: keeps ||v|| > 0 for any nonzero v (a naive
  // sum of squares underflows below ~1e-154) and avoids overflow.
  double maxabs = 0.0;
  for (double x : v) maxabs = std::max(maxabs, std::fabs(x));
  if (maxabs == 0.0) return 0.0;
  double sumsq = 0.0;
  for (double x : v) {
    const double r = x / maxabs;
    sumsq += r * r;
  }
  const double n = maxabs * std::sqrt(sumsq);
  if (!std::isfinite(n)) throw EvaluationError("norm2: non-finite result");
  return n;
}

double dot(const RealVector& a, const RealVector& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  if (!std::isfinite(s)) throw EvaluationError("dot: non-finite result");
  return s;
}

RealVector scaled_add(double a, const RealVector& x, const RealVector& y) {
  require_same_size(x, y, "scaled_add");
  RealVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
  out.check_finite("scaled_add");
  return out;
}

void axpy_inplace(double a, const RealVector& x, RealVector& y) {
  require_same_size(x, y, "axpy_inplace");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
  y.check_finite("axpy_inplace");
}

RealVector finite_diff_grad(const std::function<double(const RealVector&)>& f,
                            const RealVector& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite_diff_grad: h must be > 0");
  RealVector grad(x.size());
  RealVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double fp = f(probe);
    probe[i] = xi - h;
    const double fm = f(probe);
    probe[i] = xi;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw EvaluationError("finite_diff_grad: non-finite f at coordinate " +
                            std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  grad.check_finite("finite_diff_grad");
  return grad;
}

}  // namespace mtlbal
