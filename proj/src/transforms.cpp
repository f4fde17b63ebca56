#include "mtlbal/transforms.hpp"

#include <cmath>
#include <string>

#include "mtlbal/errors.hpp"

namespace mtlbal {

namespace {

double require_positive_loss(double ell, const char* op) {
  if (!(ell > 0.0)) {
    throw DomainError(std::string(op) + ": loss must be > 0, got " +
                      std::to_string(ell));
  }
  return ell;
}

}  // namespace

double transform_loss(TransformKind kind, double ell) {
  switch (kind) {
    case TransformKind::identity:
      return ell;
    case TransformKind::log:
      return std::log(require_positive_loss(ell, "transform_loss(log)"));
  }
  throw DomainError("transform_loss: unknown kind");
}

RealVector transform_grad(TransformKind kind, double ell,
                          const RealVector& g) {
  switch (kind) {
    case TransformKind::identity:
      return g;
    case TransformKind::log: {
      require_positive_loss(ell, "transform_grad(log)");
      RealVector out(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] / ell;
      out.check_finite("transform_grad");
      return out;
    }
  }
  throw DomainError("transform_grad: unknown kind");
}

InnerMinResult imtl_l_inner_min(double x, double tol) {
  require_positive_loss(x, "imtl_l_inner_min");
  if (!(tol > 0.0)) throw DomainError("imtl_l_inner_min: tol must be > 0");

  const auto f = [x](double s) { return std::exp(s) * x - s - 1.0; };
  // f'(s) = exp(s)*x - 1; the minimizer is interior iff f' changes sign.
  const auto fprime_nonneg = [x](double s) { return std::exp(s) * x >= 1.0; };

  double lo = -50.0, hi = 50.0;
  while (fprime_nonneg(lo)) lo -= (hi - lo);
  while (!fprime_nonneg(hi)) hi += (hi - lo);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double s_star = 0.5 * (a + b);
  return InnerMinResult{s_star, f(s_star)};
}

RealVector gls_combined_gradient(const std::vector<double>& losses,
                                 const std::vector<RealVector>& grads) {
  if (losses.empty() || losses.size() != grads.size()) {
    throw DimensionError("gls_combined_gradient: need matching nonempty losses/grads");
  }
  const std::size_t t_count = losses.size();
  const std::size_t dim = grads[0].size();

  double mean_log = 0.0;
  for (double ell : losses) {
    mean_log += std::log(require_positive_loss(ell, "gls_combined_gradient"));
  }
  mean_log /= static_cast<double>(t_count);
  const double geo_mean = std::exp(mean_log);

  RealVector out(dim);
  for (std::size_t t = 0; t < t_count; ++t) {
    if (grads[t].size() != dim) {
      throw DimensionError("gls_combined_gradient: gradient length mismatch");
    }
    axpy_inplace(1.0 / losses[t], grads[t], out);
  }
  for (double& v : out) v *= geo_mean / static_cast<double>(t_count);
  out.check_finite("gls_combined_gradient");
  return out;
}

}  // namespace mtlbal
