#pragma once

#include <vector>

#include "mtlbal/vec_math.hpp"

namespace mtlbal {

/// Loss transformation applied before gradient aggregation. `log` makes
/// the shared-parameter gradients invariant to per-task loss scale.
enum class TransformKind { identity, log };

// identity -> ell; log -> ln(ell). Throws DomainError for ell <= 0
// under log.
double transform_loss(TransformKind kind, double ell);

// Gradient of the transformed loss given the raw loss value and its
// gradient: identity -> g; log -> g / ell (chain rule).
RealVector transform_grad(TransformKind kind, double ell, const RealVector& g);

struct InnerMinResult {
  double s_star;  // minimizer
  double value;   // minimum
};

// Numerically minimizes f(s) = exp(s)*x - s - 1 over s for x > 0.
// f is strictly convex; the minimum value equals ln(x), which is how the
// log transform recovers the optimal learned per-task rescaling.
// Bracketed golden-section search, derivative-free apart from the
// bracket test; `tol` bounds the bracket width at termination.
InnerMinResult imtl_l_inner_min(double x, double tol = 1e-10);

// Gradient of the geometric mean loss (prod ell_t)^(1/T):
// (1/T) * (prod ell_t)^(1/T) * sum_t g_t / ell_t.
RealVector gls_combined_gradient(const std::vector<double>& losses,
                                 const std::vector<RealVector>& grads);

}  // namespace mtlbal
