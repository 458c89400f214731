#pragma once

namespace vlab::special {

[[nodiscard]] double normal_cdf(double x);
[[nodiscard]] double normal_sf(double x);

/// Inverse standard normal CDF (Wichura AS241, ~1e-16 relative).
[[nodiscard]] double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
[[nodiscard]] double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
[[nodiscard]] double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
[[nodiscard]] double beta_inc(double a, double b, double x);

[[nodiscard]] double chi2_cdf(double x, double df);
[[nodiscard]] double chi2_sf(double x, double df);

[[nodiscard]] double student_t_cdf(double t, double df);
/// P(|T| >= |t|) for Student t with df degrees of freedom.
[[nodiscard]] double student_t_two_sided(double t, double df);

}  // namespace vlab::special
