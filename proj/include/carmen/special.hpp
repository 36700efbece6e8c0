#pragma once

namespace carmen {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, nine terms). Throws std::domain_error
/// for non-positive or non-finite x.
double log_gamma(double x);

/// ln B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) by modified Lentz continued fraction.
/// Throws std::domain_error unless a, b > 0 and 0 <= x <= 1.
double reg_incomplete_beta(double a, double b, double x);

/// P(T <= x) for Student-t with df degrees of freedom.
double student_t_cdf(double x, double df);

double normal_cdf(double x);

/// Log density of a location-scale Student-t.
double student_t_logpdf(double x, double df, double loc, double scale);

double normal_logpdf(double x, double mean, double sd);

}  // namespace carmen
