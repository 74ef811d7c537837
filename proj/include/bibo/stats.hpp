#pragma once

#include <span>

namespace bibo {

double mean(std::span<const double> values);

// ddof = 1; returns 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Survival function P(T > t) of Student's t with df degrees of freedom.
double student_t_sf(double t, double df);

// One-sample, one-sided test of H1: mean > mu0. Returns the p-value.
double t_test_pvalue_greater(std::span<const double> values, double mu0);

// Half width of the 95% confidence interval of the mean (normal approximation).
double ci95_half_width(std::span<const double> values);

}  // namespace bibo
