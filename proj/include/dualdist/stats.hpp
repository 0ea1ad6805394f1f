#pragma once

#include <vector>

namespace dualdist {

// Standard normal pdf.
double normal_pdf(double x);

// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a).
double gamma_p(double a, double x);

// chi-square CDF with k degrees of freedom.
double chi2_cdf(double x, double k);

// One-sample Kolmogorov-Smirnov test of `samples` against a CDF given as a
// callable; returns the asymptotic p-value.
double ks_test_pvalue(std::vector<double> samples, double (*cdf)(double, double),
                      double cdf_param);

// Asymptotic Kolmogorov distribution complement Q(lambda) = P(D > lambda).
double kolmogorov_q(double lambda);

// Gauss-Legendre nodes/weights on [a,b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace dualdist
