#pragma once

#include <span>
#include <vector>

namespace sigtrade {

double mean(std::span<const double> x);

// Sample variance / standard deviation with the n-1 denominator.
double sample_variance(std::span<const double> x);
double sample_sd(std::span<const double> x);

double normal_pdf(double x);
double normal_cdf(double x);
double normal_sf(double x);

// Upper tail of the chi-squared distribution with df degrees of freedom.
double chi_squared_sf(double x, double df);

// Upper tail of the Kolmogorov distribution: Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_sf(double lambda);

// Linear-interpolation quantile of a sorted sample (R type 7): for q in [0,1],
// index h = (n-1) q, result = x[floor(h)] + (h - floor(h)) (x[floor(h)+1] - x[floor(h)]).
double quantile_sorted(std::span<const double> sorted, double q);

// Autocorrelations r_1..r_max_lag of the demeaned series, normalised by the
// lag-0 sum of squares. A zero-variance series yields all-zero correlations.
std::vector<double> autocorrelations(std::span<const double> x, int max_lag);

struct LjungBox {
  std::vector<double> stat;  // Q(h) for h = 1..max_lag
  std::vector<double> p;     // chi-squared upper tail with h dof
};

// Ljung-Box portmanteau: Q(h) = n (n+2) sum_{j<=h} r_j^2 / (n-j).
LjungBox ljung_box(std::span<const double> x, int max_lag);

}  // namespace sigtrade
