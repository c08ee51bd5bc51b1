#pragma once

#include <vector>

namespace lcrec {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Upper-tail probability of a chi-square variate with df degrees of freedom.
double chi_square_sf(double x, int df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;  // two-sided
    double df = 0.0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom; two-sided p via the incomplete beta. Each sample needs >= 2
// observations.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace lcrec
