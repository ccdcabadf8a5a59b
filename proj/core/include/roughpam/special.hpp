#pragma once

namespace roughpam {

// Gauss hypergeometric 2F1(a, b; c; z) for z in [0, 1), c - a - b not an integer.
double hyp2f1_unit(double a, double b, double c, double z);

// E[|X|^p |Y|^p] for a centered Gaussian pair with standard deviations sx, sy
// and correlation rho, p > -1/2.
double bivariate_abs_moment(double p, double sx, double sy, double rho);

// E|X|^p for X ~ N(0, sigma^2), p > -1.
double gaussian_abs_moment(double p, double sigma);

}  // namespace roughpam
