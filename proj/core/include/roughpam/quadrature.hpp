#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace roughpam {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Double-exponential rule on [a, b]; copes with integrable endpoint singularities.
template <class F>
QuadResult integrate_tanh_sinh(F&& f, double a, double b, double tol = 1e-12) {
    if (a == b) return {};
    static thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double v = rule.integrate(f, a, b, tol, &err, &l1, &levels);
    return {v, err};
}

// Adaptive Gauss-Kronrod 21 on a smooth finite interval.
template <class F>
QuadResult integrate_gk21(F&& f, double a, double b, double tol = 1e-12, unsigned depth = 12) {
    if (a == b) return {};
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, depth, tol, &err, &l1);
    return {v, err};
}

// [a, infinity) with the exp-sinh rule.
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, double tol = 1e-12) {
    static thread_local boost::math::quadrature::exp_sinh<double> rule(12);
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double v = rule.integrate(f, a, std::numeric_limits<double>::infinity(), tol, &err, &l1, &levels);
    return {v, err};
}

}  // namespace roughpam
