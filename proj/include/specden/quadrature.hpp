#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace specden::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
    bool ok() const noexcept { return std::isfinite(value) && std::isfinite(error); }
};

/// Adaptive 61-point Gauss-Kronrod on [a, b]; `tol` is relative to the L1 norm.
template <class F>
Estimate adaptive(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 18) {
    if (a == b) return {};
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        std::forward<F>(f), a, b, max_depth, tol, &err);
    return {v, err};
}

/// Tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
template <class F>
Estimate endpoint_singular(F&& f, double a, double b, double tol = 1e-12) {
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator.integrate(std::forward<F>(f), a, b, tol, &err, &l1);
    return {v, err};
}

}  // namespace specden::quad
