// Adaptive Gauss-Kronrod (15,7) quadrature with interval bisection.
// Nodes never touch interval endpoints, so integrands that are singular
// only at an endpoint limit are evaluated safely.

#pragma once

#include <functional>

namespace csim {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    int evaluations = 0;
};

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_intervals = 4000);

} // namespace csim
