#pragma once

#include <functional>
#include <vector>

#include "hadr/matrix.hpp"

namespace hadr {

// Objective contract: return the loss at x; when grad is non-null, also fill
// it (same shape as x). Value-only calls keep line searches cheap.
using Objective = std::function<double(const Matrix& x, Matrix* grad)>;

struct GdOptions {
    double init_step = 1.0;
    double shrink = 0.5;    // backtracking factor
    double armijo = 1e-4;   // sufficient-decrease constant
    double min_step = 1e-14;
    int max_iters = 200;
    double tol = 1e-7;      // stop when |f_t - f_{t-1}| < tol
};

struct GdResult {
    Matrix x;
    std::vector<double> trace; // objective at x0 and after each accepted step
    int iterations = 0;
    bool converged = false;
};

// Gradient descent with backtracking line search (Armijo). The trace is
// non-increasing: a step is only accepted on sufficient decrease. Throws
// TrainError on a non-finite objective or gradient at an iterate.
GdResult gradient_descent(const Objective& f, Matrix x0, const GdOptions& opt = {});

// Max over coordinates of |analytic - central difference| / max(|fd|, 1e-8).
double check_gradient(const std::function<double(const Matrix&)>& f,
                      const Matrix& analytic_grad, const Matrix& x, double h);

} // namespace hadr
