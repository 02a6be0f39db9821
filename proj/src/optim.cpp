#include "hadr/optim.hpp"

#include <cmath>
#include <string>

#include "hadr/errors.hpp"

namespace hadr {

GdResult gradient_descent(const Objective& f, Matrix x0, const GdOptions& opt) {
    GdResult res;
    Matrix grad(x0.rows(), x0.cols());
    double fx = f(x0, &grad);
    if (!std::isfinite(fx) || !grad.all_finite()) {
        throw TrainError("gradient_descent: non-finite objective or gradient at x0");
    }
    res.trace.push_back(fx);
    res.x = std::move(x0);

    double step = opt.init_step;
    for (int iter = 0; iter < opt.max_iters; ++iter) {
        double gnorm2 = 0.0;
        for (double g : grad.data()) gnorm2 += g * g;
        if (gnorm2 == 0.0) {
            res.converged = true;
            break;
        }

        double t = step;
        Matrix candidate;
        double f_new = fx;
        bool accepted = false;
        while (t >= opt.min_step) {
            candidate = res.x;
            for (std::size_t i = 0; i < candidate.data().size(); ++i) {
                candidate.data()[i] -= t * grad.data()[i];
            }
            f_new = f(candidate, nullptr);
            if (std::isfinite(f_new) && f_new <= fx - opt.armijo * t * gnorm2) {
                accepted = true;
                break;
            }
            t *= opt.shrink;
        }
        if (!accepted) break; // no further decrease possible at this scale

        res.x = std::move(candidate);
        const double f_prev = fx;
        fx = f(res.x, &grad);
        if (!std::isfinite(fx) || !grad.all_finite()) {
            throw TrainError("gradient_descent: non-finite value at iteration " +
                             std::to_string(iter + 1));
        }
        res.trace.push_back(fx);
        res.iterations = iter + 1;
        step = t * 2.0; // try a slightly bolder step next time
        if (std::abs(f_prev - fx) < opt.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double check_gradient(const std::function<double(const Matrix&)>& f,
                      const Matrix& analytic_grad, const Matrix& x, double h) {
    if (h <= 0.0) {
        throw std::invalid_argument("check_gradient: h must be positive");
    }
    double worst = 0.0;
    Matrix probe = x;
    for (std::size_t i = 0; i < probe.data().size(); ++i) {
        const double orig = probe.data()[i];
        probe.data()[i] = orig + h;
        const double fp = f(probe);
        probe.data()[i] = orig - h;
        const double fm = f(probe);
        probe.data()[i] = orig;
        const double fd = (fp - fm) / (2.0 * h);
        const double rel = std::abs(analytic_grad.data()[i] - fd) / std::max(std::abs(fd), 1e-8);
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace hadr
