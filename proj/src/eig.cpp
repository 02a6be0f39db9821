#include "hadr/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hadr {

Matrix EigenDecomposition::project(const Matrix& x, std::size_t l) const {
    if (l > eigenvalues.size()) {
        throw std::invalid_argument("project: l exceeds available eigenvectors");
    }
    Matrix out(x.rows(), l);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                s += eigenvectors(k, j) * x(i, k);
            }
            out(i, j) = s;
        }
    }
    return out;
}

EigenDecomposition sym_eig(const Matrix& s) {
    const std::size_t n = s.rows();
    if (n == 0 || s.cols() != n) {
        throw std::invalid_argument("sym_eig: matrix must be square and non-empty");
    }
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            asym = std::max(asym, std::abs(s(i, j) - s(j, i)));
    if (asym > 1e-10 * std::max(1.0, s.max_abs())) {
        throw std::invalid_argument("sym_eig: input is not symmetric within tolerance");
    }

    // Work on the symmetrized copy; accumulate rotations in v.
    Matrix a = s;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = m;
        }
    Matrix v = Matrix::identity(n);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += std::abs(a(p, q));
        if (off == 0.0) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double scaled = 100.0 * std::abs(apq);
                // Skip rotations that cannot change anything at double precision.
                if (sweep > 3 &&
                    scaled <= std::numeric_limits<double>::epsilon() * std::abs(a(p, p)) &&
                    scaled <= std::numeric_limits<double>::epsilon() * std::abs(a(q, q))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                if (apq == 0.0) continue;

                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = a(p, k) = akp - sn * (akq + tau * akp);
                    a(k, q) = a(q, k) = akq + sn * (akp - tau * akq);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp - sn * (vkq + tau * vkp);
                    v(k, q) = vkq + sn * (vkp - tau * vkq);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, j) = v(k, order[j]);
    }
    return out;
}

Matrix covariance(const Matrix& x, bool centered, bool normalize) {
    const std::size_t n = x.rows(), m = x.cols();
    if (n == 0) {
        throw std::invalid_argument("covariance: empty input");
    }
    std::vector<double> mean(m, 0.0);
    if (centered) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) mean[j] += x(i, j);
        for (double& v : mean) v /= static_cast<double>(n);
    }
    Matrix c(m, m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double xj = x(i, j) - mean[j];
            for (std::size_t k = j; k < m; ++k) {
                c(j, k) += xj * (x(i, k) - mean[k]);
            }
        }
    }
    const double scale = normalize ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j; k < m; ++k) {
            c(j, k) *= scale;
            c(k, j) = c(j, k);
        }
    return c;
}

Matrix pca_project(const Matrix& x, std::size_t l) {
    if (l > x.cols()) {
        throw std::invalid_argument("pca_project: l exceeds feature count");
    }
    const EigenDecomposition eig = sym_eig(covariance(x, /*centered=*/false));
    return eig.project(x, l);
}

} // namespace hadr
