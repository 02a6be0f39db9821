#include "hadr/mlkr.hpp"

#include <cmath>
#include <numbers>

#include "hadr/eig.hpp"
#include "hadr/errors.hpp"
#include "hadr/optim.hpp"
#include "hadr/rng.hpp"

namespace hadr {

namespace {

constexpr double kKernelMassFloor = 1e-300;

// Pairwise squared embedding distances for E = X A^T (n x l).
Matrix pairwise_sq_dists(const Matrix& e) {
    const std::size_t n = e.rows(), l = e.cols();
    Matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < l; ++k) {
                const double diff = e(i, k) - e(j, k);
                s += diff * diff;
            }
            d(i, j) = d(j, i) = s;
        }
    }
    return d;
}

struct LooState {
    LooEstimates est;
    Matrix kernels;          // k_ij, zero diagonal
    std::vector<double> mass; // K_i = sum_{j != i} k_ij
};

LooState loo_state(const Matrix& a, const Matrix& x, const std::vector<int>& y, double sigma) {
    const std::size_t n = x.rows();
    const Matrix e = x * a.transpose();
    const Matrix d = pairwise_sq_dists(e);

    LooState st;
    st.kernels = Matrix(n, n, 0.0);
    st.mass.assign(n, 0.0);
    st.est.y_hat.assign(n, 0.0);

    double label_sum = 0.0;
    for (int v : y) label_sum += v;
    const double label_mean = label_sum / static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = gaussian_kernel(d(i, j), sigma);
            st.kernels(i, j) = st.kernels(j, i) = k;
            st.mass[i] += k;
            st.mass[j] += k;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (st.mass[i] < kKernelMassFloor) {
            st.est.y_hat[i] = label_mean; // isolated row, do not divide by ~0
            ++st.est.fallback_count;
            continue;
        }
        double num = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && y[j] == 1) num += st.kernels(i, j);
        }
        st.est.y_hat[i] = num / st.mass[i];
    }
    return st;
}

void require_block_shape(const Matrix& x, const std::vector<int>& y) {
    if (x.rows() != y.size()) {
        throw DataError("mlkr: feature rows and label count differ");
    }
    if (x.rows() < 2) {
        throw DataError("mlkr: need at least 2 samples");
    }
}

} // namespace

std::size_t MlkrConfig::resolve_out_dim(std::size_t m) const {
    if (out_dim > 0) {
        if (out_dim > m) {
            throw DataError("mlkr: out_dim exceeds feature count");
        }
        return out_dim;
    }
    const std::size_t half = (m + 1) / 2;
    return std::min(m, std::max<std::size_t>(2, half));
}

double mahalanobis_distance(const Matrix& a, std::span<const double> xi,
                            std::span<const double> xj) {
    if (xi.size() != xj.size() || xi.size() != a.cols()) {
        throw DataError("mahalanobis_distance: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        const auto row = a.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * (xi[c] - xj[c]);
        total += s * s;
    }
    return total;
}

double gaussian_kernel(double d, double sigma) {
    if (sigma <= 0.0) {
        throw DataError("gaussian_kernel: sigma must be positive");
    }
    if (d < 0.0) {
        throw DataError("gaussian_kernel: distance must be non-negative");
    }
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    return norm * std::exp(-d / (sigma * sigma));
}

LooEstimates loo_estimates(const Matrix& a, const Matrix& x, const std::vector<int>& y,
                           double sigma) {
    require_block_shape(x, y);
    return loo_state(a, x, y, sigma).est;
}

double mlkr_loss(const Matrix& a, const Matrix& x, const std::vector<int>& y, double sigma) {
    require_block_shape(x, y);
    const LooState st = loo_state(a, x, y, sigma);
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = st.est.y_hat[i] - static_cast<double>(y[i]);
        loss += e * e;
    }
    if (!std::isfinite(loss)) {
        throw TrainError("mlkr_loss: non-finite loss (sigma too small for the data scale?)");
    }
    return loss;
}

Matrix mlkr_gradient(const Matrix& a, const Matrix& x, const std::vector<int>& y, double sigma) {
    require_block_shape(x, y);
    const std::size_t n = x.rows(), m = x.cols();
    const LooState st = loo_state(a, x, y, sigma);

    // dL/dA = -(4/sigma^2) * A * sum_{i, j != i} w_ij (x_i - x_j)(x_i - x_j)^T
    // with w_ij = (y_hat_i - y_i)(y_j - y_hat_i) k_ij / K_i. Rows that fell
    // back to the label mean do not depend on A and contribute nothing.
    // Symmetrize the ordered-pair weights so each (i,j) scatter is built once.
    Matrix scatter(m, m, 0.0);
    std::vector<double> err(n);
    for (std::size_t i = 0; i < n; ++i) err[i] = st.est.y_hat[i] - static_cast<double>(y[i]);

    std::vector<char> live(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (st.mass[i] < kKernelMassFloor) live[i] = 0;
    }

    std::vector<double> diff(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = 0.0;
            if (live[i]) {
                w += err[i] * (static_cast<double>(y[j]) - st.est.y_hat[i]) *
                     st.kernels(i, j) / st.mass[i];
            }
            if (live[j]) {
                w += err[j] * (static_cast<double>(y[i]) - st.est.y_hat[j]) *
                     st.kernels(j, i) / st.mass[j];
            }
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < m; ++k) diff[k] = x(i, k) - x(j, k);
            for (std::size_t r = 0; r < m; ++r) {
                const double wr = w * diff[r];
                for (std::size_t c = r; c < m; ++c) scatter(r, c) += wr * diff[c];
            }
        }
    }
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = r + 1; c < m; ++c) scatter(c, r) = scatter(r, c);

    Matrix grad = a * scatter;
    grad *= -4.0 / (sigma * sigma);
    return grad;
}

MlkrTransform train_mlkr(const Matrix& x, const std::vector<int>& y, const MlkrConfig& cfg) {
    require_block_shape(x, y);
    bool has_pos = false, has_neg = false;
    for (int v : y) (v == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw DataError("train_mlkr: block must contain both classes");
    }

    const std::size_t m = x.cols();
    const std::size_t l = cfg.resolve_out_dim(m);

    Matrix a0(l, m, 0.0);
    if (cfg.init == MlkrConfig::Init::pca) {
        const EigenDecomposition eig = sym_eig(covariance(x, /*centered=*/false));
        for (std::size_t r = 0; r < l; ++r)
            for (std::size_t c = 0; c < m; ++c) a0(r, c) = eig.eigenvectors(c, r);
    } else {
        Rng rng(derive_seed(cfg.seed, "mlkr-init", 0));
        for (std::size_t r = 0; r < l; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                a0(r, c) = (r == c ? 1.0 : 0.0) + cfg.init_noise * rng.normal();
            }
        }
    }

    // Rescale the start so the mean pairwise embedded squared distance is
    // O(1) relative to sigma^2. Unscaled, wide inputs put every kernel deep
    // in the exponential tail where the loss surface is flat and the
    // optimizer stalls on its first step.
    if (cfg.init_distance_target > 0.0) {
        const Matrix e0 = x * a0.transpose();
        double mean_d = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < e0.rows(); ++i) {
            for (std::size_t j = i + 1; j < e0.rows(); ++j) {
                double d = 0.0;
                for (std::size_t k = 0; k < e0.cols(); ++k) {
                    const double diff = e0(i, k) - e0(j, k);
                    d += diff * diff;
                }
                mean_d += d;
                ++pairs;
            }
        }
        mean_d /= static_cast<double>(pairs);
        if (mean_d > 0.0) {
            a0 *= std::sqrt(cfg.init_distance_target * cfg.sigma * cfg.sigma / mean_d);
        }
    }

    const Objective objective = [&](const Matrix& a, Matrix* grad) {
        if (grad) *grad = mlkr_gradient(a, x, y, cfg.sigma);
        return mlkr_loss(a, x, y, cfg.sigma);
    };

    GdOptions opt;
    opt.max_iters = cfg.max_iters;
    opt.tol = cfg.tol;
    GdResult res;
    try {
        res = gradient_descent(objective, std::move(a0), opt);
    } catch (const TrainError& e) {
        throw TrainError(std::string("train_mlkr: ") + e.what());
    }

    MlkrTransform t;
    t.a = std::move(res.x);
    t.sigma = cfg.sigma;
    t.training_trace = std::move(res.trace);
    t.loo_fallbacks = loo_estimates(t.a, x, y, cfg.sigma).fallback_count;
    return t;
}

MlkrTransform train_mlkr(const DataBlock& block, const MlkrConfig& cfg) {
    return train_mlkr(block.data.features, block.data.labels, cfg);
}

Matrix embed(const MlkrTransform& t, const Matrix& x) {
    if (x.cols() != t.a.cols()) {
        throw DataError("embed: feature count differs from the transform's width");
    }
    return x * t.a.transpose();
}

Matrix project_by_m_eigvecs(const MlkrTransform& t, const Matrix& x, std::size_t l) {
    if (t.a.rows() != t.a.cols()) {
        throw DataError("project_by_m_eigvecs: transform must hold a square A");
    }
    if (l > t.a.cols()) {
        throw DataError("project_by_m_eigvecs: l exceeds feature count");
    }
    if (x.cols() != t.a.cols()) {
        throw DataError("project_by_m_eigvecs: dimension mismatch");
    }
    const Matrix m_mat = t.a.transpose() * t.a;
    const EigenDecomposition eig = sym_eig(m_mat);
    return eig.project(x, l);
}

} // namespace hadr
