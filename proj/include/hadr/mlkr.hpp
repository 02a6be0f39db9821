#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hadr/dbc.hpp"
#include "hadr/matrix.hpp"

namespace hadr {

struct MlkrConfig {
    std::size_t out_dim = 0;     // 0 = auto: min(m, max(2, ceil(m/2)))
    double sigma = 1.0;          // kernel width; redundant with the scale of A
    int max_iters = 200;
    double tol = 1e-7;
    enum class Init { identity_noise, pca } init = Init::identity_noise;
    double init_noise = 1e-3;
    // The initial A is rescaled so the mean pairwise embedded squared
    // distance equals this multiple of sigma^2 (0 disables the rescale).
    double init_distance_target = 2.0;
    std::uint64_t seed = 0;

    std::size_t resolve_out_dim(std::size_t m) const;
};

// Learned linear map A (out_dim x m). M = A^T A is the induced Mahalanobis
// matrix, symmetric PSD by construction.
struct MlkrTransform {
    Matrix a;
    double sigma = 1.0;
    std::vector<double> training_trace; // loss at init and per accepted step
    int loo_fallbacks = 0; // rows whose kernel mass underflowed during training
};

// ||A(xi - xj)||^2, the squared distance in the embedding.
double mahalanobis_distance(const Matrix& a, std::span<const double> xi,
                            std::span<const double> xj);

// Gaussian kernel (1/(sigma*sqrt(2*pi))) * exp(-d/sigma^2); d >= 0.
double gaussian_kernel(double d, double sigma);

struct LooEstimates {
    std::vector<double> y_hat;
    int fallback_count = 0; // rows where all kernel mass underflowed
};

// Leave-one-out kernel-regression estimates: y_hat_i is the kernel-weighted
// mean of every other row's label. A row whose total kernel mass underflows
// falls back to the plain label mean (counted).
LooEstimates loo_estimates(const Matrix& a, const Matrix& x, const std::vector<int>& y,
                           double sigma);

// Squared leave-one-out error and its gradient in A.
double mlkr_loss(const Matrix& a, const Matrix& x, const std::vector<int>& y, double sigma);
Matrix mlkr_gradient(const Matrix& a, const Matrix& x, const std::vector<int>& y, double sigma);

// Minimizes the leave-one-out loss by gradient descent with backtracking.
MlkrTransform train_mlkr(const Matrix& x, const std::vector<int>& y, const MlkrConfig& cfg);
MlkrTransform train_mlkr(const DataBlock& block, const MlkrConfig& cfg);

// Row i of the result is A * x_i.
Matrix embed(const MlkrTransform& t, const Matrix& x);

// Supervised-PCA route: for a square A, projects onto the top-l
// eigenvectors of M = A^T A. Distances are reconstructed per-axis by the
// eigenvalues, which is what makes the two constructions interchangeable.
Matrix project_by_m_eigvecs(const MlkrTransform& t, const Matrix& x, std::size_t l);

} // namespace hadr
