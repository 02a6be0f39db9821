#pragma once

#include <vector>

#include "hadr/matrix.hpp"

namespace hadr {

// Result of a symmetric eigendecomposition. Eigenvalues are sorted
// descending; eigenvectors() holds the matching eigenvectors as columns
// and is orthonormal.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors; // m x k, column j pairs with eigenvalues[j]

    // Projection of x onto the top-l eigenvectors: x_hat = V_l^T x, row-wise.
    Matrix project(const Matrix& x, std::size_t l) const;
};

// Cyclic Jacobi rotations. Symmetric matrices only (checked within 1e-10);
// adequate and simple at the feature counts this pipeline sees (m <= 37).
EigenDecomposition sym_eig(const Matrix& s);

// Scatter matrix C = sum_i x_i x_i^T, optionally after subtracting column
// means, optionally divided by n. The unnormalized, uncentered form is the
// default used by the supervised-PCA path.
Matrix covariance(const Matrix& x, bool centered, bool normalize = false);

// Projects rows of x onto the top-l eigenvectors of covariance(x, false).
Matrix pca_project(const Matrix& x, std::size_t l);

} // namespace hadr
