#pragma once

// Symmetric / SPD matrix types, Jacobi eigensolver, matrix logarithm,
// Log-Euclidean distance and the Gaussian Log-Euclidean kernel.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lemsched/matrix.hpp"

namespace lemsched {

/// Relative symmetry tolerance: |a_ij - a_ji| <= tol * max(1, max|a|).
inline constexpr double kSymmetryTolerance = 1e-10;

/// Eigenpairs of a symmetric matrix. Eigenvalues descending; eigenvectors
/// are the columns of `vectors` and are orthonormal.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;

    Matrix reconstruct() const;
};

/// Square matrix that is symmetric to within kSymmetryTolerance. Small
/// drift is absorbed by storing (M + M^T) / 2.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Matrix m);

    static SymMatrix zero(std::size_t n);

    std::size_t dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return m_(r, c); }

private:
    Matrix m_;
};

/// Symmetric positive definite matrix. The eigendecomposition computed for
/// the definiteness check is retained and shared between copies.
class SpdMatrix {
public:
    explicit SpdMatrix(Matrix m);
    explicit SpdMatrix(const SymMatrix& m);

    std::size_t dim() const noexcept { return sym_.dim(); }
    const Matrix& matrix() const noexcept { return sym_.matrix(); }
    const SymMatrix& sym() const noexcept { return sym_; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return sym_(r, c); }

    const EigenDecomposition& eigen() const noexcept { return *eig_; }
    double min_eigenvalue() const noexcept { return eig_->values.back(); }

private:
    SymMatrix sym_;
    std::shared_ptr<const EigenDecomposition> eig_;
};

/// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm drops below
/// 1e-12 times the diagonal norm; throws NumericalError after 100 sweeps.
EigenDecomposition sym_eig(const SymMatrix& m);

/// Principal logarithm through the eigenbasis. Throws DomainError if any
/// eigenvalue is <= 0.
SymMatrix sym_log(const SymMatrix& m);
SymMatrix spd_log(const SpdMatrix& s);

/// Matrix exponential through the eigenbasis; inverse of spd_log.
SpdMatrix sym_exp(const SymMatrix& m);

/// ||a - b||_F^2 for matrices already mapped to the log domain.
double frobenius_sq_diff(const SymMatrix& a, const SymMatrix& b);

/// Squared Log-Euclidean distance ||log s1 - log s2||_F^2.
double lem_sq(const SpdMatrix& s1, const SpdMatrix& s2);

enum class KernelExponent {
    squared_norm,          // exp(-L / gamma^2), L = lem_sq
    literal_fourth_power,  // exp(-L^2 / gamma^2); not positive definite in general
};

struct KernelParams {
    double gamma_kernel = 1.0;
    KernelExponent exponent = KernelExponent::squared_norm;

    void validate() const;
};

double kernel_from_lem_sq(double lem, const KernelParams& p);
double kernel(const SpdMatrix& s1, const SpdMatrix& s2, const KernelParams& p);

/// Pairwise squared LEM distances of matrices already in the log domain.
Matrix lem_sq_matrix(std::span<const SymMatrix> logs);

/// G[i][j] = kernel(list[i], list[j]). Throws ValidationError on an empty
/// list or mixed dimensions.
Matrix gram(std::span<const SpdMatrix> list, const KernelParams& p);

}  // namespace lemsched
